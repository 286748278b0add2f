#include "lohe/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace lohe {

using json = nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string tuple_name(const std::array<std::size_t, 4>& q) {
  return "cr_" + std::to_string(q[0]) + "_" + std::to_string(q[1]) + "_" + std::to_string(q[2]) + "_" +
         std::to_string(q[3]);
}

// JSON has no NaN or infinity; reports carry null for them.
json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

std::vector<std::string> csv_header(std::span<const std::array<std::size_t, 4>> tuples,
                                    bool with_potential) {
  std::vector<std::string> h{"t", "rho", "diam_euclid", "diam_corr", "lyapunov"};
  if (with_potential) h.push_back("potential");
  h.push_back("norm_drift");
  for (const auto& q : tuples) {
    h.push_back(tuple_name(q) + "_re");
    h.push_back(tuple_name(q) + "_im");
  }
  return h;
}

void write_csv(std::ostream& out, std::span<const ObservableRecord> rows,
               std::span<const std::array<std::size_t, 4>> tuples) {
  const bool pot = !rows.empty() && rows.front().potential.has_value();
  const auto header = csv_header(tuples, pot);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : rows) {
    if (r.cross_ratios.size() != tuples.size())
      throw InvalidInput("record has " + std::to_string(r.cross_ratios.size()) + " cross-ratios, expected " +
                         std::to_string(tuples.size()));
    out << format_double(r.t) << ',' << format_double(r.rho) << ',' << format_double(r.diam_euclid) << ','
        << format_double(r.diam_corr) << ',' << format_double(r.lyapunov);
    if (pot) out << ',' << format_double(r.potential.value_or(std::numeric_limits<double>::quiet_NaN()));
    out << ',' << format_double(r.norm_drift);
    for (const auto& c : r.cross_ratios) out << ',' << format_double(c.real()) << ',' << format_double(c.imag());
    out << '\n';
  }
}

std::vector<double> CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) {
      std::vector<double> col;
      for (const auto& r : rows) col.push_back(r.at(i));
      return col;
    }
  throw InvalidInput("CSV has no column '" + name + "'");
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("empty CSV");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      // strtod rather than stod: subnormals must parse, not throw out_of_range.
      char* end = nullptr;
      const double x = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size())
        throw InvalidInput("CSV line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      row.push_back(x);
    }
    if (row.size() != t.header.size())
      throw InvalidInput("CSV line " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                         " fields, header has " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<ObservableRecord> records_from_csv(const CsvTable& table) {
  const auto& h = table.header;
  auto index = [&](const std::string& name) -> std::ptrdiff_t {
    for (std::size_t i = 0; i < h.size(); ++i)
      if (h[i] == name) return std::ptrdiff_t(i);
    return -1;
  };
  const char* fixed[] = {"t", "rho", "diam_euclid", "diam_corr", "lyapunov", "norm_drift"};
  for (const char* f : fixed)
    if (index(f) < 0) throw InvalidInput(std::string("CSV lacks column ") + f);
  const std::ptrdiff_t pot = index("potential");
  const std::size_t first_cr = std::size_t(index("norm_drift")) + 1;
  if ((h.size() - first_cr) % 2 != 0) throw InvalidInput("cross-ratio columns must come in re/im pairs");
  std::vector<ObservableRecord> out;
  for (const auto& r : table.rows) {
    ObservableRecord rec;
    rec.t = r[index("t")];
    rec.rho = r[index("rho")];
    rec.diam_euclid = r[index("diam_euclid")];
    rec.diam_corr = r[index("diam_corr")];
    rec.lyapunov = r[index("lyapunov")];
    if (pot >= 0) rec.potential = r[pot];
    rec.norm_drift = r[index("norm_drift")];
    for (std::size_t i = first_cr; i + 1 < r.size(); i += 2) rec.cross_ratios.emplace_back(r[i], r[i + 1]);
    out.push_back(std::move(rec));
  }
  return out;
}

std::string report_to_json(const VerificationReport& r) {
  json j;
  j["theorem_id"] = to_string(r.theorem);
  j["verdict"] = to_string(r.verdict);
  const auto& h = r.hypothesis;
  json gates = json::array();
  for (const auto& g : h.gates)
    gates.push_back({{"name", g.name}, {"value", number_or_null(g.value)}, {"bound", number_or_null(g.bound)},
                     {"passed", g.passed}});
  j["gates"] = {{"kappa_hat0", h.kappa_hat0},
                {"Tc_norm0", h.tc_norm0},
                {"eta", h.eta ? json(*h.eta) : json(nullptr)},
                {"DA", h.da},
                {"lambda0", h.lambda0},
                {"rho_in", h.rho_in},
                {"diameter0", h.diameter0},
                {"checks", gates},
                {"passed", h.gates_passed()}};
  json measured = json::object();
  for (const auto& [k, v] : r.measured) measured[k] = number_or_null(v);
  j["measured"] = measured;
  json checks = json::array();
  for (const auto& c : r.checks) {
    json cj = {{"name", c.name},
               {"value", number_or_null(c.value)},
               {"relation", c.relation},
               {"threshold", number_or_null(c.threshold)},
               {"passed", c.passed}};
    if (c.relation == "in") cj["upper"] = number_or_null(c.upper);
    checks.push_back(cj);
  }
  j["checks"] = checks;
  j["notes"] = r.notes;
  j["artifacts"] = r.artifacts;
  return j.dump(2) + "\n";
}

}  // namespace lohe
