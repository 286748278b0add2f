#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "lohe/cli.hpp"
#include "lohe/config.hpp"
#include "lohe/io.hpp"

using namespace lohe;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const char* kMinimal = R"({
  "version": "v1",
  "model": "LoheHermitianSphere",
  "n": 2,
  "dims": [1],
  "couplings": {"kappa0": 1, "kappa1": 0},
  "integrator": {"t_end": 1}
})";

json minimal() { return json::parse(kMinimal); }

ConfigError::Kind error_kind(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.kind();
  }
  FAIL("config was accepted");
  return ConfigError::Kind::Syntax;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("lohe_cli_" + std::to_string(std::hash<const void*>{}(this)) + "_" +
                                        std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
};

int cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("minimal config parses") {
  const auto c = parse_config(kMinimal);
  CHECK(c.system.n == 2);
  CHECK(c.system.dims == std::vector<std::size_t>{1});
  CHECK(c.system.kappa0 == 1.0);
  CHECK(c.system.model == ModelKind::LoheHermitianSphere);
  CHECK(c.output_format == "csv");
}

TEST_CASE("config diagnostics are distinct") {
  SUBCASE("unknown key names the key") {
    auto j = minimal();
    j["couplings"]["kapa0"] = 1;
    try {
      parse_config(j.dump());
      FAIL("accepted");
    } catch (const ConfigError& e) {
      CHECK(e.kind() == ConfigError::Kind::UnknownKey);
      CHECK(e.path() == "/couplings/kapa0");
      CHECK(std::string(e.what()).find("kapa0") != std::string::npos);
    }
  }
  SUBCASE("syntax error reports a position") {
    try {
      parse_config("{\n  \"version\": \"v1\",\n  \"n\": ,\n}");
      FAIL("accepted");
    } catch (const ConfigError& e) {
      CHECK(e.kind() == ConfigError::Kind::Syntax);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
  SUBCASE("type mismatch, missing key and invalid values") {
    auto j = minimal();
    j["n"] = "two";
    CHECK(error_kind(j.dump()) == ConfigError::Kind::TypeMismatch);
    j = minimal();
    j.erase("integrator");
    CHECK(error_kind(j.dump()) == ConfigError::Kind::MissingKey);
    j = minimal();
    j["integrator"]["dt"] = -0.1;
    CHECK(error_kind(j.dump()) == ConfigError::Kind::InvalidValue);
    j = minimal();
    j["n"] = 0;
    CHECK(error_kind(j.dump()) == ConfigError::Kind::InvalidValue);
    j = minimal();
    j["version"] = "v2";
    CHECK(error_kind(j.dump()) == ConfigError::Kind::InvalidValue);
  }
  SUBCASE("theorem scenarios need kappa0 > 0") {
    auto j = minimal();
    j["couplings"]["kappa0"] = -1;
    j["verify"] = {{"theorem", "T3.1"}};
    CHECK(error_kind(j.dump()) == ConfigError::Kind::InvalidValue);
    j["couplings"]["kappa0"] = 0;
    CHECK(error_kind(j.dump()) == ConfigError::Kind::InvalidValue);
  }
}

TEST_CASE("serialize then parse reproduces the config") {
  auto j = minimal();
  j["model"] = "LoheTensor";
  j["n"] = 4;
  j["dims"] = {2, 2};
  j["couplings"] = {{"strengths", {{"00", 1.0}, {"01", 0.01}, {"11", 0.1}}}};
  j["generators"] = {{"kind", "random-skew-hermitian"}, {"scale", 0.3}, {"diameter", 0.05}};
  j["initial"] = {{"kind", "clustered"}, {"diameter_target", 0.3}};
  j["integrator"] = {{"method", "rk45"}, {"dt", 0.01}, {"t_end", 2.5}, {"renormalize", {{"on_drift", 1e-6}}}};
  j["observables"] = {{"sample_every", 0.1}, {"cross_ratios", {{0, 1, 2, 3}}}};
  j["seed"] = 18446744073709551615ull;
  j["verify"] = {{"theorem", "T2.1b"}, {"sweep", {0.1, 0.01}}, {"tolerances", {{"residual", 1e-7}}}};
  j["sweep"] = {{"parameter", "seed"}, {"values", {1, 2}}};
  const auto c = parse_config(j.dump());
  const auto text = serialize_config(c);
  const auto c2 = parse_config(text);
  CHECK(c2 == c);
  CHECK(serialize_config(c2) == text);
  CHECK(c.system.seed == std::numeric_limits<std::uint64_t>::max());

  SimConfig e = parse_config(kMinimal);
  e.system.initial.kind = InitialKind::Explicit;
  e.system.initial.explicit_members = {ComplexTensor::vector({Complex(0.6, 0.8)}), ComplexTensor::vector({1.0})};
  CHECK(parse_config(serialize_config(e)) == e);
}

TEST_CASE("sweep parameters") {
  const auto c = parse_config(kMinimal);
  CHECK(with_parameter(c, "kappa1", 0.5).system.kappa1 == 0.5);
  CHECK(with_parameter(c, "seed", 12).system.seed == 12);
  CHECK_THROWS_AS(with_parameter(c, "seed", 1.5), ConfigError);
  CHECK_THROWS_AS(with_parameter(c, "n", 3), ConfigError);
}

TEST_CASE("CSV round-trip is lossless") {
  std::vector<ObservableRecord> rows(3);
  const std::vector<std::array<std::size_t, 4>> tuples{{0, 1, 2, 3}};
  for (std::size_t k = 0; k < rows.size(); ++k) {
    auto& r = rows[k];
    r.t = 0.1 * double(k) + 1.0 / 3.0;
    r.rho = std::nextafter(0.9, 1.0);
    r.diam_euclid = 1e-300;
    r.diam_corr = std::sqrt(2.0) * 1e-17;
    r.lyapunov = r.diam_corr * r.diam_corr;
    r.potential = -std::numbers::pi;
    r.norm_drift = 4.9e-324;
    r.cross_ratios = {Complex(std::exp(1.0), -1.0 / 7.0)};
  }
  rows[2].cross_ratios[0] = Complex(std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN());
  std::stringstream ss;
  write_csv(ss, rows, tuples);
  const std::string text = ss.str();
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.rfind("t,rho,diam_euclid,diam_corr,lyapunov,potential,norm_drift,cr_0_1_2_3_re,cr_0_1_2_3_im\n", 0) == 0);
  const auto back = records_from_csv(read_csv(ss));
  REQUIRE(back.size() == 3);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(back[k].t == rows[k].t);
    CHECK(back[k].rho == rows[k].rho);
    CHECK(back[k].diam_euclid == rows[k].diam_euclid);
    CHECK(back[k].diam_corr == rows[k].diam_corr);
    CHECK(back[k].lyapunov == rows[k].lyapunov);
    CHECK(back[k].potential == rows[k].potential);
    CHECK(back[k].norm_drift == rows[k].norm_drift);
    CHECK(back[k].cross_ratios == rows[k].cross_ratios);
  }
  CHECK(std::isnan(back[2].cross_ratios[0].real()));
  std::stringstream bad("t,rho\n1,2,3\n");
  CHECK_THROWS_AS(read_csv(bad), InvalidInput);
}

TEST_CASE("report JSON carries the documented fields") {
  auto sc = reference_scenario(TheoremId::D1Reduction);
  sc.options.reduction_samples = 3;
  const auto j = json::parse(report_to_json(run_scenario(sc)));
  CHECK(j.at("theorem_id") == "D1-reduction");
  CHECK(j.at("verdict") == "pass");
  CHECK(j.at("gates").contains("kappa_hat0"));
  CHECK(j.at("gates").contains("eta"));
  CHECK(j.at("measured").contains("d1_radial"));
  CHECK(j.at("checks").size() == 6);
}

TEST_CASE("lohe-lab exit codes") {
  TempDir tmp;
  SUBCASE("simulate an identical ensemble") {
    auto j = minimal();
    j["initial"] = {{"kind", "explicit"}, {"members", {{{0.6, 0.8}}, {{0.6, 0.8}}}}};
    j["output"] = {{"dir", (tmp.path / "sim").string()}};
    const auto cfg = tmp.write("ident.json", j.dump());
    CHECK(cli({"simulate", "--config", cfg}) == kExitPass);
    std::ifstream in(tmp.path / "sim" / "trajectory.csv");
    const auto table = read_csv(in);
    CHECK(table.rows.size() == 101);
    for (double r : table.column("rho")) CHECK(r == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fs::exists(tmp.path / "sim" / "summary.json"));

    std::string out;
    CHECK(cli({"rate-fit", "--csv", (tmp.path / "sim" / "trajectory.csv").string(), "--column", "rho"}, &out) ==
          kExitPass);
    const auto fit = json::parse(out);
    CHECK(std::abs(fit.at("rate").get<double>()) < 1e-12);
  }
  SUBCASE("verify: pass and hypothesis-not-met") {
    auto j = minimal();
    j["model"] = "SubsystemA";
    j["n"] = 8;
    j["dims"] = {3};
    j["seed"] = 20240611;
    j["initial"] = {{"kind", "clustered"}, {"lambda_target", 0.3}};
    j["integrator"] = {{"t_end", 10}, {"dt", 1e-3}};
    j["observables"] = {{"sample_every", 0.05}};
    const auto cfg = tmp.write("ref_t31.json", j.dump());
    const auto out_dir = (tmp.path / "v").string();
    CHECK(cli({"verify", "--theorem", "T3.1", "--config", cfg, "--out", out_dir}) == kExitPass);
    std::ifstream in(tmp.path / "v" / "report_T3.1.json");
    const auto rep = json::parse(in);
    CHECK(rep.at("measured").at("fitted_rate").get<double>() >= 0.4);

    auto g = minimal();
    g["n"] = 4;
    g["dims"] = {2};
    g["couplings"] = {{"kappa0", 1.0}, {"kappa1", 1.0}};
    g["initial"] = {{"kind", "clustered"}, {"rho_target", 0.9}};
    const auto bad = tmp.write("t41.json", g.dump());
    CHECK(cli({"verify", "--theorem", "T4.1", "--config", bad, "--out", out_dir}) == kExitHypothesisNotMet);
  }
  SUBCASE("usage and config errors") {
    std::string err;
    CHECK(cli({}, nullptr, &err) == kExitUsage);
    CHECK(cli({"frobnicate"}) == kExitUsage);
    auto j = minimal();
    j["kapa0"] = 1;
    const auto cfg = tmp.write("bad.json", j.dump());
    CHECK(cli({"simulate", "--config", cfg}, nullptr, &err) == kExitUsage);
    CHECK(err.find("kapa0") != std::string::npos);
    CHECK(cli({"verify", "--theorem", "X1"}) == kExitUsage);
  }
  SUBCASE("integration fault writes the partial trajectory") {
    auto j = minimal();
    j["integrator"] = {{"t_end", 1.0}, {"dt", 0.1}};
    j["observables"] = {{"sample_every", 0.1}};
    j["couplings"] = {{"kappa0", 1e308}, {"kappa1", 1e308}};
    j["n"] = 3;
    j["dims"] = {2};
    j["output"] = {{"dir", (tmp.path / "fault").string()}};
    const auto cfg = tmp.write("fault.json", j.dump());
    CHECK(cli({"simulate", "--config", cfg}) == kExitIntegrationFault);
    CHECK(fs::exists(tmp.path / "fault" / "trajectory.csv"));
  }
  SUBCASE("sweep writes one report per point and an index") {
    auto j = minimal();
    j["n"] = 4;
    j["dims"] = {2};
    j["couplings"] = {{"kappa0", 1.0}, {"kappa1", 0.1}};
    j["initial"] = {{"kind", "clustered"}, {"rho_target", 0.9}};
    j["integrator"] = {{"t_end", 2.0}};
    j["observables"] = {{"sample_every", 1e-3}};
    j["sweep"] = {{"parameter", "kappa1"}, {"values", {0.05, 0.1, 1.0}}};
    const auto cfg = tmp.write("sweep.json", j.dump());
    const auto dir = tmp.path / "sw";
    CHECK(cli({"sweep", "--config", cfg, "--theorem", "L4.1", "--out", dir.string()}) == kExitPass);
    CHECK(fs::exists(dir / "report_2.json"));
    std::ifstream in(dir / "index.json");
    CHECK(json::parse(in).at("points").size() == 3);
    CHECK(cli({"sweep", "--config", cfg, "--out", (tmp.path / "sw2").string()}) == kExitPass);
    CHECK(fs::exists(tmp.path / "sw2" / "point_1" / "trajectory.csv"));
  }
}
