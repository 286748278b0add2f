#include "lohe/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace lohe {

using json = nlohmann::json;
using Kind = ConfigError::Kind;

ConfigError::ConfigError(Kind kind, std::string path, const std::string& message)
    : std::runtime_error([&] {
        const char* tag = "";
        switch (kind) {
          case Kind::Syntax: tag = "syntax error"; break;
          case Kind::UnknownKey: tag = "unknown key"; break;
          case Kind::TypeMismatch: tag = "type mismatch"; break;
          case Kind::InvalidValue: tag = "invalid value"; break;
          case Kind::MissingKey: tag = "missing key"; break;
        }
        return std::string(tag) + (path.empty() ? "" : " at " + path) + ": " + message;
      }()),
      kind_(kind),
      path_(std::move(path)) {}

namespace {

std::string join(const std::string& path, const std::string& key) { return path + "/" + key; }

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!ok) throw ConfigError(Kind::UnknownKey, join(path, key), "'" + key + "' is not a recognized key");
  }
}

const json& require_object(const json& v, const std::string& path) {
  if (!v.is_object()) throw ConfigError(Kind::TypeMismatch, path, "expected an object");
  return v;
}

const json* field(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& required(const json& obj, const std::string& path, const char* key) {
  const json* v = field(obj, key);
  if (!v) throw ConfigError(Kind::MissingKey, join(path, key), "required key is absent");
  return *v;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(Kind::TypeMismatch, path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(Kind::InvalidValue, path, "must be finite");
  return x;
}

std::uint64_t unsigned_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(Kind::TypeMismatch, path, "expected an integer");
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const auto s = v.get<std::int64_t>();
  if (s < 0) throw ConfigError(Kind::InvalidValue, path, "must be nonnegative");
  return std::uint64_t(s);
}

std::size_t positive_count(const json& v, const std::string& path) {
  const auto x = unsigned_int(v, path);
  if (x == 0) throw ConfigError(Kind::InvalidValue, path, "must be positive");
  return std::size_t(x);
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(Kind::TypeMismatch, path, "expected a string");
  return v.get<std::string>();
}

bool boolean(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ConfigError(Kind::TypeMismatch, path, "expected true or false");
  return v.get<bool>();
}

double positive(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (!(x > 0.0)) throw ConfigError(Kind::InvalidValue, path, "must be positive");
  return x;
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(Kind::TypeMismatch, path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], join(path, std::to_string(i))));
  return out;
}

/// Complex numbers are two-element [re, im] arrays.
std::vector<Complex> complex_entries(const json& v, const std::string& path, std::size_t expected) {
  if (!v.is_array()) throw ConfigError(Kind::TypeMismatch, path, "expected an array of [re, im] pairs");
  if (v.size() != expected)
    throw ConfigError(Kind::InvalidValue, path,
                      "expected " + std::to_string(expected) + " entries, got " + std::to_string(v.size()));
  std::vector<Complex> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = join(path, std::to_string(i));
    if (!v[i].is_array() || v[i].size() != 2)
      throw ConfigError(Kind::TypeMismatch, p, "expected a two-element [re, im] array");
    out.emplace_back(number(v[i][0], join(p, "0")), number(v[i][1], join(p, "1")));
  }
  return out;
}

json complex_json(std::span<const Complex> entries) {
  json a = json::array();
  for (const auto& c : entries) a.push_back({c.real(), c.imag()});
  return a;
}

std::vector<ComplexTensor> tensor_list(const json& v, const std::string& path, const TensorShape& shape) {
  if (!v.is_array()) throw ConfigError(Kind::TypeMismatch, path, "expected an array of tensors");
  std::vector<ComplexTensor> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.emplace_back(shape, complex_entries(v[i], join(path, std::to_string(i)), shape.size()));
  return out;
}

void parse_couplings(const json& v, const std::string& path, SystemSpec& s) {
  require_object(v, path);
  check_keys(v, path, {"kappa0", "kappa1", "strengths"});
  const json* strengths = field(v, "strengths");
  if (strengths) {
    if (field(v, "kappa0") || field(v, "kappa1"))
      throw ConfigError(Kind::InvalidValue, path, "give either kappa0/kappa1 or strengths, not both");
    const std::string sp = join(path, "strengths");
    require_object(*strengths, sp);
    std::vector<std::pair<std::string, double>> entries;
    for (const auto& [key, val] : strengths->items()) {
      const std::string kp = join(sp, key);
      if (key.size() != s.dims.size() || key.find_first_not_of("01") != std::string::npos)
        throw ConfigError(Kind::InvalidValue, kp,
                          "pattern must be a " + std::to_string(s.dims.size()) + "-character 0/1 string");
      const double x = number(val, kp);
      if (x < 0.0) throw ConfigError(Kind::InvalidValue, kp, "strengths must be nonnegative");
      entries.emplace_back(key, x);
    }
    s.couplings = CouplingVector::from_patterns(s.dims.size(), entries);
    s.kappa0 = s.couplings->kappa0();
    s.kappa1 = 0.0;
    return;
  }
  s.kappa0 = number(required(v, path, "kappa0"), join(path, "kappa0"));
  s.kappa1 = field(v, "kappa1") ? number(*field(v, "kappa1"), join(path, "kappa1")) : 0.0;
}

void parse_generators(const json& v, const std::string& path, SystemSpec& s) {
  require_object(v, path);
  check_keys(v, path, {"kind", "scale", "homogeneous", "real", "diameter", "entries"});
  GeneratorSpec& g = s.generators;
  const std::string kind = text(required(v, path, "kind"), join(path, "kind"));
  if (kind == "zero") g.kind = GeneratorKind::Zero;
  else if (kind == "random-skew-hermitian") g.kind = GeneratorKind::RandomSkewHermitian;
  else if (kind == "explicit") g.kind = GeneratorKind::Explicit;
  else throw ConfigError(Kind::InvalidValue, join(path, "kind"), "unknown generator kind '" + kind + "'");
  if (auto* x = field(v, "scale")) {
    g.scale = number(*x, join(path, "scale"));
    if (g.scale < 0.0) throw ConfigError(Kind::InvalidValue, join(path, "scale"), "must be nonnegative");
  }
  if (auto* x = field(v, "homogeneous")) g.homogeneous = boolean(*x, join(path, "homogeneous"));
  if (auto* x = field(v, "real")) g.real_only = boolean(*x, join(path, "real"));
  if (auto* x = field(v, "diameter")) {
    g.diameter_target = number(*x, join(path, "diameter"));
    if (*g.diameter_target < 0.0)
      throw ConfigError(Kind::InvalidValue, join(path, "diameter"), "must be nonnegative");
  }
  if (g.kind == GeneratorKind::Explicit)
    g.explicit_entries = tensor_list(required(v, path, "entries"), join(path, "entries"),
                                     s.generator_base().doubled());
  else if (field(v, "entries"))
    throw ConfigError(Kind::InvalidValue, join(path, "entries"), "entries need kind 'explicit'");
}

void parse_initial(const json& v, const std::string& path, SystemSpec& s) {
  require_object(v, path);
  check_keys(v, path, {"kind", "real", "lambda_target", "rho_target", "diameter_target", "members"});
  InitialSpec& in = s.initial;
  const std::string kind = text(required(v, path, "kind"), join(path, "kind"));
  if (kind == "random") in.kind = InitialKind::Random;
  else if (kind == "clustered") in.kind = InitialKind::Clustered;
  else if (kind == "explicit") in.kind = InitialKind::Explicit;
  else throw ConfigError(Kind::InvalidValue, join(path, "kind"), "unknown initial kind '" + kind + "'");
  if (auto* x = field(v, "real")) in.real_only = boolean(*x, join(path, "real"));
  if (auto* x = field(v, "lambda_target")) in.lambda_target = positive(*x, join(path, "lambda_target"));
  if (auto* x = field(v, "rho_target")) in.rho_target = positive(*x, join(path, "rho_target"));
  if (auto* x = field(v, "diameter_target")) in.diameter_target = positive(*x, join(path, "diameter_target"));
  const bool has_target = in.lambda_target || in.rho_target || in.diameter_target;
  if (in.kind != InitialKind::Clustered && has_target)
    throw ConfigError(Kind::InvalidValue, path, "targets need kind 'clustered'");
  if (in.kind == InitialKind::Explicit)
    in.explicit_members = tensor_list(required(v, path, "members"), join(path, "members"), s.shape());
  else if (field(v, "members"))
    throw ConfigError(Kind::InvalidValue, join(path, "members"), "members need kind 'explicit'");
}

void parse_integrator(const json& v, const std::string& path, IntegratorConfig& c) {
  require_object(v, path);
  check_keys(v, path, {"method", "dt", "rtol", "atol", "t_end", "renormalize"});
  if (auto* x = field(v, "method")) {
    const std::string m = text(*x, join(path, "method"));
    if (m == "rk4") c.method = Method::RK4;
    else if (m == "rk45") c.method = Method::RK45;
    else throw ConfigError(Kind::InvalidValue, join(path, "method"), "expected 'rk4' or 'rk45'");
  }
  if (auto* x = field(v, "dt")) c.dt = positive(*x, join(path, "dt"));
  if (auto* x = field(v, "rtol")) c.rtol = positive(*x, join(path, "rtol"));
  if (auto* x = field(v, "atol")) c.atol = positive(*x, join(path, "atol"));
  c.t_end = positive(required(v, path, "t_end"), join(path, "t_end"));
  if (auto* x = field(v, "renormalize")) {
    const std::string rp = join(path, "renormalize");
    if (x->is_string()) {
      if (x->get<std::string>() != "off")
        throw ConfigError(Kind::InvalidValue, rp, "expected 'off' or {\"on_drift\": threshold}");
      c.renormalize = {};
    } else {
      require_object(*x, rp);
      check_keys(*x, rp, {"on_drift"});
      c.renormalize = {true, positive(required(*x, rp, "on_drift"), join(rp, "on_drift"))};
    }
  }
}

void parse_tolerances(const json& v, const std::string& path, Tolerances& t) {
  require_object(v, path);
  struct Entry {
    const char* key;
    double Tolerances::*member;
  };
  static constexpr Entry entries[] = {
      {"norm_drift", &Tolerances::norm_drift},
      {"cross_ratio", &Tolerances::cross_ratio},
      {"rate_slack", &Tolerances::rate_slack},
      {"residual", &Tolerances::residual},
      {"gradient_fd", &Tolerances::gradient_fd},
      {"gradient_step", &Tolerances::gradient_step},
      {"gradient_identity", &Tolerances::gradient_identity},
      {"phase_sum", &Tolerances::phase_sum},
      {"monotone", &Tolerances::monotone},
      {"derivative", &Tolerances::derivative},
      {"lyapunov_end", &Tolerances::lyapunov_end},
      {"stability_spread", &Tolerances::stability_spread},
      {"reduction", &Tolerances::reduction},
      {"radial", &Tolerances::radial},
  };
  for (const auto& [key, val] : v.items()) {
    const auto* e = std::find_if(std::begin(entries), std::end(entries),
                                 [&](const Entry& x) { return key == x.key; });
    if (e == std::end(entries))
      throw ConfigError(Kind::UnknownKey, join(path, key), "'" + key + "' is not a recognized tolerance");
    t.*(e->member) = positive(val, join(path, key));
  }
}

json tolerances_json(const Tolerances& t) {
  return {{"norm_drift", t.norm_drift},   {"cross_ratio", t.cross_ratio},
          {"rate_slack", t.rate_slack},   {"residual", t.residual},
          {"gradient_fd", t.gradient_fd}, {"gradient_step", t.gradient_step},
          {"gradient_identity", t.gradient_identity},
          {"phase_sum", t.phase_sum},     {"monotone", t.monotone},
          {"derivative", t.derivative},   {"lyapunov_end", t.lyapunov_end},
          {"stability_spread", t.stability_spread},
          {"reduction", t.reduction},     {"radial", t.radial}};
}

void parse_verify(const json& v, const std::string& path, VerifyBlock& b) {
  require_object(v, path);
  check_keys(v, path, {"theorem", "window", "deltas", "p", "sweep", "reduction_samples", "tolerances"});
  if (auto* x = field(v, "theorem")) {
    const std::string name = text(*x, join(path, "theorem"));
    b.theorem = theorem_from_string(name);
    if (!b.theorem) throw ConfigError(Kind::InvalidValue, join(path, "theorem"), "unknown theorem '" + name + "'");
  }
  auto& o = b.options;
  if (auto* x = field(v, "window")) o.window = positive(*x, join(path, "window"));
  if (auto* x = field(v, "deltas")) o.deltas = numbers(*x, join(path, "deltas"));
  if (auto* x = field(v, "p")) o.p_norms = numbers(*x, join(path, "p"));
  if (auto* x = field(v, "sweep")) o.sweep = numbers(*x, join(path, "sweep"));
  if (auto* x = field(v, "reduction_samples"))
    o.reduction_samples = positive_count(*x, join(path, "reduction_samples"));
  if (auto* x = field(v, "tolerances")) parse_tolerances(*x, join(path, "tolerances"), o.tol);
}

std::string model_json_name(ModelKind k) { return to_string(k); }

/// Line and column of a byte offset, for syntax diagnostics.
std::string position(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

bool needs_positive_kappa0(TheoremId id) {
  switch (id) {
    case TheoremId::T2_1a:
    case TheoremId::T2_1b:
    case TheoremId::P3_1:
    case TheoremId::T3_1:
    case TheoremId::L4_1:
    case TheoremId::C4_1:
    case TheoremId::T4_1:
    case TheoremId::T4_2:
      return true;
    default:
      return false;
  }
}

}  // namespace

SimConfig parse_config(std::string_view input) {
  json root;
  try {
    root = json::parse(input.begin(), input.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(Kind::Syntax, "", position(input, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
  require_object(root, "");
  check_keys(root, "", {"version", "model", "n", "dims", "couplings", "generators", "initial",
                        "integrator", "observables", "seed", "output", "verify", "sweep"});
  const std::string version = text(required(root, "", "version"), "/version");
  if (version != kConfigVersion)
    throw ConfigError(Kind::InvalidValue, "/version", "unsupported version '" + version + "'");

  SimConfig c;
  SystemSpec& s = c.system;
  const std::string model = text(required(root, "", "model"), "/model");
  const auto kind = model_kind_from_string(model);
  if (!kind) throw ConfigError(Kind::InvalidValue, "/model", "unknown model '" + model + "'");
  s.model = *kind;
  s.n = positive_count(required(root, "", "n"), "/n");
  const json& dims = required(root, "", "dims");
  if (!dims.is_array() || dims.empty())
    throw ConfigError(Kind::TypeMismatch, "/dims", "expected a nonempty array of dimensions");
  s.dims.clear();
  for (std::size_t i = 0; i < dims.size(); ++i)
    s.dims.push_back(positive_count(dims[i], "/dims/" + std::to_string(i)));
  parse_couplings(required(root, "", "couplings"), "/couplings", s);
  if (auto* x = field(root, "generators")) parse_generators(*x, "/generators", s);
  if (auto* x = field(root, "initial")) parse_initial(*x, "/initial", s);
  parse_integrator(required(root, "", "integrator"), "/integrator", s.integrator);
  if (auto* x = field(root, "seed")) s.seed = unsigned_int(*x, "/seed");

  if (auto* x = field(root, "observables")) {
    require_object(*x, "/observables");
    check_keys(*x, "/observables", {"cross_ratios", "sample_every"});
    if (auto* sev = field(*x, "sample_every"))
      s.integrator.sample_every = positive(*sev, "/observables/sample_every");
    if (auto* cr = field(*x, "cross_ratios")) {
      if (!cr->is_array()) throw ConfigError(Kind::TypeMismatch, "/observables/cross_ratios", "expected an array");
      for (std::size_t i = 0; i < cr->size(); ++i) {
        const std::string p = "/observables/cross_ratios/" + std::to_string(i);
        const json& q = (*cr)[i];
        if (!q.is_array() || q.size() != 4) throw ConfigError(Kind::TypeMismatch, p, "expected four indices");
        std::array<std::size_t, 4> t{};
        for (std::size_t k = 0; k < 4; ++k) {
          t[k] = std::size_t(unsigned_int(q[k], join(p, std::to_string(k))));
          if (t[k] >= s.n) throw ConfigError(Kind::InvalidValue, join(p, std::to_string(k)), "index out of range");
        }
        c.cross_ratios.push_back(t);
      }
    }
  }
  if (auto* x = field(root, "output")) {
    require_object(*x, "/output");
    check_keys(*x, "/output", {"dir", "format"});
    if (auto* d = field(*x, "dir")) c.output_dir = text(*d, "/output/dir");
    if (auto* f = field(*x, "format")) {
      c.output_format = text(*f, "/output/format");
      if (c.output_format != "csv") throw ConfigError(Kind::InvalidValue, "/output/format", "only 'csv' is supported");
    }
  }
  if (auto* x = field(root, "verify")) {
    c.verify.emplace();
    parse_verify(*x, "/verify", *c.verify);
  }
  if (auto* x = field(root, "sweep")) {
    require_object(*x, "/sweep");
    check_keys(*x, "/sweep", {"parameter", "values"});
    SweepBlock sw;
    sw.parameter = text(required(*x, "/sweep", "parameter"), "/sweep/parameter");
    const auto names = sweep_parameters();
    if (std::find(names.begin(), names.end(), sw.parameter) == names.end())
      throw ConfigError(Kind::InvalidValue, "/sweep/parameter", "cannot sweep '" + sw.parameter + "'");
    sw.values = numbers(required(*x, "/sweep", "values"), "/sweep/values");
    if (sw.values.empty()) throw ConfigError(Kind::InvalidValue, "/sweep/values", "needs at least one value");
    c.sweep = std::move(sw);
  }

  try {
    build_system(s);
  } catch (const InvalidInput& e) {
    throw ConfigError(Kind::InvalidValue, "", e.what());
  }
  if (c.verify && c.verify->theorem) validate_for_theorem(c, *c.verify->theorem);
  return c;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(Kind::InvalidValue, "", "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const SimConfig& c) {
  const SystemSpec& s = c.system;
  json root;
  root["version"] = kConfigVersion;
  root["model"] = model_json_name(s.model);
  root["n"] = s.n;
  root["dims"] = s.dims;
  if (s.couplings) {
    json st = json::object();
    for (std::size_t i = 0; i < s.couplings->count(); ++i)
      if (s.couplings->by_index(i) != 0.0) st[s.couplings->pattern_string(i)] = s.couplings->by_index(i);
    root["couplings"] = {{"strengths", st}};
  } else {
    root["couplings"] = {{"kappa0", s.kappa0}, {"kappa1", s.kappa1}};
  }
  {
    const GeneratorSpec& g = s.generators;
    json gj;
    gj["kind"] = g.kind == GeneratorKind::Zero ? "zero"
                 : g.kind == GeneratorKind::RandomSkewHermitian ? "random-skew-hermitian"
                                                                : "explicit";
    gj["scale"] = g.scale;
    gj["homogeneous"] = g.homogeneous;
    gj["real"] = g.real_only;
    if (g.diameter_target) gj["diameter"] = *g.diameter_target;
    if (g.kind == GeneratorKind::Explicit) {
      gj["entries"] = json::array();
      for (const auto& t : g.explicit_entries) gj["entries"].push_back(complex_json(t.entries()));
    }
    root["generators"] = gj;
  }
  {
    const InitialSpec& in = s.initial;
    json ij;
    ij["kind"] = in.kind == InitialKind::Random ? "random" : in.kind == InitialKind::Clustered ? "clustered" : "explicit";
    ij["real"] = in.real_only;
    if (in.lambda_target) ij["lambda_target"] = *in.lambda_target;
    if (in.rho_target) ij["rho_target"] = *in.rho_target;
    if (in.diameter_target) ij["diameter_target"] = *in.diameter_target;
    if (in.kind == InitialKind::Explicit) {
      ij["members"] = json::array();
      for (const auto& t : in.explicit_members) ij["members"].push_back(complex_json(t.entries()));
    }
    root["initial"] = ij;
  }
  {
    const IntegratorConfig& ic = s.integrator;
    json ij;
    ij["method"] = ic.method == Method::RK4 ? "rk4" : "rk45";
    ij["dt"] = ic.dt;
    ij["rtol"] = ic.rtol;
    ij["atol"] = ic.atol;
    ij["t_end"] = ic.t_end;
    if (ic.renormalize.enabled) ij["renormalize"] = {{"on_drift", ic.renormalize.threshold}};
    else ij["renormalize"] = "off";
    root["integrator"] = ij;
  }
  json obs;
  obs["sample_every"] = s.integrator.sample_every;
  obs["cross_ratios"] = json::array();
  for (const auto& q : c.cross_ratios) obs["cross_ratios"].push_back(q);
  root["observables"] = obs;
  root["seed"] = s.seed;
  root["output"] = {{"dir", c.output_dir}, {"format", c.output_format}};
  if (c.verify) {
    const auto& o = c.verify->options;
    json vj;
    if (c.verify->theorem) vj["theorem"] = to_string(*c.verify->theorem);
    vj["window"] = o.window;
    vj["deltas"] = o.deltas;
    vj["p"] = o.p_norms;
    vj["sweep"] = o.sweep;
    vj["reduction_samples"] = o.reduction_samples;
    vj["tolerances"] = tolerances_json(o.tol);
    root["verify"] = vj;
  }
  if (c.sweep) root["sweep"] = {{"parameter", c.sweep->parameter}, {"values", c.sweep->values}};
  return root.dump(2) + "\n";
}

void validate_for_theorem(const SimConfig& c, TheoremId theorem) {
  const double k0 = c.system.kappa0;
  if (k0 < 0.0 || (needs_positive_kappa0(theorem) && !(k0 > 0.0)))
    throw ConfigError(Kind::InvalidValue, c.system.couplings ? "/couplings/strengths" : "/couplings/kappa0",
                      to_string(theorem) + " needs kappa0 > 0");
  if (!c.verify) return;
  const auto& o = c.verify->options;
  if (!(o.window > 0.0 && o.window <= 1.0))
    throw ConfigError(Kind::InvalidValue, "/verify/window", "must lie in (0, 1]");
  for (double d : o.deltas)
    if (!(d > 0.0)) throw ConfigError(Kind::InvalidValue, "/verify/deltas", "perturbation sizes must be positive");
  for (double p : o.p_norms)
    if (!(p >= 1.0)) throw ConfigError(Kind::InvalidValue, "/verify/p", "p must be at least 1");
  if (theorem == TheoremId::T2_1b && o.sweep.empty())
    throw ConfigError(Kind::InvalidValue, "/verify/sweep", "needs at least one D(A)/kappa0 value");
  for (double r : o.sweep)
    if (!(r > 0.0)) throw ConfigError(Kind::InvalidValue, "/verify/sweep", "sweep ratios must be positive");
}

ScenarioSpec to_scenario(const SimConfig& c, TheoremId theorem) {
  validate_for_theorem(c, theorem);
  ScenarioSpec sc;
  sc.theorem = theorem;
  sc.system = c.system;
  if (c.verify) sc.options = c.verify->options;
  return sc;
}

std::vector<std::string> sweep_parameters() {
  return {"kappa0", "kappa1", "seed", "dt", "t_end", "generator_scale", "generator_diameter",
          "lambda_target", "rho_target", "diameter_target"};
}

SimConfig with_parameter(const SimConfig& config, const std::string& name, double value) {
  SimConfig c = config;
  SystemSpec& s = c.system;
  if (name == "kappa0") {
    s.kappa0 = value;
    if (s.couplings) s.couplings->set_by_index(0, value);
  } else if (name == "kappa1") {
    s.kappa1 = value;
  } else if (name == "seed") {
    if (value < 0.0 || value != std::floor(value))
      throw ConfigError(Kind::InvalidValue, "/sweep/values", "seeds must be nonnegative integers");
    s.seed = std::uint64_t(value);
  } else if (name == "dt") {
    s.integrator.dt = value;
  } else if (name == "t_end") {
    s.integrator.t_end = value;
  } else if (name == "generator_scale") {
    s.generators.scale = value;
  } else if (name == "generator_diameter") {
    s.generators.diameter_target = value;
  } else if (name == "lambda_target") {
    s.initial.lambda_target = value;
  } else if (name == "rho_target") {
    s.initial.rho_target = value;
  } else if (name == "diameter_target") {
    s.initial.diameter_target = value;
  } else {
    throw ConfigError(Kind::InvalidValue, "/sweep/parameter", "cannot sweep '" + name + "'");
  }
  return c;
}

}  // namespace lohe
