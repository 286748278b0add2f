#include "lohe/verify.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numbers>
#include <string>


namespace lohe {

namespace {

struct TheoremName {
  TheoremId id;
  const char* name;
};

constexpr TheoremName kTheoremNames[] = {
    {TheoremId::L2_1, "L2.1"},   {TheoremId::T2_1a, "T2.1a"},
    {TheoremId::T2_1b, "T2.1b"}, {TheoremId::P2_1, "P2.1"},
    {TheoremId::P3_1, "P3.1"},   {TheoremId::T3_1, "T3.1"},
    {TheoremId::T3_2, "T3.2"},   {TheoremId::P3_2, "P3.2"},
    {TheoremId::L3_2, "L3.2"},   {TheoremId::P3_3, "P3.3"},
    {TheoremId::L4_1, "L4.1"},   {TheoremId::C4_1, "C4.1"},
    {TheoremId::T4_1, "T4.1"},   {TheoremId::T4_2, "T4.2"},
    {TheoremId::R4_2, "R4.2"},   {TheoremId::D1Reduction, "D1-reduction"},
};

using PhaseState = std::vector<double>;

Trajectory<Members> run_members(const ModelParams& params, const Members& init,
                                const IntegratorConfig& cfg) {
  return integrate<Members>(make_ensemble_rhs(params), init, cfg);
}

Trajectory<PhaseState> run_phases(const PhaseModel& pm, const IntegratorConfig& cfg) {
  Rhs<PhaseState> f = [pm](double, const PhaseState& th) { return kuramoto_field(pm, th); };
  return integrate<PhaseState>(f, pm.theta, cfg);
}

ComplexTensor matvec(const ComplexTensor& a, const ComplexTensor& v) {
  const std::size_t d = v.size();
  ComplexTensor out(v.shape());
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) out[i] += a[i * d + k] * v[k];
  return out;
}

double max_abs_diff(const Members& a, const Members& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j)
    for (std::size_t k = 0; k < a[j].size(); ++k) m = std::max(m, std::abs(a[j][k] - b[j][k]));
  return m;
}

/// theta_dot_j = 2 k1 Im<z_j, z_c> along Subsystem B.
std::vector<double> phase_velocities(const Members& z, double kappa1) {
  const ComplexTensor zc = centroid(z);
  std::vector<double> v;
  for (const auto& m : z) v.push_back(2.0 * kappa1 * frobenius_inner(m, zc).imag());
  return v;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::size_t window_start(const std::vector<double>& times, double window) {
  const double start = times.back() - window * (times.back() - times.front());
  std::size_t b = 0;
  while (b < times.size() && times[b] < start) ++b;
  return b;
}

bool all_zero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

ModelKind theorem_model(TheoremId id, ModelKind requested) {
  switch (id) {
    case TheoremId::L2_1:
      return requested;
    case TheoremId::T2_1a:
    case TheoremId::T2_1b:
      return ModelKind::LoheTensor;
    case TheoremId::P3_1:
    case TheoremId::T3_1:
      return ModelKind::SubsystemA;
    case TheoremId::T3_2:
    case TheoremId::P3_2:
      return ModelKind::SubsystemB;
    case TheoremId::L3_2:
    case TheoremId::P3_3:
      return ModelKind::KuramotoFrustration;
    default:
      return ModelKind::LoheHermitianSphere;
  }
}

void add_gate(ThresholdReport& r, std::string name, double value, double bound, bool passed) {
  r.gates.push_back({std::move(name), value, bound, passed});
}

double max_generator_norm(const std::vector<SkewHermitianGenerator>& g) {
  double m = 0.0;
  for (const auto& a : g) m = std::max(m, frobenius_norm(a.tensor()));
  return m;
}

double min_pair_distance(const Members& z) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = i + 1; j < z.size(); ++j) m = std::min(m, frobenius_distance(z[i], z[j]));
  return m;
}

GeneratorSpec sweep_generators(const GeneratorSpec& base, double da) {
  GeneratorSpec g = base;
  if (g.kind == GeneratorKind::Zero) g.kind = GeneratorKind::RandomSkewHermitian;
  g.homogeneous = false;
  g.diameter_target = da;
  return g;
}

// ---------------------------------------------------------------------------

void run_L21(const ScenarioSpec& spec, const BuiltSystem& sys, VerificationReport& rep) {
  IntegratorConfig cfg = spec.system.integrator;
  if (cfg.renormalize.enabled) rep.notes.push_back("renormalization disabled for this check");
  cfg.renormalize.enabled = false;
  const auto traj = run_members(sys.params, sys.initial, cfg);
  rep.measured["max_norm_drift"] = traj.max_norm_drift();
  rep.add_check("max norm drift", traj.max_norm_drift(), "<=", spec.options.tol.norm_drift);
}

void run_T21a(const ScenarioSpec& spec, const BuiltSystem& sys, VerificationReport& rep) {
  const auto& opt = spec.options;
  const auto traj = run_members(sys.params, sys.initial, spec.system.integrator);
  std::vector<double> d;
  for (const auto& s : traj.states) d.push_back(diameter(s).value);
  if (all_zero(d)) {
    rep.notes.push_back("identical ensemble: diameter vanishes identically");
    rep.add_check("diameter stays zero", max_abs(d), "<=", 0.0);
    return;
  }
  const double k0 = sys.params.couplings->kappa0();
  const double beta = 4.0 * rep.hypothesis.kappa_hat0 * std::pow(rep.hypothesis.tc_norm0, 2);
  const RateFit fit = fit_decay_rate(traj.times, d, opt.window);
  rep.measured["fitted_rate"] = fit.rate;
  rep.measured["fit_r2"] = fit.r2;
  rep.add_check("fitted decay rate of D(T)", fit.rate, "in", k0 - beta, k0 + beta);

  const std::size_t b = window_start(traj.times, opt.window);
  const double tb = traj.times[b];
  const double c1 = d[b] * std::exp((k0 - beta) * tb);
  const double c0 = d[b] * std::exp((k0 + beta) * tb);
  rep.measured["C0"] = c0;
  rep.measured["C1"] = c1;
  rep.measured["transient_end"] = tb;
  double upper = 0.0, lower = std::numeric_limits<double>::infinity();
  for (std::size_t k = b; k < d.size(); ++k) {
    const double t = traj.times[k];
    upper = std::max(upper, d[k] / (c1 * std::exp(-(k0 - beta) * t)));
    lower = std::min(lower, d[k] / (c0 * std::exp(-(k0 + beta) * t)));
  }
  rep.add_check("D(T) / upper envelope", upper, "<=", 1.0 + opt.tol.rate_slack);
  rep.add_check("D(T) / lower envelope", lower, ">=", 1.0 - opt.tol.rate_slack);
}

void run_T21b(const ScenarioSpec& spec, VerificationReport& rep) {
  const auto& opt = spec.options;
  std::vector<double> ratios = opt.sweep;
  std::sort(ratios.begin(), ratios.end(), std::greater<>());
  double prev = std::numeric_limits<double>::infinity();
  double worst_gap = std::numeric_limits<double>::infinity();
  for (double r : ratios) {
    SystemSpec s = spec.system;
    s.model = ModelKind::LoheTensor;
    s.generators = sweep_generators(s.generators, r * s.effective_couplings().kappa0());
    const BuiltSystem sys = build_system(s);
    const auto traj = run_members(sys.params, sys.initial, s.integrator);
    const std::size_t b = window_start(traj.times, 0.2);
    double terminal = 0.0;
    for (std::size_t k = b; k < traj.size(); ++k)
      terminal = std::max(terminal, diameter(traj.states[k]).value);
    char key[64];
    std::snprintf(key, sizeof key, "terminal_D[DA/k0=%g]", r);
    rep.measured[key] = terminal;
    std::snprintf(key, sizeof key, "renormalizations[DA/k0=%g]", r);
    rep.measured[key] = double(traj.renormalization_times.size());
    if (std::isfinite(prev)) worst_gap = std::min(worst_gap, prev - terminal);
    prev = terminal;
  }
  rep.add_check("min decrease of terminal D(T) across sweep", worst_gap, ">", 0.0);
}

void run_P21(const ScenarioSpec& spec, const BuiltSystem& sys, VerificationReport& rep) {
  const auto& cfg = spec.system.integrator;
  ModelParams free = sys.params;
  free.generators.clear();
  auto [zt, wt] = std::pair{run_members(sys.params, sys.initial, cfg),
                            run_members(free, sys.initial, cfg)};
  const SkewHermitianGenerator omega =
      sys.params.generators.empty() ? SkewHermitianGenerator(spec.system.shape())
                                    : sys.params.generators.front();
  double worst = 0.0;
  for (std::size_t k = 0; k < zt.size(); ++k) {
    const ComplexTensor e = matrix_exp(omega, zt.times[k]);
    for (std::size_t j = 0; j < sys.initial.size(); ++j) {
      const ComplexTensor rotated = matvec(e, wt.states[k][j]);
      worst = std::max(worst, frobenius_distance(zt.states[k][j], rotated));
    }
  }
  rep.measured["max_splitting_residual"] = worst;
  rep.add_check("max_j ||z_j - exp(Omega t) w_j||", worst, "<=", spec.options.tol.residual);
}

void run_P31(const ScenarioSpec& spec, const BuiltSystem& sys, VerificationReport& rep) {
  const auto traj = run_members(sys.params, sys.initial, spec.system.integrator);
  const auto tuples = nondegenerate_tuples(correlations(sys.initial));
  rep.measured["tuples"] = double(tuples.size());
  std::vector<Complex> c0;
  {
    const auto c = correlations(sys.initial);
    for (const auto& q : tuples) c0.push_back(cross_ratio(c, q[0], q[1], q[2], q[3]));
  }
  double drift = 0.0, logsum_rise = -std::numeric_limits<double>::infinity();
  double prev_log = log_sum(correlations(sys.initial));
  std::size_t skipped = 0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const auto c = correlations(traj.states[k]);
    for (std::size_t q = 0; q < tuples.size(); ++q) {
      const auto& t = tuples[q];
      try {
        drift = std::max(drift, std::abs(cross_ratio(c, t[0], t[1], t[2], t[3]) - c0[q]));
      } catch (const DegenerateConfiguration&) {
        ++skipped;
      }
    }
    const double ls = log_sum(c);
    logsum_rise = std::max(logsum_rise, ls - prev_log);
    prev_log = ls;
  }
  if (skipped) rep.notes.push_back(std::to_string(skipped) + " degenerate cross-ratio evaluations skipped");
  rep.measured["max_cross_ratio_drift"] = drift;
  rep.add_check("max |C(t) - C(0)|", drift, "<=", spec.options.tol.cross_ratio);
  rep.add_check("max rise of log-sum per sample", logsum_rise, "<=", spec.options.tol.monotone);
}

void run_T32(const ScenarioSpec& spec, const BuiltSystem& sys, VerificationReport& rep) {
  const auto& cfg = spec.system.integrator;
  const auto zt = run_members(sys.params, sys.initial, cfg);
  const PhaseModel pm = build_phase_model(EnsembleState(sys.initial), spec.system.kappa1);
  const auto th = run_phases(pm, cfg);
  double worst = 0.0;
  for (std::size_t k = 0; k < zt.size(); ++k)
    for (std::size_t j = 0; j < sys.initial.size(); ++j) {
      ComplexTensor rot = sys.initial[j];
      rot *= std::polar(1.0, th.states[k][j]);
      worst = std::max(worst, frobenius_distance(zt.states[k][j], rot));
    }
  rep.measured["max_phase_orbit_residual"] = worst;
  rep.add_check("sup_t max_j ||z_j - e^{i theta_j} z_j(0)||", worst, "<=", spec.options.tol.residual);
}

void run_P32(const ScenarioSpec& spec, const BuiltSystem& sys, VerificationReport& rep) {
  const double k1 = spec.system.kappa1;
  const auto zt = run_members(sys.params, sys.initial, spec.system.integrator);
  std::vector<double> zc2, rhs;
  for (const auto& s : zt.states) {
    zc2.push_back(frobenius_norm_sq(centroid(s)));
    double acc = 0.0;
    for (double v : phase_velocities(s, k1)) acc += v * v;
    rhs.push_back(acc / (double(s.size()) * k1));
  }
  const auto dz = centered_differences(zt.times, zc2);
  double err = 0.0;
  for (std::size_t k = 0; k < dz.size(); ++k) err = std::max(err, std::abs(dz[k] - rhs[k + 1]));
  const double f0 = max_abs(phase_velocities(zt.states.front(), k1));
  const double f1 = max_abs(phase_velocities(zt.states.back(), k1));
  rep.measured["max_frequency_initial"] = f0;
  rep.measured["max_frequency_terminal"] = f1;
  rep.measured["zc_derivative_error"] = err;
  rep.add_check("terminal max |theta_dot| below initial", f1, "<", f0);
  rep.add_check("d||z_c||^2/dt vs sum theta_dot^2 / (N k1)", err, "<=", spec.options.tol.derivative);
}

PhaseModel phase_model_for(const ScenarioSpec& spec, const BuiltSystem& sys) {
  return build_phase_model(EnsembleState(sys.initial), spec.system.kappa1);
}

void run_L32(const ScenarioSpec& spec, const BuiltSystem& sys, VerificationReport& rep) {
  const auto th = run_phases(phase_model_for(spec, sys), spec.system.integrator);
  double worst = 0.0;
  for (const auto& s : th.states) {
    double sum = 0.0;
    for (double x : s) sum += x;
    worst = std::max(worst, std::abs(sum));
  }
  rep.measured["max_phase_sum"] = worst;
  rep.add_check("max |sum theta_j|", worst, "<=", spec.options.tol.phase_sum);
}

void run_P33(const ScenarioSpec& spec, const BuiltSystem& sys, VerificationReport& rep) {
  const auto& tol = spec.options.tol;
  PhaseModel pm = phase_model_for(spec, sys);
  const double n = double(pm.n);

  // Gradient and identity at a random phase configuration.
  const CounterRng rng(spec.system.seed);
  PhaseModel probe = pm;
  for (std::size_t j = 0; j < pm.n; ++j)
    probe.theta[j] = std::numbers::pi * (2.0 * rng.uniform(streams::kPhases, j) - 1.0);
  const auto grad = potential_gradient(probe);
  double fd_err = 0.0;
  for (std::size_t k = 0; k < pm.n; ++k) {
    PhaseModel p = probe, m = probe;
    p.theta[k] += tol.gradient_step;
    m.theta[k] -= tol.gradient_step;
    const double fd = (potential(p) - potential(m)) / (2.0 * tol.gradient_step);
    fd_err = std::max(fd_err, std::abs(fd - grad[k]));
  }
  rep.measured["gradient_fd_error"] = fd_err;
  rep.add_check("analytic vs central-difference gradient", fd_err, "<=", tol.gradient_fd);

  const auto th = run_phases(pm, spec.system.integrator);
  double identity = 0.0, phase_sum = 0.0, v_rise = -std::numeric_limits<double>::infinity();
  auto identity_at = [&](const PhaseModel& m) {
    const auto g = potential_gradient(m);
    const auto v = kuramoto_field(m, m.theta);
    double r = 0.0;
    for (std::size_t k = 0; k < m.n; ++k) r = std::max(r, std::abs(v[k] + g[k]));
    return r;
  };
  identity = identity_at(probe);
  double prev_v = std::numeric_limits<double>::infinity();
  for (const auto& s : th.states) {
    PhaseModel m = pm;
    m.theta = s;
    identity = std::max(identity, identity_at(m));
    double sum = 0.0;
    for (double x : s) sum += x;
    phase_sum = std::max(phase_sum, std::abs(sum));
    const double v = potential(m);
    if (std::isfinite(prev_v)) v_rise = std::max(v_rise, v - prev_v);
    prev_v = v;
  }
  PhaseModel first = pm, last = pm;
  first.theta = th.states.front();
  last.theta = th.states.back();
  const double f0 = max_abs(kuramoto_field(first, first.theta));
  const double f1 = max_abs(kuramoto_field(last, last.theta));
  rep.measured["gradient_identity_residual"] = identity;
  rep.measured["max_phase_sum"] = phase_sum;
  rep.measured["max_potential_rise"] = v_rise;
  rep.measured["max_frequency_initial"] = f0;
  rep.measured["max_frequency_terminal"] = f1;
  rep.add_check("max |theta_dot + grad V|", identity, "<=", tol.gradient_identity * n);
  rep.add_check("max |sum theta_j|", phase_sum, "<=", tol.phase_sum);
  rep.add_check("max rise of V per sample", v_rise, "<=", tol.monotone);
  rep.add_check("terminal max |theta_dot| below initial", f1, "<", f0);
}

void run_L41(const ScenarioSpec& spec, const BuiltSystem& sys, VerificationReport& rep) {
  const auto traj = run_members(sys.params, sys.initial, spec.system.integrator);
  std::vector<double> rho2, closed;
  double drop = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double r = order_parameter(traj.states[k]);
    if (k) drop = std::max(drop, std::sqrt(rho2.back()) - r);
    rho2.push_back(r * r);
    closed.push_back(rho_sq_rate(traj.states[k], spec.system.kappa0, spec.system.kappa1));
  }
  const auto d = centered_differences(traj.times, rho2);
  double err = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) err = std::max(err, std::abs(d[k] - closed[k + 1]));
  rep.measured["max_rho_drop"] = drop;
  rep.measured["rho_sq_derivative_error"] = err;
  rep.add_check("max decrease of rho per sample", drop, "<=", spec.options.tol.monotone);
  rep.add_check("d(rho^2)/dt vs closed form", err, "<=", spec.options.tol.derivative);
}

/// Number of members with Re<z_i, z_c> < 0 at the terminal state.
std::size_t opposite_members(const Members& z) {
  const ComplexTensor zc = centroid(z);
  std::size_t c = 0;
  for (const auto& m : z)
    if (frobenius_inner(m, zc).real() < 0.0) ++c;
  return c;
}

void run_C41(const ScenarioSpec& spec, const BuiltSystem& sys, VerificationReport& rep) {
  const auto traj = run_members(sys.params, sys.initial, spec.system.integrator);
  const Members& z = traj.states.back();
  const ComplexTensor zc = centroid(z);
  const double rho = frobenius_norm(zc);
  double align = std::numeric_limits<double>::infinity();
  for (const auto& m : z) align = std::min(align, std::abs(frobenius_inner(m, zc)) / rho);
  rep.measured["terminal_rho"] = rho;
  rep.measured["opposite_members"] = double(opposite_members(z));
  rep.notes.push_back("sign pattern of Re<z_i, z_c> reported, not asserted");
  rep.add_check("min_i |<z_i, z_c>| / rho at terminal time", align, ">=", 1.0 - spec.options.tol.residual);
}

void run_T41(const ScenarioSpec& spec, const BuiltSystem& sys, VerificationReport& rep) {
  const auto& tol = spec.options.tol;
  const auto traj = run_members(sys.params, sys.initial, spec.system.integrator);
  std::vector<double> lyap;
  double drop = -std::numeric_limits<double>::infinity(), prev = -1.0;
  for (const auto& s : traj.states) {
    lyap.push_back(lyapunov(correlations(s)));
    const double r = order_parameter(s);
    if (prev >= 0.0) drop = std::max(drop, prev - r);
    prev = r;
  }
  rep.measured["terminal_lyapunov"] = lyap.back();
  rep.measured["terminal_rho"] = prev;
  rep.add_check("terminal L(Z)", lyap.back(), "<=", tol.lyapunov_end);
  if (all_zero(lyap)) {
    rep.notes.push_back("identical ensemble: L(Z) vanishes identically");
  } else {
    const RateFit fit = fit_decay_rate(traj.times, lyap, spec.options.window);
    rep.measured["fitted_rate"] = fit.rate;
    rep.add_check("fitted decay rate of L(Z)", fit.rate, ">", 0.0);
  }
  rep.add_check("max decrease of rho per sample", drop, "<=", tol.monotone);
  rep.add_check("terminal rho minus rho_in", prev - rep.hypothesis.rho_in, ">=", 0.0);
  rep.add_check("members opposite the centroid", double(opposite_members(traj.states.back())), "<=", 0.0);
}

void run_T42(const ScenarioSpec& spec, const BuiltSystem& sys, VerificationReport& rep) {
  const auto& opt = spec.options;
  const auto rhs = make_ensemble_rhs(sys.params);
  std::vector<std::vector<double>> g(opt.p_norms.size());
  for (double delta : opt.deltas) {
    const Members other = perturbed(sys.initial, delta, spec.system.seed);
    auto [a, b] = integrate_pair<Members>(rhs, sys.initial, other, spec.system.integrator);
    for (std::size_t q = 0; q < opt.p_norms.size(); ++q) {
      const double p = opt.p_norms[q];
      const double d0 = ensemble_distance(sys.initial, other, p);
      double sup = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k)
        sup = std::max(sup, ensemble_distance(a.states[k], b.states[k], p));
      g[q].push_back(sup / d0);
      char key[64];
      std::snprintf(key, sizeof key, "G[p=%g,delta=%g]", p, delta);
      rep.measured[key] = sup / d0;
    }
  }
  for (std::size_t q = 0; q < opt.p_norms.size(); ++q) {
    const auto [lo, hi] = std::minmax_element(g[q].begin(), g[q].end());
    char name[64];
    std::snprintf(name, sizeof name, "G finite (p=%g)", opt.p_norms[q]);
    rep.add_check(name, std::isfinite(*hi) ? *hi : std::numeric_limits<double>::infinity(), "<",
                  std::numeric_limits<double>::infinity());
    std::snprintf(name, sizeof name, "relative spread of G across delta (p=%g)", opt.p_norms[q]);
    rep.add_check(name, (*hi - *lo) / *lo, "<", opt.tol.stability_spread);
  }
}

void run_R42(const ScenarioSpec& spec, const BuiltSystem& sys, VerificationReport& rep) {
  const double k0 = spec.system.kappa0, k1 = spec.system.kappa1;
  const auto traj = run_members(sys.params, sys.initial, spec.system.integrator);
  double worst = 0.0, special = 0.0;
  for (Members s : traj.states) {
    for (auto& m : s) m *= 1.0 / frobenius_norm(m);
    worst = std::max(worst, max_abs_diff(lhs_field(s, {}, k0, k1), projection_field(s, k0, k1)));
    // kappa1 = -kappa0 leaves kappa0 (z_c - <z_j, z_c> z_j)
    const ComplexTensor zc = centroid(s);
    Members direct;
    for (const auto& z : s) {
      ComplexTensor p = zc;
      p.add_scaled(-frobenius_inner(z, zc), z);
      p *= k0;
      direct.push_back(std::move(p));
    }
    special = std::max(special, max_abs_diff(lhs_field(s, {}, k0, -k0), direct));
  }
  rep.measured["projection_form_residual"] = worst;
  rep.measured["pure_projection_residual"] = special;
  rep.add_check("LHS field vs projection form", worst, "<=", spec.options.tol.reduction);
  rep.add_check("kappa1 = -kappa0 vs kappa0 P_perp z_c", special, "<=", spec.options.tol.reduction);
}

void run_D1(const ScenarioSpec& spec, VerificationReport& rep) {
  const auto& tol = spec.options.tol;
  const std::size_t n = spec.system.n;
  const std::size_t d = spec.system.dims.at(0);
  const double k0 = spec.system.kappa0, k1 = spec.system.kappa1;
  const CounterRng root(spec.system.seed);
  const TensorShape vec({d});
  double e_tensor = 0.0, e_real = 0.0, e_matrix = 0.0, e_proj = 0.0, e_radial = 0.0, e_angle = 0.0;
  for (std::size_t s = 0; s < spec.options.reduction_samples; ++s) {
    const CounterRng rng(root.bits(streams::kPerturbation + s, 0));
    Members z, zr, u;
    std::vector<SkewHermitianGenerator> om, omr, lifted;
    std::vector<ComplexTensor> hams;
    for (std::size_t j = 0; j < n; ++j) {
      z.push_back(random_unit_tensor(rng, streams::kMembers + j, vec));
      zr.push_back(random_unit_tensor(rng, streams::kMembers + n + j, vec, true));
      om.push_back(random_skew_hermitian(rng, streams::kGenerators + j, vec, 1.0));
      omr.push_back(random_skew_hermitian(rng, streams::kGenerators + n + j, vec, 1.0, true));
      u.push_back(random_unitary(rng, streams::kMembers + 2 * n + j, d));
      const auto a = random_skew_hermitian(rng, streams::kGenerators + 2 * n + j, vec, 1.0);
      hams.push_back(Complex(0.0, 1.0) * a.tensor());
      lifted.push_back(left_multiplication_generator(a));
    }
    const EnsembleState st(z), str(zr), stu(u);
    e_tensor = std::max(e_tensor, max_abs_diff(lohe_tensor_rhs(st, om, CouplingVector::rank1(k0, k1)),
                                               lhs_rhs(st, om, k0, k1)));
    e_real = std::max(e_real, max_abs_diff(lhs_rhs(str, omr, k0, k1), lohe_sphere_rhs(str, omr, k0)));
    const auto cm = CouplingVector::from_patterns(2, {{"10", 0.5 * k0}});
    e_matrix = std::max(e_matrix, max_abs_diff(lohe_tensor_rhs(stu, lifted, cm),
                                               lohe_matrix_rhs(stu, hams, k0)));
    e_proj = std::max(e_proj, max_abs_diff(lhs_rhs(st, {}, k0, k1), lhs_rhs_projection_form(st, k0, k1)));

    // d = 1 with nonunit radii
    Members w;
    for (std::size_t j = 0; j < n; ++j) {
      const double r = 0.5 + rng.uniform(streams::kPhases, 2 * j);
      const double th = 2.0 * std::numbers::pi * rng.uniform(streams::kPhases, 2 * j + 1);
      w.push_back(ComplexTensor::vector({std::polar(r, th)}));
    }
    const Members f = lhs_field(w, {}, k0, k1);
    const Complex wc = centroid(w)[0];
    for (std::size_t j = 0; j < n; ++j) {
      const double r = std::abs(w[j][0]);
      const Complex phase = w[j][0] / r;
      const Complex rot = std::conj(phase) * f[j][0];  // r_dot + i r theta_dot
      e_radial = std::max(e_radial, std::abs(rot.real()));
      const double law = 2.0 * (k0 + k1) * r * (std::conj(phase) * wc).imag();
      e_angle = std::max(e_angle, std::abs(rot.imag() / r - law));
    }
  }
  rep.measured["tensor_m1_vs_lhs"] = e_tensor;
  rep.measured["lhs_real_vs_sphere"] = e_real;
  rep.measured["tensor_m2_vs_matrix"] = e_matrix;
  rep.measured["lhs_vs_projection"] = e_proj;
  rep.measured["d1_radial"] = e_radial;
  rep.measured["d1_angular"] = e_angle;
  rep.add_check("tensor model (m=1) vs LHS", e_tensor, "<=", tol.reduction);
  rep.add_check("LHS on real data vs sphere model", e_real, "<=", tol.reduction);
  rep.add_check("tensor model (m=2, kappa10) vs matrix model", e_matrix, "<=", tol.reduction);
  rep.add_check("LHS vs projection form", e_proj, "<=", tol.reduction);
  rep.add_check("d=1 radial derivative", e_radial, "<=", tol.radial);
  rep.add_check("d=1 angular law", e_angle, "<=", tol.reduction);
}

}  // namespace

std::string to_string(TheoremId id) {
  for (const auto& t : kTheoremNames)
    if (t.id == id) return t.name;
  return "?";
}

std::optional<TheoremId> theorem_from_string(std::string_view name) {
  for (const auto& t : kTheoremNames)
    if (name == t.name) return t.id;
  return std::nullopt;
}

std::vector<TheoremId> all_theorems() {
  std::vector<TheoremId> out;
  for (const auto& t : kTheoremNames) out.push_back(t.id);
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::HypothesisNotMet:
      return "hypothesis-not-met";
  }
  return "?";
}

bool ThresholdReport::gates_passed() const {
  return std::all_of(gates.begin(), gates.end(), [](const Gate& g) { return g.passed; });
}

std::optional<double> eta_root(double kappa0, double kappa_hat0, double tc_norm, double da) {
  const double b = kappa0 - 4.0 * kappa_hat0 * tc_norm * tc_norm;
  const double disc = b * b - 8.0 * kappa0 * da;
  if (!(kappa0 > 0.0) || disc < 0.0) return std::nullopt;
  const double root = (b + std::sqrt(disc)) / (4.0 * kappa0);
  if (root < 0.0) return std::nullopt;
  return root;
}

void VerificationReport::add_check(std::string name, double value, std::string relation,
                                   double threshold, double upper) {
  bool ok = false;
  if (relation == "<=") ok = value <= threshold;
  else if (relation == "<") ok = value < threshold;
  else if (relation == ">=") ok = value >= threshold;
  else if (relation == ">") ok = value > threshold;
  else if (relation == "in") ok = value >= threshold && value <= upper;
  else throw InvalidInput("unknown check relation " + relation);
  checks.push_back({std::move(name), value, threshold, std::move(relation), upper, ok});
}

void VerificationReport::finalize() {
  if (verdict == Verdict::HypothesisNotMet) return;
  const bool ok = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  verdict = ok && !checks.empty() ? Verdict::Pass : Verdict::Fail;
}

Members perturbed(const Members& base, double delta, std::uint64_t seed) {
  if (!(delta > 0.0)) throw InvalidInput("perturbation size must be positive");
  const CounterRng rng(seed);
  Members out;
  for (std::size_t j = 0; j < base.size(); ++j) {
    ComplexTensor g = gaussian_tensor(rng, streams::kPerturbation + j, base[j].shape());
    g *= 1.0 / frobenius_norm(g);
    ComplexTensor z = base[j];
    z.add_scaled(delta, g);
    z *= 1.0 / frobenius_norm(z);
    out.push_back(std::move(z));
  }
  return out;
}

double ensemble_distance(const Members& z, const Members& w, double p) {
  if (!(p >= 1.0)) throw InvalidInput("p must be at least 1");
  double s = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) s += std::pow(frobenius_distance(z[j], w[j]), p);
  return std::pow(s, 1.0 / p);
}

ThresholdReport evaluate_gates(const ScenarioSpec& spec, const BuiltSystem& sys) {
  ThresholdReport r;
  const auto& s = spec.system;
  const Members& z = sys.initial;
  const double n = double(z.size());
  const double k0 = s.model == ModelKind::LoheTensor ? sys.params.couplings->kappa0() : s.kappa0;
  r.kappa_hat0 = s.model == ModelKind::LoheTensor ? sys.params.couplings->kappa_hat0() : s.kappa1;
  r.tc_norm0 = frobenius_norm(centroid(z));
  r.rho_in = r.tc_norm0;
  r.da = generator_diameter(sys.params.generators);
  r.lambda0 = correlation_diameter(correlations(z)).value;
  r.diameter0 = diameter(z).value;
  const double b = k0 - 4.0 * r.kappa_hat0 * r.tc_norm0 * r.tc_norm0;
  const double omega_norm = max_generator_norm(sys.params.generators);
  const double cluster_bound = (n - 2.0) / n;

  switch (spec.theorem) {
    case TheoremId::T2_1a:
      add_gate(r, "A_j = 0", omega_norm, 0.0, omega_norm == 0.0);
      add_gate(r, "kappa0 > 0", k0, 0.0, k0 > 0.0);
      add_gate(r, "kappa_hat0 < kappa0 / (4 ||Tc||^2)", r.kappa_hat0,
               k0 / (4.0 * r.tc_norm0 * r.tc_norm0), 4.0 * r.kappa_hat0 * r.tc_norm0 * r.tc_norm0 < k0);
      add_gate(r, "D(T_in) > 0", r.diameter0, 0.0, r.diameter0 > 0.0);
      add_gate(r, "D(T_in) < (kappa0 - 4 kappa_hat0 ||Tc||^2) / (2 kappa0)", r.diameter0,
               b / (2.0 * k0), r.diameter0 < b / (2.0 * k0));
      break;
    case TheoremId::T2_1b: {
      const double da = k0 * *std::max_element(spec.options.sweep.begin(), spec.options.sweep.end());
      r.da = da;
      r.eta = eta_root(k0, r.kappa_hat0, r.tc_norm0, da);
      add_gate(r, "kappa0 > 0", k0, 0.0, k0 > 0.0);
      add_gate(r, "D(A) < |kappa0 - 4 kappa_hat0 ||Tc||^2|^2 / (8 kappa0)", da, b * b / (8.0 * k0),
               da < b * b / (8.0 * k0));
      add_gate(r, "eta exists", r.eta ? 1.0 : 0.0, 1.0, r.eta.has_value());
      add_gate(r, "D(T_in) <= eta", r.diameter0, r.eta.value_or(0.0),
               r.eta && r.diameter0 <= *r.eta);
      break;
    }
    case TheoremId::P2_1:
      add_gate(r, "homogeneous Omega", r.da, 0.0, r.da == 0.0);
      break;
    case TheoremId::P3_1:
      add_gate(r, "kappa0 > 0", k0, 0.0, k0 > 0.0);
      add_gate(r, "nondegenerate 4-tuples", double(nondegenerate_tuples(correlations(z)).size()), 0.0,
               !nondegenerate_tuples(correlations(z)).empty());
      break;
    case TheoremId::T3_1:
      add_gate(r, "kappa0 > 0", k0, 0.0, k0 > 0.0);
      add_gate(r, "lambda_M(0) < 1/2", r.lambda0, 0.5, r.lambda0 < 0.5);
      break;
    case TheoremId::T3_2:
    case TheoremId::P3_2:
    case TheoremId::L3_2:
    case TheoremId::P3_3:
      add_gate(r, "kappa1 > 0", s.kappa1, 0.0, s.kappa1 > 0.0);
      break;
    case TheoremId::L4_1:
      add_gate(r, "Omega = 0", omega_norm, 0.0, omega_norm == 0.0);
      add_gate(r, "kappa0 > 0", k0, 0.0, k0 > 0.0);
      add_gate(r, "kappa0 + kappa1 >= 0", k0 + s.kappa1, 0.0, k0 + s.kappa1 >= 0.0);
      break;
    case TheoremId::C4_1:
    case TheoremId::T4_1:
    case TheoremId::T4_2:
      add_gate(r, "Omega = 0", omega_norm, 0.0, omega_norm == 0.0);
      add_gate(r, "kappa1 > 0", s.kappa1, 0.0, s.kappa1 > 0.0);
      add_gate(r, "kappa1 < kappa0 / 4", s.kappa1, k0 / 4.0, s.kappa1 < k0 / 4.0);
      add_gate(r, "rho_in > (N-2)/N", r.rho_in, cluster_bound, r.rho_in > cluster_bound);
      if (spec.theorem == TheoremId::T4_2) {
        add_gate(r, "distinct members", min_pair_distance(z), 0.0, min_pair_distance(z) > 0.0);
        for (double delta : spec.options.deltas) {
          if (!(delta > 0.0)) throw InvalidInput("perturbation sizes must be positive");
          const double rt = order_parameter(perturbed(z, delta, s.seed));
          char name[64];
          std::snprintf(name, sizeof name, "perturbed rho_in > (N-2)/N (delta=%g)", delta);
          add_gate(r, name, rt, cluster_bound, rt > cluster_bound);
        }
      }
      break;
    default:
      break;
  }
  return r;
}

ScenarioSpec reference_scenario(TheoremId id) {
  ScenarioSpec sc;
  sc.theorem = id;
  SystemSpec& s = sc.system;
  s.seed = 20240611;
  s.integrator.method = Method::RK4;
  s.integrator.dt = 1e-3;
  s.integrator.sample_every = 0.05;
  s.kappa0 = 1.0;
  s.kappa1 = 0.2;
  s.model = theorem_model(id, ModelKind::LoheHermitianSphere);
  switch (id) {
    case TheoremId::L2_1:
      s.n = 8;
      s.dims = {3};
      s.generators.kind = GeneratorKind::RandomSkewHermitian;
      s.integrator.t_end = 20.0;
      s.integrator.sample_every = 0.1;
      break;
    case TheoremId::T2_1a:
      s.n = 4;
      s.dims = {2, 2};
      s.couplings = CouplingVector::from_patterns(2, {{"00", 1.0}, {"01", 0.01}, {"10", 0.01}, {"11", 0.01}});
      s.initial.kind = InitialKind::Clustered;
      s.initial.diameter_target = 0.3;
      s.integrator.t_end = 15.0;
      break;
    case TheoremId::T2_1b:
      s.n = 4;
      s.dims = {2, 2};
      s.couplings = CouplingVector::from_patterns(2, {{"00", 1.0}, {"01", 0.005}, {"10", 0.005}, {"11", 0.005}});
      s.generators.kind = GeneratorKind::RandomSkewHermitian;
      s.initial.kind = InitialKind::Clustered;
      s.initial.diameter_target = 0.2;
      s.integrator.t_end = 15.0;
      s.integrator.renormalize = {true, 1e-6};
      break;
    case TheoremId::P2_1: {
      s.n = 4;
      s.dims = {2};
      s.generators.kind = GeneratorKind::Explicit;
      s.generators.explicit_entries = {ComplexTensor::matrix(2, 2, {0.0, 1.0, -1.0, 0.0})};
      s.integrator.t_end = 5.0;
      break;
    }
    case TheoremId::P3_1:
      s.n = 5;
      s.dims = {2};
      s.kappa1 = 0.0;
      s.integrator.t_end = 10.0;
      break;
    case TheoremId::T3_1:
      s.n = 8;
      s.dims = {3};
      s.kappa1 = 0.0;
      s.initial.kind = InitialKind::Clustered;
      s.initial.lambda_target = 0.3;
      s.integrator.t_end = 10.0;
      break;
    case TheoremId::T3_2:
      s.n = 6;
      s.dims = {2};
      s.kappa0 = 0.0;
      s.kappa1 = 1.0;
      s.integrator.t_end = 10.0;
      break;
    case TheoremId::P3_2:
      s.n = 6;
      s.dims = {2};
      s.kappa0 = 0.0;
      s.kappa1 = 1.0;
      s.integrator.t_end = 30.0;
      s.integrator.sample_every = s.integrator.dt;
      break;
    case TheoremId::L3_2:
    case TheoremId::P3_3:
      s.n = 10;
      s.dims = {2};
      s.kappa0 = 0.0;
      s.kappa1 = 1.0;
      s.integrator.t_end = 10.0;
      s.integrator.sample_every = s.integrator.dt;
      break;
    case TheoremId::L4_1:
      s.n = 8;
      s.dims = {3};
      s.integrator.t_end = 10.0;
      s.integrator.sample_every = s.integrator.dt;
      break;
    case TheoremId::C4_1:
    case TheoremId::T4_1:
    case TheoremId::T4_2:
      s.n = 4;
      s.dims = {2};
      s.kappa1 = 0.125;
      s.initial.kind = InitialKind::Clustered;
      s.initial.rho_target = 0.9;
      s.integrator.t_end = 20.0;
      break;
    case TheoremId::R4_2:
      s.n = 8;
      s.dims = {3};
      s.integrator.t_end = 5.0;
      s.integrator.sample_every = 0.1;
      break;
    case TheoremId::D1Reduction:
      s.n = 8;
      s.dims = {3};
      s.integrator.t_end = 1.0;
      s.integrator.sample_every = 0.1;
      break;
  }
  return sc;
}

void check_T31(const Trajectory<Members>& traj, double kappa0, const VerifyOptions& opt,
               VerificationReport& rep) {
  const auto c0 = correlations(traj.states.front());
  const double lam0 = correlation_diameter(c0).value;
  const double rate = kappa0 * (1.0 - 2.0 * lam0);
  const std::size_t n = c0.n;
  double bound_ratio = 0.0, dist_ratio = 0.0, lam_rise = -std::numeric_limits<double>::infinity();
  std::vector<double> lam;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto c = correlations(traj.states[k]);
    const double t = traj.times[k];
    const double decay = std::exp(-rate * t);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double g0 = std::abs(c0.one_minus(i, j));
        const double g = std::abs(c.one_minus(i, j));
        const double dist2 = std::pow(frobenius_distance(traj.states[k][i], traj.states[k][j]), 2);
        if (g0 == 0.0) {
          bound_ratio = std::max(bound_ratio, g == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
          continue;
        }
        bound_ratio = std::max(bound_ratio, g / (g0 * decay));
        dist_ratio = std::max(dist_ratio, dist2 / (2.0 * g0 * decay));
      }
    lam.push_back(correlation_diameter(c).value);
    if (k) lam_rise = std::max(lam_rise, lam[k] - lam[0]);
  }
  rep.measured["proof_rate"] = rate;
  rep.measured["max_bound_ratio"] = bound_ratio;
  rep.add_check("max |1-h_ij(t)| / (|1-h_ij(0)| e^{-k0(1-2 lambda0) t})", bound_ratio, "<=",
                1.0 + opt.tol.rate_slack);
  rep.add_check("max ||z_i-z_j||^2 / (2 |1-h_ij(0)| e^{-k0(1-2 lambda0) t})", dist_ratio, "<=",
                1.0 + opt.tol.rate_slack);
  rep.add_check("max lambda(t) - lambda(0)", std::max(lam_rise, 0.0), "<=", opt.tol.monotone);
  if (all_zero(lam)) {
    rep.notes.push_back("identical ensemble: lambda vanishes identically");
    return;
  }
  const RateFit fit = fit_decay_rate(traj.times, lam, opt.window);
  rep.measured["fitted_rate"] = fit.rate;
  rep.measured["fit_r2"] = fit.r2;
  rep.add_check("fitted decay rate of lambda", fit.rate, ">=", rate);
}

VerificationReport run_scenario(const ScenarioSpec& spec) {
  VerificationReport rep;
  rep.theorem = spec.theorem;
  ScenarioSpec sc = spec;
  const ModelKind model = theorem_model(spec.theorem, spec.system.model);
  if (model != spec.system.model)
    rep.notes.push_back("model set to " + to_string(model) + " for " + to_string(spec.theorem));
  sc.system.model = model;

  BuiltSystem sys;
  if (spec.theorem == TheoremId::T2_1b) {
    // Gates use the largest swept D(A); generators are rebuilt per sweep point.
    SystemSpec s = sc.system;
    s.generators.kind = GeneratorKind::Zero;
    sys = build_system(s);
  } else {
    sys = build_system(sc.system);
  }
  rep.hypothesis = evaluate_gates(sc, sys);
  if (!rep.hypothesis.gates_passed()) {
    rep.verdict = Verdict::HypothesisNotMet;
    return rep;
  }

  switch (spec.theorem) {
    case TheoremId::L2_1:
      run_L21(sc, sys, rep);
      break;
    case TheoremId::T2_1a:
      run_T21a(sc, sys, rep);
      break;
    case TheoremId::T2_1b:
      run_T21b(sc, rep);
      break;
    case TheoremId::P2_1:
      run_P21(sc, sys, rep);
      break;
    case TheoremId::P3_1:
      run_P31(sc, sys, rep);
      break;
    case TheoremId::T3_1: {
      const auto traj = run_members(sys.params, sys.initial, sc.system.integrator);
      check_T31(traj, sc.system.kappa0, sc.options, rep);
      break;
    }
    case TheoremId::T3_2:
      run_T32(sc, sys, rep);
      break;
    case TheoremId::P3_2:
      run_P32(sc, sys, rep);
      break;
    case TheoremId::L3_2:
      run_L32(sc, sys, rep);
      break;
    case TheoremId::P3_3:
      run_P33(sc, sys, rep);
      break;
    case TheoremId::L4_1:
      run_L41(sc, sys, rep);
      break;
    case TheoremId::C4_1:
      run_C41(sc, sys, rep);
      break;
    case TheoremId::T4_1:
      run_T41(sc, sys, rep);
      break;
    case TheoremId::T4_2:
      run_T42(sc, sys, rep);
      break;
    case TheoremId::R4_2:
      run_R42(sc, sys, rep);
      break;
    case TheoremId::D1Reduction:
      run_D1(sc, rep);
      break;
  }
  rep.finalize();
  return rep;
}

std::vector<VerificationReport> run_scenarios(const std::vector<ScenarioSpec>& specs, int threads) {
  if (threads <= 0) threads = omp_get_max_threads();
  std::vector<VerificationReport> out(specs.size());
  std::vector<std::exception_ptr> errors(specs.size());
  const auto n = static_cast<long>(specs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = run_scenario(specs[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace lohe
