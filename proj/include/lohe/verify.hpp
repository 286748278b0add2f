#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lohe/integrate.hpp"
#include "lohe/observe.hpp"
#include "lohe/setup.hpp"

namespace lohe {

enum class TheoremId {
  L2_1,
  T2_1a,
  T2_1b,
  P2_1,
  P3_1,
  T3_1,
  T3_2,
  P3_2,
  L3_2,
  P3_3,
  L4_1,
  C4_1,
  T4_1,
  T4_2,
  R4_2,
  D1Reduction,
};

std::string to_string(TheoremId id);
std::optional<TheoremId> theorem_from_string(std::string_view name);
std::vector<TheoremId> all_theorems();

struct Tolerances {
  double norm_drift = 1e-8;
  double cross_ratio = 1e-6;
  double rate_slack = 1e-3;  // relative slack on pointwise exponential bounds
  double residual = 1e-6;    // phase-orbit and splitting residuals
  double gradient_fd = 1e-6;
  double gradient_step = 1e-6;
  double gradient_identity = 1e-15;  // times N
  double phase_sum = 1e-8;
  double monotone = 1e-9;
  double derivative = 1e-5;
  double lyapunov_end = 1e-8;
  double stability_spread = 0.2;
  double reduction = 1e-12;
  double radial = 1e-14;
  bool operator==(const Tolerances&) const = default;
};

struct VerifyOptions {
  Tolerances tol;
  /// Trailing fraction of the run used for rate fits and envelope constants.
  double window = 0.6;
  std::vector<double> deltas{1e-4, 1e-5, 1e-6};
  std::vector<double> p_norms{1.0, 2.0, 3.0};
  /// D(A)/kappa0 values for the practical-aggregation sweep.
  std::vector<double> sweep{0.1, 0.01, 0.001};
  std::size_t reduction_samples = 100;
  bool operator==(const VerifyOptions&) const = default;
};

struct ScenarioSpec {
  TheoremId theorem = TheoremId::L2_1;
  SystemSpec system;
  VerifyOptions options;
};

/// Parameters each theorem is checked at by default.
ScenarioSpec reference_scenario(TheoremId id);

struct Gate {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool passed = false;
};

/// Closed-form quantities of the initial data; never integrates.
struct ThresholdReport {
  double kappa_hat0 = 0.0;
  double tc_norm0 = 0.0;
  /// Largest root of 2 k0 x^2 - (k0 - 4 k^0 ||Tc||^2) x + D(A) = 0, if real.
  std::optional<double> eta;
  double da = 0.0;
  double lambda0 = 0.0;
  double rho_in = 0.0;
  double diameter0 = 0.0;
  std::vector<Gate> gates;
  bool gates_passed() const;
};

/// Largest root of 2 k0 x^2 - b x + D(A) = 0 with b = k0 - 4 k^0 ||Tc||^2.
std::optional<double> eta_root(double kappa0, double kappa_hat0, double tc_norm, double da);

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  /// "<=", ">=", "<", ">", "in" (value within [threshold, upper])
  std::string relation = "<=";
  double upper = 0.0;
  bool passed = false;
};

enum class Verdict { Pass, Fail, HypothesisNotMet };
std::string to_string(Verdict v);

struct VerificationReport {
  TheoremId theorem = TheoremId::L2_1;
  ThresholdReport hypothesis;
  std::vector<Check> checks;
  std::map<std::string, double> measured;
  std::vector<std::string> notes;
  std::vector<std::string> artifacts;
  Verdict verdict = Verdict::Fail;

  void add_check(std::string name, double value, std::string relation, double threshold,
                 double upper = 0.0);
  /// Pass iff every check passed; HypothesisNotMet is set by the gate stage.
  void finalize();
};

ThresholdReport evaluate_gates(const ScenarioSpec& spec, const BuiltSystem& sys);

/// Gates, dynamics and conclusion checks. Gate failures produce a report with
/// verdict HypothesisNotMet. Integration faults propagate.
VerificationReport run_scenario(const ScenarioSpec& spec);

/// Runs independent scenarios on a pool of `threads` workers (0 = default).
/// Reports come back in input order.
std::vector<VerificationReport> run_scenarios(const std::vector<ScenarioSpec>& specs,
                                              int threads = 0);

/// Pointwise bound |1-h_ij(t)| <= |1-h_ij(0)| e^{-k0 (1 - 2 lambda0) t} (1 + slack),
/// lambda(t) <= lambda(0), the squared-distance corollary and the fitted rate.
void check_T31(const Trajectory<Members>& traj, double kappa0, const VerifyOptions& opt,
               VerificationReport& report);

/// Perturbed copy normalize(z_j + delta g_j) with a fixed direction g.
Members perturbed(const Members& base, double delta, std::uint64_t seed);

/// (sum_j ||Z_j - W_j||_F^p)^{1/p}
double ensemble_distance(const Members& z, const Members& w, double p);

}  // namespace lohe
