#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "lohe/models.hpp"

namespace lohe {

/// Cross-ratio denominator factor too close to zero.
class DegenerateConfiguration : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Trajectory is not of the form z_j(t) = e^{i theta_j(t)} z_j(0).
class ReductionViolation : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Nonpositive value inside a log-linear fit window, or too few samples.
class FitDomainError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Pairwise inner products h_ij = <z_i, z_j>.
///
/// one_minus(i, j) is 1 - h_ij evaluated as
///   0.5 ||z_i - z_j||^2 - i Im<z_i, z_j - z_i>,
/// which equals 1 - h_ij on unit vectors but keeps full relative precision
/// when z_i and z_j are close.
struct CorrelationMatrix {
  std::size_t n = 0;
  std::vector<Complex> h;
  std::vector<Complex> gap;

  Complex operator()(std::size_t i, std::size_t j) const { return h[i * n + j]; }
  Complex one_minus(std::size_t i, std::size_t j) const { return gap[i * n + j]; }
  double R(std::size_t i, std::size_t j) const { return h[i * n + j].real(); }
  double I(std::size_t i, std::size_t j) const { return h[i * n + j].imag(); }
  double J(std::size_t i, std::size_t j) const { return 1.0 - R(i, j); }
};

CorrelationMatrix correlations(std::span<const ComplexTensor> members);

/// ||z_c||
double order_parameter(std::span<const ComplexTensor> members);

/// A maximal pairwise quantity and the lexicographically first pair attaining it.
struct PairMax {
  double value = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
};

/// max_{i<j} ||T_i - T_j||_F; works for tensors of any rank.
PairMax diameter(std::span<const ComplexTensor> members);
/// max_{i != j} |1 - h_ij|, i.e. lambda.
PairMax correlation_diameter(const CorrelationMatrix& c);
/// max_{i != j} |1 - h_ij|^2
double lyapunov(const CorrelationMatrix& c);
/// Max pairwise Frobenius distance of generators.
double generator_diameter(std::span<const SkewHermitianGenerator> generators);

/// (1-h_ij)(1-h_kl) / ((1-h_il)(1-h_kj)), indices 0-based.
Complex cross_ratio(const CorrelationMatrix& c, std::size_t i, std::size_t j, std::size_t k,
                    std::size_t l);
inline constexpr double kDegenerateTolerance = 1e-12;

/// All ordered 4-tuples of distinct indices whose cross-ratio is defined.
std::vector<std::array<std::size_t, 4>> nondegenerate_tuples(const CorrelationMatrix& c);

/// sum_{i != j} ln|1 - h_ij|
double log_sum(const CorrelationMatrix& c);

/// Closed form of d(rho^2)/dt along the LHS flow with Omega = 0:
/// (2 k0/N) sum(rho^2 - |h_ic|^2) + (4 (k0+k1)/N) sum Im(h_ic)^2.
double rho_sq_rate(std::span<const ComplexTensor> members, double kappa0, double kappa1);

struct ObservableRecord {
  double t = 0.0;
  double rho = 0.0;
  double diam_euclid = 0.0;
  double diam_corr = 0.0;
  double lyapunov = 0.0;
  std::optional<double> potential;
  double norm_drift = 0.0;
  std::vector<Complex> cross_ratios;
};

/// Degenerate tuples give NaN entries rather than an error.
ObservableRecord observe(double t, std::span<const ComplexTensor> members,
                         std::span<const std::array<std::size_t, 4>> tuples = {});

struct PhaseExtraction {
  /// theta[k][j] at sample k.
  std::vector<std::vector<double>> theta;
  /// max_j ||z_j(t_k) - e^{i theta_j} z_j(0)|| per sample.
  std::vector<double> residual;
};

/// Largest sample-to-sample phase increment accepted by the unwrapper.
inline constexpr double kMaxPhaseStep = 2.356194490192345;  // 3 pi / 4

PhaseExtraction extract_phases(std::span<const Members> states, const Members& initial,
                               double tolerance = 1e-6);

/// V = (k1/N) sum_{i,j} R_ij (1 - cos(theta_i - theta_j + alpha_ji)) at model.theta.
double potential(const PhaseModel& model);
/// dV/dtheta_k = (2 k1/N) sum_j R_kj sin(theta_k - theta_j + alpha_jk).
std::vector<double> potential_gradient(const PhaseModel& model);

struct RateFit {
  double rate = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least squares of ln y on t over the trailing `window` fraction of samples;
/// rate is the negated slope.
RateFit fit_decay_rate(std::span<const double> t, std::span<const double> y, double window);

/// Centered differences (y_{k+1} - y_{k-1}) / (t_{k+1} - t_{k-1}) at interior samples.
std::vector<double> centered_differences(std::span<const double> t, std::span<const double> y);

}  // namespace lohe
