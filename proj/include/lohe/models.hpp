#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lohe/tensor.hpp"

namespace lohe {

using Members = std::vector<ComplexTensor>;

/// Members must have unit norm to this tolerance at every validated RHS entry.
inline constexpr double kUnitNormTolerance = 1e-8;

/// Nonnegative strengths kappa_{i*} for every bit pattern i* in {0,1}^m.
/// Patterns are stored with i_1 as the most significant bit, so the pattern
/// string "10" means (i_1, i_2) = (1, 0).
class CouplingVector {
 public:
  explicit CouplingVector(std::size_t rank);

  /// m = 1: kappa_(0) = kappa0, kappa_(1) = kappa1.
  static CouplingVector rank1(double kappa0, double kappa1);
  /// Strengths keyed by pattern strings such as "00", "01"; absent patterns are 0.
  static CouplingVector from_patterns(std::size_t rank,
                                      const std::vector<std::pair<std::string, double>>& entries);

  std::size_t rank() const noexcept { return rank_; }
  std::size_t count() const noexcept { return strengths_.size(); }

  double get(std::span<const int> bits) const;
  void set(std::span<const int> bits, double value);
  double by_index(std::size_t index) const { return strengths_.at(index); }
  void set_by_index(std::size_t index, double value);

  std::vector<int> pattern(std::size_t index) const;
  std::string pattern_string(std::size_t index) const;
  std::size_t index_of(std::span<const int> bits) const;
  std::size_t index_of(std::string_view pattern) const;

  /// kappa_{0...0}
  double kappa0() const noexcept { return strengths_.front(); }
  /// Sum of all kappa_{i*} with i* != 0.
  double kappa_hat0() const noexcept;

  bool operator==(const CouplingVector&) const = default;

 private:
  std::size_t rank_;
  std::vector<double> strengths_;
};

/// Centroid (1/N) sum T_k, accumulated in ascending member order.
ComplexTensor centroid(std::span<const ComplexTensor> members);

struct EnsembleState {
  Members members;
  double time = 0.0;

  EnsembleState() = default;
  explicit EnsembleState(Members m, double t = 0.0) : members(std::move(m)), time(t) {}

  std::size_t size() const noexcept { return members.size(); }
  const TensorShape& shape() const { return members.at(0).shape(); }
  ComplexTensor centroid() const { return lohe::centroid(members); }

  /// Throws unless N >= 1, all shapes agree and every member has unit norm.
  void validate(double tol = kUnitNormTolerance) const;
};

/// Kuramoto model with frustration induced by initial correlations:
/// amplitudes R (symmetric, unit diagonal) and frustrations alpha (skew).
struct PhaseModel {
  std::size_t n = 0;
  std::vector<double> theta;
  std::vector<double> amplitudes;    // row-major n x n
  std::vector<double> frustrations;  // row-major n x n
  double kappa1 = 0.0;

  double R(std::size_t j, std::size_t k) const { return amplitudes[j * n + k]; }
  double alpha(std::size_t j, std::size_t k) const { return frustrations[j * n + k]; }

  static constexpr double kSymmetryTolerance = 1e-12;
  void validate() const;
};

enum class ModelKind {
  LoheTensor,
  LoheHermitianSphere,
  LoheSphere,
  LoheMatrix,
  SubsystemA,
  SubsystemB,
  KuramotoFrustration,
};

std::string to_string(ModelKind kind);
std::optional<ModelKind> model_kind_from_string(std::string_view name);

// Raw vector fields. No norm validation: integrators evaluate them at RK
// stage points that sit slightly off the unit sphere. Members are processed
// in parallel with OpenMP; every member's derivative is computed by the same
// instruction sequence regardless of thread count.

/// dT_j/dt = A_j T_j + sum_{i*} kappa_{i*} coupling_term(T_j, T_c, i*).
/// `generators` is empty (zero free flow) or holds one generator per member.
Members tensor_field(std::span<const ComplexTensor> members,
                     std::span<const SkewHermitianGenerator> generators,
                     const CouplingVector& couplings);

/// Lohe hermitian sphere field; `omegas` empty means Omega_j = 0.
Members lhs_field(std::span<const ComplexTensor> members,
                  std::span<const SkewHermitianGenerator> omegas, double kappa0, double kappa1);

/// kappa0 * P_perp z_c + 2i (kappa0 + kappa1) Im<z_j, z_c> z_j.
Members projection_field(std::span<const ComplexTensor> members, double kappa0, double kappa1);

/// -i H_j U_j + (kappa/2)(U_c U_j^* U_j - U_j U_c^* U_j)
Members matrix_field(std::span<const ComplexTensor> members,
                     std::span<const ComplexTensor> hamiltonians, double kappa);

std::vector<double> kuramoto_field(const PhaseModel& model, std::span<const double> theta);

// Validated right-hand sides.

Members lohe_tensor_rhs(const EnsembleState& state,
                        std::span<const SkewHermitianGenerator> generators,
                        const CouplingVector& couplings);
Members lhs_rhs(const EnsembleState& state, std::span<const SkewHermitianGenerator> omegas,
                double kappa0, double kappa1);
Members lohe_sphere_rhs(const EnsembleState& state,
                        std::span<const SkewHermitianGenerator> omegas, double kappa0);
Members lohe_matrix_rhs(const EnsembleState& state, std::span<const ComplexTensor> hamiltonians,
                        double kappa);
Members subsystem_a_rhs(const EnsembleState& state, double kappa0);
Members subsystem_b_rhs(const EnsembleState& state, double kappa1);
Members lhs_rhs_projection_form(const EnsembleState& state, double kappa0, double kappa1);
std::vector<double> kuramoto_frustration_rhs(const PhaseModel& model);

/// R_jk = |<z_j, z_k>|, alpha_jk = arg <z_j, z_k> (0 when R_jk = 0), theta = 0.
PhaseModel build_phase_model(const EnsembleState& initial, double kappa1);

/// Lifts a d x d generator to the rank-4 generator of U -> a U on d x d matrices.
SkewHermitianGenerator left_multiplication_generator(const SkewHermitianGenerator& a);

/// Everything needed to evaluate one ensemble model.
struct ModelParams {
  ModelKind kind = ModelKind::LoheHermitianSphere;
  double kappa0 = 0.0;
  double kappa1 = 0.0;
  /// Tensor model strengths; for rank-1 models they are derived from kappa0/kappa1.
  std::optional<CouplingVector> couplings;
  /// Omega_j / A_j (matrix model: -i H_j); empty means zero free flow.
  std::vector<SkewHermitianGenerator> generators;
};

using EnsembleRhs = std::function<Members(double, const Members&)>;

/// Unchecked vector field for `params.kind` (not KuramotoFrustration).
EnsembleRhs make_ensemble_rhs(const ModelParams& params);

/// Closed-form checks on state shape for the model kind (rank, realness, unitarity).
void validate_state_for(ModelKind kind, const EnsembleState& state);

}  // namespace lohe
