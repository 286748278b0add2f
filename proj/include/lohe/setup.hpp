#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lohe/integrate.hpp"
#include "lohe/models.hpp"
#include "lohe/rng.hpp"

namespace lohe {

enum class InitialKind { Random, Clustered, Explicit };

/// Clustered data is z_j = normalize(z* + sigma g_j) with sigma found by
/// bisection so that exactly one of the targets is met.
struct InitialSpec {
  InitialKind kind = InitialKind::Random;
  std::optional<double> lambda_target;    // lambda_M(0) = max |1 - h_ij|
  std::optional<double> rho_target;       // ||z_c||
  std::optional<double> diameter_target;  // max ||T_i - T_j||_F
  bool real_only = false;
  Members explicit_members;
  bool operator==(const InitialSpec&) const = default;
};

enum class GeneratorKind { Zero, RandomSkewHermitian, Explicit };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Zero;
  double scale = 1.0;
  /// One shared generator for every member.
  bool homogeneous = false;
  bool real_only = false;
  /// Rescale a random ensemble so its pairwise diameter equals this value.
  std::optional<double> diameter_target;
  std::vector<ComplexTensor> explicit_entries;
  bool operator==(const GeneratorSpec&) const = default;
};

/// Everything that determines one ensemble run.
struct SystemSpec {
  ModelKind model = ModelKind::LoheHermitianSphere;
  std::size_t n = 2;
  std::vector<std::size_t> dims{1};
  double kappa0 = 1.0;
  double kappa1 = 0.0;
  /// Tensor-model strengths; rank-1 models derive them from kappa0/kappa1.
  std::optional<CouplingVector> couplings;
  GeneratorSpec generators;
  InitialSpec initial;
  std::uint64_t seed = 0;
  IntegratorConfig integrator;

  TensorShape shape() const { return TensorShape(dims); }
  /// Shape the generators act on (C^d for the matrix model).
  TensorShape generator_base() const;
  CouplingVector effective_couplings() const;
  bool operator==(const SystemSpec&) const = default;
};

/// Deterministic per (spec, seed); every member has unit Frobenius norm.
Members seeded_initial(const InitialSpec& spec, std::size_t n, const TensorShape& shape,
                       std::uint64_t seed, ModelKind model = ModelKind::LoheHermitianSphere);

/// normalize(z* + sigma g_j) with z* and g_j drawn from fixed streams.
Members clustered_members(const CounterRng& rng, std::size_t n, const TensorShape& shape,
                          double sigma, bool real_only);

std::vector<SkewHermitianGenerator> seeded_generators(const GeneratorSpec& spec, std::size_t n,
                                                      const TensorShape& base, std::uint64_t seed);

/// Haar-like random unitary exp(A) with A a random skew-hermitian d x d matrix.
ComplexTensor random_unitary(const CounterRng& rng, std::uint64_t stream, std::size_t d);

struct BuiltSystem {
  ModelParams params;
  Members initial;
};

/// Validates the spec and materializes generators and initial data.
BuiltSystem build_system(const SystemSpec& spec);

}  // namespace lohe
