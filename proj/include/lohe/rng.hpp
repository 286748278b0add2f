#pragma once

#include <cstdint>

#include "lohe/tensor.hpp"

namespace lohe {

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, counter), so parallel initialization is order independent.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const;
  /// Uniform in (0, 1).
  double uniform(std::uint64_t stream, std::uint64_t counter) const;
  /// Standard normal via Box-Muller on counters (2c, 2c+1).
  double normal(std::uint64_t stream, std::uint64_t counter) const;
  /// Standard complex Gaussian, E|z|^2 = 1.
  Complex complex_normal(std::uint64_t stream, std::uint64_t counter) const;

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

/// Stream ids partition the counter space between the consumers of one seed.
namespace streams {
inline constexpr std::uint64_t kMembers = 0;          // + member index
inline constexpr std::uint64_t kClusterCenter = 1u << 20;
inline constexpr std::uint64_t kGenerators = 2u << 20;  // + member index
inline constexpr std::uint64_t kPerturbation = 3u << 20;
inline constexpr std::uint64_t kPhases = 4u << 20;
}  // namespace streams

/// Tensor with iid complex Gaussian entries drawn from one stream.
ComplexTensor gaussian_tensor(const CounterRng& rng, std::uint64_t stream, const TensorShape& shape,
                              bool real_only = false);
/// Gaussian tensor normalized to unit Frobenius norm.
ComplexTensor random_unit_tensor(const CounterRng& rng, std::uint64_t stream,
                                 const TensorShape& shape, bool real_only = false);
/// scale * (G - G^*) / 2 with G Gaussian on the doubled shape.
SkewHermitianGenerator random_skew_hermitian(const CounterRng& rng, std::uint64_t stream,
                                             const TensorShape& base, double scale,
                                             bool real_only = false);

}  // namespace lohe
