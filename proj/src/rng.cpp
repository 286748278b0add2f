#include "lohe/rng.hpp"

#include <cmath>
#include <numbers>

namespace lohe {

namespace {
constexpr std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}
}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t stream, std::uint64_t counter) const {
  return splitmix(splitmix(splitmix(seed_) ^ stream) ^ counter);
}

double CounterRng::uniform(std::uint64_t stream, std::uint64_t counter) const {
  // 53 random bits, shifted off zero
  return (double(bits(stream, counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t stream, std::uint64_t counter) const {
  const double u1 = uniform(stream, 2 * counter);
  const double u2 = uniform(stream, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Complex CounterRng::complex_normal(std::uint64_t stream, std::uint64_t counter) const {
  return {normal(stream, 2 * counter) * std::numbers::sqrt2 / 2.0,
          normal(stream, 2 * counter + 1) * std::numbers::sqrt2 / 2.0};
}

ComplexTensor gaussian_tensor(const CounterRng& rng, std::uint64_t stream, const TensorShape& shape,
                              bool real_only) {
  ComplexTensor t(shape);
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = real_only ? Complex(rng.normal(stream, i), 0.0) : rng.complex_normal(stream, i);
  return t;
}

ComplexTensor random_unit_tensor(const CounterRng& rng, std::uint64_t stream,
                                 const TensorShape& shape, bool real_only) {
  ComplexTensor t = gaussian_tensor(rng, stream, shape, real_only);
  t *= 1.0 / frobenius_norm(t);
  return t;
}

SkewHermitianGenerator random_skew_hermitian(const CounterRng& rng, std::uint64_t stream,
                                             const TensorShape& base, double scale,
                                             bool real_only) {
  ComplexTensor g = gaussian_tensor(rng, stream, base.doubled(), real_only);
  const std::size_t n = base.size();
  ComplexTensor a(base.doubled());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a[i * n + j] = 0.5 * scale * (g[i * n + j] - std::conj(g[j * n + i]));
  return SkewHermitianGenerator(base, std::move(a));
}

}  // namespace lohe
