#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "lohe/models.hpp"
#include "lohe/rng.hpp"

namespace testing_support {

using lohe::Complex;
using lohe::ComplexTensor;
using lohe::Members;

inline Members random_members(std::uint64_t seed, std::size_t n, std::vector<std::size_t> dims,
                              bool real_only = false) {
  lohe::CounterRng rng(seed);
  Members z;
  for (std::size_t j = 0; j < n; ++j)
    z.push_back(lohe::random_unit_tensor(rng, lohe::streams::kMembers + j, lohe::TensorShape(dims), real_only));
  return z;
}

inline double max_member_distance(const Members& a, const Members& b) {
  double worst = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, lohe::frobenius_distance(a[j], b[j]));
  return worst;
}

// Plain loops over std::complex vectors; deliberately independent of the library kernels.
inline Complex dot(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  Complex s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * b[k];
  return s;
}

inline std::vector<Complex> as_vector(const ComplexTensor& t) {
  return {t.entries().begin(), t.entries().end()};
}

}  // namespace testing_support
