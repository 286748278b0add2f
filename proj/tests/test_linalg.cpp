#include <cmath>
#include <numbers>

#include "doctest.h"
#include "lohe/rng.hpp"
#include "lohe/tensor.hpp"
#include "support.hpp"

using namespace lohe;
using testing_support::as_vector;
using testing_support::dot;

namespace {

// exp(tA) by a long Taylor series; fine for ||tA|| of order one.
ComplexTensor taylor_exp(const SkewHermitianGenerator& a, double t) {
  const std::size_t d = a.base_shape().size();
  ComplexTensor m = ComplexTensor::matrix(d, d, std::vector<Complex>(a.tensor().entries().begin(),
                                                                      a.tensor().entries().end()));
  m *= t;
  ComplexTensor sum = ComplexTensor::identity(d), term = ComplexTensor::identity(d);
  for (int k = 1; k < 60; ++k) {
    term = matmul(term, m);
    term *= 1.0 / k;
    sum += term;
  }
  return sum;
}

double max_abs_diff(const ComplexTensor& a, const ComplexTensor& b) {
  double w = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) w = std::max(w, std::abs(a[k] - b[k]));
  return w;
}

}  // namespace

TEST_CASE("shape ravel and unravel are inverse") {
  TensorShape s({2, 3, 4});
  CHECK(s.size() == 24);
  CHECK(s.doubled() == TensorShape({2, 3, 4, 2, 3, 4}));
  std::size_t digits[3];
  for (std::size_t f = 0; f < s.size(); ++f) {
    s.unravel(f, digits);
    CHECK(s.ravel(digits) == f);
  }
  s.unravel(23, digits);
  CHECK(digits[0] == 1);
  CHECK(digits[1] == 2);
  CHECK(digits[2] == 3);
  CHECK_THROWS_AS(TensorShape({2, 0}), InvalidInput);
}

TEST_CASE("frobenius inner product conjugates the first slot") {
  auto a = ComplexTensor::vector({{0, 1}, {1, 0}});
  auto b = ComplexTensor::vector({{1, 0}, {0, 0}});
  CHECK(frobenius_inner(a, b) == Complex(0, -1));
  CHECK(frobenius_norm_sq(a) == doctest::Approx(2.0));
  CHECK(frobenius_distance(a, b) == doctest::Approx(std::sqrt(3.0)));
  CHECK_THROWS_AS(frobenius_inner(a, ComplexTensor::vector({1.0})), InvalidInput);
}

TEST_CASE("skew-hermitian check") {
  auto ok = ComplexTensor::matrix(2, 2, {{0, 1}, {2, 1}, {-2, 1}, {0, -3}});
  CHECK(check_skew_hermitian(ok, 1e-14));
  auto bad = ComplexTensor::matrix(2, 2, {{1, 0}, {0, 0}, {0, 0}, {0, 0}});
  CHECK_FALSE(check_skew_hermitian(bad, 1e-14));
  CHECK_THROWS_AS(SkewHermitianGenerator(TensorShape({2}), bad), InvalidInput);
  CHECK_THROWS_AS(check_skew_hermitian(ComplexTensor::vector({1.0, 2.0}), 1e-12), InvalidInput);
}

TEST_CASE("rank-1 coupling terms match the inner-product formulas") {
  CounterRng rng(5);
  const TensorShape s({3});
  const auto z = random_unit_tensor(rng, 0, s), zc = gaussian_tensor(rng, 1, s);
  const auto vz = as_vector(z), vc = as_vector(zc);
  const int p0[] = {0}, p1[] = {1};
  const auto t0 = coupling_term(z, zc, p0), t1 = coupling_term(z, zc, p1);
  const Complex zz = dot(vz, vz), cz = dot(vc, vz), zcz = dot(vz, vc);
  for (std::size_t a = 0; a < 3; ++a) {
    CHECK(std::abs(t0[a] - (zz * vc[a] - cz * vz[a])) < 1e-14);
    CHECK(std::abs(t1[a] - (zcz - cz) * vz[a]) < 1e-14);
  }
}

TEST_CASE("rank-2 coupling terms as matrix products") {
  CounterRng rng(8);
  const std::size_t d = 3;
  const TensorShape s({d, d});
  const auto u = gaussian_tensor(rng, 0, s), uc = gaussian_tensor(rng, 1, s);
  SUBCASE("(0,0) contracts both indices") {
    const int p[] = {0, 0};
    ComplexTensor want = frobenius_norm_sq(u) * uc;
    want.add_scaled(-frobenius_inner(uc, u), u);
    CHECK(max_abs_diff(coupling_term(u, uc, p), want) < 1e-13);
  }
  SUBCASE("(1,0) is U U^* U_c - U U_c^* U") {
    const int p[] = {1, 0};
    const auto want = matmul(matmul(u, adjoint(u)), uc) - matmul(matmul(u, adjoint(uc)), u);
    CHECK(max_abs_diff(coupling_term(u, uc, p), want) < 1e-13);
  }
}

TEST_CASE("generator application is a matrix-vector product for m = 1") {
  CounterRng rng(2);
  const auto a = random_skew_hermitian(rng, 0, TensorShape({3}), 1.0);
  const auto v = gaussian_tensor(rng, 1, TensorShape({3}));
  const auto got = apply_generator(a, v);
  for (std::size_t i = 0; i < 3; ++i) {
    Complex s = 0.0;
    for (std::size_t j = 0; j < 3; ++j) s += a(i, j) * v[j];
    CHECK(std::abs(got[i] - s) < 1e-15);
  }
}

TEST_CASE("matrix exponential") {
  SUBCASE("planar rotation") {
    SkewHermitianGenerator om(TensorShape({2}), ComplexTensor::matrix(2, 2, {0.0, 1.0, -1.0, 0.0}));
    for (double t : {0.0, 0.3, 1.0, std::numbers::pi, 17.5}) {
      const auto e = matrix_exp(om, t);
      CHECK(std::abs(e.at(0, 0) - std::cos(t)) < 1e-13);
      CHECK(std::abs(e.at(0, 1) - std::sin(t)) < 1e-13);
      CHECK(std::abs(e.at(1, 0) + std::sin(t)) < 1e-13);
      CHECK(std::abs(e.at(1, 1) - std::cos(t)) < 1e-13);
    }
  }
  SUBCASE("matches a Taylor series and is unitary") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      CounterRng rng(seed);
      const auto a = random_skew_hermitian(rng, 0, TensorShape({4}), 0.7);
      const auto e = matrix_exp(a, 1.3);
      CHECK(max_abs_diff(e, taylor_exp(a, 1.3)) < 1e-12);
      CHECK(max_abs_diff(matmul(adjoint(e), e), ComplexTensor::identity(4)) < 1e-13);
      CHECK(max_abs_diff(matmul(matrix_exp(a, 0.4), matrix_exp(a, 0.9)), e) < 1e-13);
    }
  }
}

TEST_CASE("dense helpers") {
  auto a = ComplexTensor::matrix(2, 2, {{1, 1}, {2, 0}, {0, -1}, {3, 0}});
  CHECK(trace(a) == Complex(4, 1));
  auto b = ComplexTensor::matrix(2, 1, {{1, 0}, {0, 2}});
  auto x = solve(a, b);
  CHECK(max_abs_diff(matmul(a, x), b) < 1e-14);
  CHECK_THROWS_AS(solve(ComplexTensor::matrix(2, 2, {1.0, 2.0, 2.0, 4.0}), b), InvalidInput);
  CHECK(adjoint(a).at(0, 1) == Complex(0, 1));
}

TEST_CASE("counter RNG is a pure function of (seed, stream, counter)") {
  CounterRng a(42), b(42), c(43);
  CHECK(a.bits(3, 7) == b.bits(3, 7));
  CHECK(a.bits(3, 7) != c.bits(3, 7));
  CHECK(a.bits(3, 7) != a.bits(4, 7));
  double mean = 0.0, var = 0.0;
  bool in_range = true;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double u = a.uniform(1, k);
    in_range = in_range && u > 0.0 && u < 1.0;
    const double g = a.normal(2, k);
    mean += g;
    var += g * g;
  }
  mean /= n;
  var = var / n - mean * mean;
  CHECK(in_range);
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("random tensors") {
  CounterRng rng(9);
  const auto u = random_unit_tensor(rng, 0, TensorShape({2, 3}));
  CHECK(frobenius_norm(u) == doctest::Approx(1.0).epsilon(1e-15));
  const auto r = random_unit_tensor(rng, 0, TensorShape({4}), true);
  for (auto x : r.entries()) CHECK(x.imag() == 0.0);
  const auto a = random_skew_hermitian(rng, 1, TensorShape({2, 2}), 2.0);
  CHECK(check_skew_hermitian(a.tensor(), 1e-15));
  CHECK(a.tensor().shape() == TensorShape({2, 2, 2, 2}));
}
