#include <omp.h>

#include <cmath>

#include "doctest.h"
#include "lohe/models.hpp"
#include "lohe/observe.hpp"
#include "lohe/reference.hpp"
#include "lohe/rng.hpp"
#include "support.hpp"

using namespace lohe;
using testing_support::as_vector;
using testing_support::dot;
using testing_support::max_member_distance;
using testing_support::random_members;

namespace {

// LHS right-hand side from plain complex vectors, Omega = 0.
std::vector<std::vector<Complex>> lhs_oracle(const Members& z, double k0, double k1) {
  const std::size_t n = z.size(), d = z[0].size();
  std::vector<Complex> zc(d, 0.0);
  for (const auto& m : z)
    for (std::size_t a = 0; a < d; ++a) zc[a] += m[a] / double(n);
  std::vector<std::vector<Complex>> out;
  for (const auto& m : z) {
    const auto v = as_vector(m);
    const Complex zz = dot(v, v), cz = dot(zc, v), zcz = dot(v, zc);
    std::vector<Complex> f(d);
    for (std::size_t a = 0; a < d; ++a) f[a] = k0 * (zz * zc[a] - cz * v[a]) + k1 * (zcz - cz) * v[a];
    out.push_back(f);
  }
  return out;
}

double max_abs_diff(const Members& a, const Members& b) {
  double w = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j)
    for (std::size_t k = 0; k < a[j].size(); ++k) w = std::max(w, std::abs(a[j][k] - b[j][k]));
  return w;
}

Members sum(Members a, const Members& b) {
  for (std::size_t j = 0; j < a.size(); ++j) a[j] += b[j];
  return a;
}

std::vector<Complex> correlations_of(const Members& z) { return lohe::correlations(z).h; }

PhaseModel random_phase_model(std::uint64_t seed, std::size_t n, double k1) {
  const auto z = random_members(seed, n, {3});
  PhaseModel m = build_phase_model(EnsembleState(z), k1);
  CounterRng rng(seed);
  for (std::size_t j = 0; j < n; ++j) m.theta[j] = 6.0 * rng.uniform(streams::kPhases, j) - 3.0;
  return m;
}

}  // namespace

TEST_CASE("coupling vector patterns") {
  auto c = CouplingVector::from_patterns(2, {{"00", 1.0}, {"10", 0.25}, {"11", 0.5}});
  CHECK(c.count() == 4);
  CHECK(c.kappa0() == 1.0);
  CHECK(c.kappa_hat0() == doctest::Approx(0.75));
  CHECK(c.pattern_string(2) == "10");
  const int bits[] = {1, 0};
  CHECK(c.get(bits) == 0.25);
  CHECK(c.index_of("01") == 1);
  CHECK_THROWS_AS(CouplingVector::from_patterns(2, {{"0x", 1.0}}), InvalidInput);
  CHECK_THROWS_AS(CouplingVector::from_patterns(1, {{"0", -1.0}}), InvalidInput);
  auto r1 = CouplingVector::rank1(2.0, 0.5);
  CHECK(r1.by_index(0) == 2.0);
  CHECK(r1.by_index(1) == 0.5);
}

TEST_CASE("model names round-trip") {
  for (auto k : {ModelKind::LoheTensor, ModelKind::LoheHermitianSphere, ModelKind::LoheSphere, ModelKind::LoheMatrix,
                 ModelKind::SubsystemA, ModelKind::SubsystemB, ModelKind::KuramotoFrustration})
    CHECK(model_kind_from_string(to_string(k)) == k);
  CHECK_FALSE(model_kind_from_string("Kuramoto").has_value());
}

TEST_CASE("LHS field matches a direct evaluation") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto z = random_members(seed, 7, {4});
    const auto want = lhs_oracle(z, 1.3, 0.4);
    const auto got = lhs_rhs(EnsembleState(z), {}, 1.3, 0.4);
    for (std::size_t j = 0; j < z.size(); ++j)
      for (std::size_t a = 0; a < 4; ++a) CHECK(std::abs(got[j][a] - want[j][a]) < 1e-14);
  }
}

TEST_CASE("LHS splits into subsystem A plus subsystem B") {
  const EnsembleState s(random_members(11, 6, {3}));
  CHECK(max_abs_diff(lhs_rhs(s, {}, 0.7, 0.3), sum(subsystem_a_rhs(s, 0.7), subsystem_b_rhs(s, 0.3))) < 1e-15);
  const EnsembleState real(random_members(12, 6, {3}, true));
  for (const auto& f : subsystem_b_rhs(real, 1.0))
    for (auto x : f.entries()) CHECK(x == Complex(0.0));
}

TEST_CASE("every field is tangent to the unit spheres") {
  const auto z = random_members(4, 5, {3});
  CounterRng rng(4);
  std::vector<SkewHermitianGenerator> om;
  for (std::size_t j = 0; j < 5; ++j) om.push_back(random_skew_hermitian(rng, streams::kGenerators + j, TensorShape({3}), 1.0));
  const auto f = lhs_rhs(EnsembleState(z), om, 1.0, 0.6);
  for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(frobenius_inner(z[j], f[j]).real()) < 1e-15);

  const auto t = random_members(5, 4, {2, 2});
  const auto c = CouplingVector::from_patterns(2, {{"00", 1.0}, {"01", 0.1}, {"10", 0.2}, {"11", 0.3}});
  const auto ft = lohe_tensor_rhs(EnsembleState(t), {}, c);
  for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(frobenius_inner(t[j], ft[j]).real()) < 1e-15);
}

TEST_CASE("parallel kernels are thread-count independent and match the serial reference") {
  const int saved = omp_get_max_threads();
  const auto z = random_members(21, 40, {6});
  const auto t = random_members(22, 24, {3, 3});
  CounterRng rng(23);
  std::vector<SkewHermitianGenerator> om, ot;
  for (std::size_t j = 0; j < 40; ++j) om.push_back(random_skew_hermitian(rng, streams::kGenerators + j, TensorShape({6}), 1.0));
  for (std::size_t j = 0; j < 24; ++j) ot.push_back(random_skew_hermitian(rng, streams::kGenerators + 100 + j, TensorShape({3, 3}), 1.0));
  const auto c = CouplingVector::from_patterns(2, {{"00", 1.0}, {"01", 0.1}, {"10", 0.2}, {"11", 0.3}});
  const auto pm = random_phase_model(24, 64, 0.8);

  omp_set_num_threads(1);
  const auto lhs1 = lhs_field(z, om, 1.0, 0.3);
  const auto t1 = tensor_field(t, ot, c);
  const auto k1 = kuramoto_field(pm, pm.theta);
  omp_set_num_threads(4);
  CHECK(lhs_field(z, om, 1.0, 0.3) == lhs1);
  CHECK(tensor_field(t, ot, c) == t1);
  CHECK(kuramoto_field(pm, pm.theta) == k1);

  CHECK(max_abs_diff(lhs1, reference::lhs_field(z, om, 1.0, 0.3)) < 1e-14);
  CHECK(max_abs_diff(t1, reference::tensor_field(t, ot, c)) < 1e-14);
  const auto rk = reference::kuramoto_field(pm, pm.theta);
  for (std::size_t j = 0; j < rk.size(); ++j) CHECK(std::abs(rk[j] - k1[j]) < 1e-14);
  const auto corr = correlations_of(z);
  const auto rh = reference::correlations(z);
  for (std::size_t k = 0; k < rh.size(); ++k) CHECK(std::abs(rh[k] - corr[k]) < 1e-15);
  omp_set_num_threads(saved);
}

TEST_CASE("rank-1 tensor model is the LHS model") {
  const auto z = random_members(31, 6, {3});
  CounterRng rng(31);
  std::vector<SkewHermitianGenerator> om;
  for (std::size_t j = 0; j < 6; ++j) om.push_back(random_skew_hermitian(rng, streams::kGenerators + j, TensorShape({3}), 1.0));
  const EnsembleState s(z);
  CHECK(max_abs_diff(lohe_tensor_rhs(s, om, CouplingVector::rank1(1.0, 0.25)), lhs_rhs(s, om, 1.0, 0.25)) < 1e-15);
}

TEST_CASE("projection form agrees with the LHS field") {
  const EnsembleState s(random_members(41, 8, {3}));
  CHECK(max_abs_diff(lhs_rhs(s, {}, 1.0, 0.2), lhs_rhs_projection_form(s, 1.0, 0.2)) < 1e-14);
}

TEST_CASE("left multiplication generator acts as U -> A U") {
  CounterRng rng(51);
  const auto a = random_skew_hermitian(rng, 0, TensorShape({3}), 1.0);
  const auto lifted = left_multiplication_generator(a);
  const auto u = gaussian_tensor(rng, 1, TensorShape({3, 3}));
  const auto want = matmul(ComplexTensor::matrix(3, 3, as_vector(a.tensor())), u);
  const auto got = apply_generator(lifted, u);
  for (std::size_t k = 0; k < 9; ++k) CHECK(std::abs(got[k] - want[k]) < 1e-15);
}

TEST_CASE("validated right-hand sides reject bad states") {
  Members z = random_members(61, 3, {2});
  z[1] *= 1.1;
  CHECK_THROWS_AS(lhs_rhs(EnsembleState(z), {}, 1.0, 0.0), InvalidInput);
  Members mixed = random_members(62, 2, {2});
  mixed.push_back(random_members(63, 1, {3})[0]);
  CHECK_THROWS_AS(lhs_rhs(EnsembleState(mixed), {}, 1.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(lohe_sphere_rhs(EnsembleState(random_members(64, 3, {2})), {}, 1.0), InvalidInput);
  CHECK_THROWS_AS(lhs_rhs(EnsembleState(Members{}), {}, 1.0, 0.0), InvalidInput);
}

TEST_CASE("phase model built from initial correlations") {
  const auto z = random_members(71, 5, {2});
  const auto pm = build_phase_model(EnsembleState(z), 0.5);
  CHECK(pm.n == 5);
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(pm.theta[j] == 0.0);
    CHECK(pm.R(j, j) == doctest::Approx(1.0));
    for (std::size_t k = 0; k < 5; ++k) {
      CHECK(pm.R(j, k) == pm.R(k, j));
      CHECK(pm.alpha(j, k) == -pm.alpha(k, j));
      CHECK(pm.R(j, k) == doctest::Approx(std::abs(frobenius_inner(z[j], z[k]))));
    }
  }
  PhaseModel bad = pm;
  bad.amplitudes[1] += 0.1;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("Kuramoto field matches the defining sum") {
  const auto pm = random_phase_model(81, 6, 0.9);
  const auto f = kuramoto_frustration_rhs(pm);
  for (std::size_t j = 0; j < 6; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < 6; ++k) s += pm.R(j, k) * std::sin(pm.theta[k] - pm.theta[j] + pm.alpha(j, k));
    CHECK(f[j] == doctest::Approx(2.0 * 0.9 / 6 * s).epsilon(1e-13));
  }
}

TEST_CASE("matrix model rejects non-square members") {
  const auto u = random_members(91, 3, {2, 3});
  CHECK_THROWS_AS(matrix_field(u, {}, 1.0), InvalidInput);
}
