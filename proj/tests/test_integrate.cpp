#include <omp.h>

#include <cmath>
#include <limits>

#include "doctest.h"
#include "lohe/integrate.hpp"
#include "lohe/models.hpp"
#include "support.hpp"

using namespace lohe;
using testing_support::max_member_distance;
using testing_support::random_members;

namespace {

using Vec = std::vector<double>;

Rhs<Vec> linear(double lambda) {
  return [lambda](double, const Vec& y) {
    Vec d(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) d[k] = lambda * y[k];
    return d;
  };
}

Rhs<Members> rotation() {
  return [](double, const Members& z) {
    Members d = z;
    for (auto& m : d) m *= Complex(0.0, 1.0);
    return d;
  };
}

IntegratorConfig rk4(double dt, double t_end, double sample_every) {
  IntegratorConfig c;
  c.dt = dt;
  c.t_end = t_end;
  c.sample_every = sample_every;
  return c;
}

}  // namespace

TEST_CASE("RK4 step") {
  SUBCASE("zero right-hand side leaves the state unchanged") {
    const Vec y{1.0, -2.0, 3.5};
    CHECK(step_rk4<Vec>(linear(0.0), y, 0.1) == y);
  }
  SUBCASE("one step of y' = y is the degree-4 Taylor polynomial") {
    const double h = 0.1;
    const double taylor = 1.0 + h + h * h / 2 + h * h * h / 6 + h * h * h * h / 24;
    const double y1 = step_rk4<Vec>(linear(1.0), {1.0}, h)[0];
    CHECK(std::abs(y1 - taylor) < 1e-15);
    CHECK(std::abs(y1 - std::exp(h)) <= 1e-7);
  }
  SUBCASE("global error is fourth order") {
    auto err = [](double dt) {
      const auto tr = integrate<Vec>(linear(-1.5), {1.0}, rk4(dt, 2.0, 2.0));
      return std::abs(tr.states.back()[0] - std::exp(-3.0));
    };
    const double ratio = err(0.04) / err(0.02);
    CHECK(ratio == doctest::Approx(16.0).epsilon(0.05));
  }
  SUBCASE("non-finite derivative is a fault with a time stamp") {
    Rhs<Vec> bad = [](double, const Vec&) { return Vec{std::numeric_limits<double>::quiet_NaN()}; };
    CHECK_THROWS_AS(step_rk4<Vec>(bad, {1.0}, 0.1, 2.5), IntegrationError);
  }
}

TEST_CASE("planar rotation keeps unit modulus") {
  const Members z{ComplexTensor::vector({1.0})};
  const auto tr = integrate<Members>(rotation(), z, rk4(1e-3, 1.0, 0.1));
  CHECK(tr.size() == 11);
  CHECK(tr.max_norm_drift() <= 1e-12);
  CHECK(std::abs(tr.states.back()[0][0] - std::polar(1.0, 1.0)) < 1e-12);
}

TEST_CASE("fixed-step sampling") {
  const auto tr = integrate<Vec>(linear(-1.0), {1.0}, rk4(0.01, 1.0, 0.25));
  REQUIRE(tr.size() == 5);
  CHECK(tr.times[0] == 0.0);
  CHECK(tr.states[0][0] == 1.0);
  for (std::size_t k = 1; k < tr.size(); ++k) CHECK(tr.times[k] == doctest::Approx(0.25 * k).epsilon(1e-14));
  CHECK(tr.step_sizes.size() == 100);
}

TEST_CASE("configuration validation") {
  CHECK_THROWS_AS(rk4(0.0, 1.0, 0.1).validate(), InvalidInput);
  CHECK_THROWS_AS(rk4(2.0, 1.0, 2.0).validate(), InvalidInput);
  CHECK_THROWS_AS(rk4(0.3, 1.0, 0.3).validate(), InvalidInput);
  CHECK_THROWS_AS(rk4(0.01, 1.0, 0.015).validate(), InvalidInput);
  auto c = rk4(0.01, 1.0, 0.1);
  c.renormalize = {true, 0.0};
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c = rk4(0.01, 1.0, 0.1);
  c.method = Method::RK45;
  c.rtol = -1.0;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
}

TEST_CASE("RK45 lands samples without interpolation and agrees with RK4") {
  IntegratorConfig c = rk4(1e-2, 3.0, 0.3);
  c.method = Method::RK45;
  c.rtol = 1e-10;
  c.atol = 1e-12;
  const auto tr = integrate<Vec>(linear(-0.8), {2.0}, c);
  REQUIRE(tr.size() == 11);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    CHECK(tr.times[k] == doctest::Approx(0.3 * k).epsilon(1e-12));
    CHECK(std::abs(tr.states[k][0] - 2.0 * std::exp(-0.8 * tr.times[k])) < 1e-9);
  }
  double t = 0.0;
  for (double h : tr.step_sizes) t += h;
  CHECK(t == doctest::Approx(3.0).epsilon(1e-12));
  const auto fixed = integrate<Vec>(linear(-0.8), {2.0}, rk4(1e-3, 3.0, 0.3));
  CHECK(std::abs(fixed.states.back()[0] - tr.states.back()[0]) <= 10 * std::max(c.rtol, c.atol) * c.t_end);
}

TEST_CASE("identical ensemble is an equilibrium of the LHS flow") {
  const auto one = random_members(3, 1, {3})[0];
  const Members z(5, one);
  ModelParams p;
  p.kappa0 = 1.0;
  p.kappa1 = 0.4;
  const auto tr = integrate<Members>(make_ensemble_rhs(p), z, rk4(1e-2, 1.0, 0.5));
  for (const auto& s : tr.states) CHECK(max_member_distance(s, z) == 0.0);
}

TEST_CASE("subsystem A conserves norms and RK4 matches RK45") {
  const auto z = random_members(17, 8, {3});
  ModelParams p;
  p.kind = ModelKind::SubsystemA;
  p.kappa0 = 1.0;
  const auto f = make_ensemble_rhs(p);
  const auto a = integrate<Members>(f, z, rk4(1e-3, 20.0, 0.5));
  CHECK(a.max_norm_drift() <= 1e-8);
  IntegratorConfig c = rk4(1e-2, 20.0, 0.5);
  c.method = Method::RK45;
  const auto b = integrate<Members>(f, z, c);
  CHECK(max_member_distance(a.states.back(), b.states.back()) <= 1e-6);
  CHECK(b.max_norm_drift() <= 1e-8);
}

TEST_CASE("integration fault carries the partial trajectory") {
  Rhs<Vec> f = [](double t, const Vec& y) {
    return Vec{t > 0.5 ? std::numeric_limits<double>::infinity() : -y[0]};
  };
  try {
    integrate<Vec>(f, {1.0}, rk4(0.01, 1.0, 0.1));
    FAIL("expected a fault");
  } catch (const IntegrationFault<Vec>& e) {
    CHECK(e.time() == doctest::Approx(0.5).epsilon(0.05));
    REQUIRE(e.partial().size() == 6);
    CHECK(e.partial().times.back() == doctest::Approx(0.5));
  }
}

TEST_CASE("on-drift renormalization rescales members and logs the event") {
  Rhs<Members> grow = [](double, const Members& z) {
    Members d = z;
    for (auto& m : d) m *= 0.05;
    return d;
  };
  const auto z = random_members(5, 3, {2});
  IntegratorConfig c = rk4(1e-3, 1.0, 0.1);
  const auto off = integrate<Members>(grow, z, c);
  CHECK(off.max_norm_drift() > 0.04);
  CHECK(off.renormalization_times.empty());
  c.renormalize = {true, 1e-4};
  const auto on = integrate<Members>(grow, z, c);
  CHECK(on.max_norm_drift() <= 1e-4);
  CHECK(on.renormalization_times.size() > 10);
}

TEST_CASE("paired integration shares the time grid") {
  const auto z = random_members(7, 5, {2});
  auto w = z;
  w[0] = random_members(8, 1, {2})[0];
  ModelParams p;
  p.kind = ModelKind::SubsystemA;
  p.kappa0 = 1.0;
  IntegratorConfig c = rk4(1e-2, 2.0, 0.5);
  c.method = Method::RK45;
  const auto [a, b] = integrate_pair<Members>(make_ensemble_rhs(p), z, w, c);
  CHECK(a.times == b.times);
  CHECK(a.step_sizes == b.step_sizes);
  const auto [x, y] = integrate_pair<Members>(make_ensemble_rhs(p), z, z, c);
  CHECK(x.states == y.states);
}

TEST_CASE("trajectories are identical for 1 and 4 threads") {
  const auto z = random_members(9, 16, {4});
  ModelParams p;
  p.kappa0 = 1.0;
  p.kappa1 = 0.3;
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto a = integrate<Members>(make_ensemble_rhs(p), z, rk4(1e-3, 1.0, 0.1));
  omp_set_num_threads(4);
  const auto b = integrate<Members>(make_ensemble_rhs(p), z, rk4(1e-3, 1.0, 0.1));
  omp_set_num_threads(saved);
  CHECK(a.states == b.states);
  CHECK(a.times == b.times);
}

TEST_CASE("observer sees every sample") {
  std::vector<double> seen;
  Observer<Vec> obs = [&](double t, const Vec&) { seen.push_back(t); };
  const auto tr = integrate<Vec>(linear(1.0), {1.0}, rk4(0.1, 1.0, 0.2), obs);
  CHECK(seen == tr.times);
}
