#include <cmath>

#include "doctest.h"
#include "lohe/verify.hpp"
#include "support.hpp"

using namespace lohe;

namespace {

const Check* find_check(const VerificationReport& r, const std::string& prefix) {
  for (const auto& c : r.checks)
    if (c.name.rfind(prefix, 0) == 0) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("theorem ids round-trip") {
  for (auto id : all_theorems()) CHECK(theorem_from_string(to_string(id)) == id);
  CHECK(all_theorems().size() == 16);
  CHECK_FALSE(theorem_from_string("T9.9").has_value());
  CHECK(to_string(Verdict::HypothesisNotMet) == "hypothesis-not-met");
}

TEST_CASE("eta is the largest root of its quadratic") {
  const double k0 = 1.0, kh = 0.015, tc = 0.9, da = 0.01;
  const auto eta = eta_root(k0, kh, tc, da);
  REQUIRE(eta.has_value());
  const double b = k0 - 4.0 * kh * tc * tc;
  CHECK(2.0 * k0 * *eta * *eta - b * *eta + da == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  const double other = b / (2.0 * k0) - *eta;  // roots sum to b / (2 k0)
  CHECK(*eta >= other);
  CHECK(eta_root(1.0, 0.015, 0.9, 1.0) == std::nullopt);
  CHECK(*eta_root(1.0, 0.0, 1.0, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("report finalization") {
  VerificationReport r;
  r.add_check("a", 1.0, "<=", 2.0);
  r.add_check("b", 0.5, "in", 0.0, 1.0);
  r.finalize();
  CHECK(r.verdict == Verdict::Pass);
  r.add_check("c", 3.0, "<", 3.0);
  r.finalize();
  CHECK(r.verdict == Verdict::Fail);
  CHECK_FALSE(r.checks.back().passed);
}

TEST_CASE("gate violation is reported, not thrown") {
  auto sc = reference_scenario(TheoremId::T3_1);
  sc.system.initial.lambda_target = 0.7;
  const auto r = run_scenario(sc);
  CHECK(r.verdict == Verdict::HypothesisNotMet);
  CHECK(r.hypothesis.lambda0 == doctest::Approx(0.7).epsilon(0.02));
  CHECK_FALSE(r.hypothesis.gates_passed());

  auto t41 = reference_scenario(TheoremId::T4_1);
  t41.system.kappa1 = t41.system.kappa0;
  CHECK(run_scenario(t41).verdict == Verdict::HypothesisNotMet);
}

TEST_CASE("T3.1 sub-report on an identical ensemble passes vacuously") {
  const auto one = testing_support::random_members(1, 1, {3})[0];
  Trajectory<Members> tr;
  for (int k = 0; k < 20; ++k) {
    tr.times.push_back(0.1 * k);
    tr.states.push_back(Members(4, one));
  }
  VerificationReport r;
  check_T31(tr, 1.0, VerifyOptions{}, r);
  r.finalize();
  CHECK(r.verdict == Verdict::Pass);
}

TEST_CASE("reference runs") {
  SUBCASE("L2.1 norm drift") {
    const auto r = run_scenario(reference_scenario(TheoremId::L2_1));
    CHECK(r.verdict == Verdict::Pass);
    CHECK(r.measured.at("max_norm_drift") <= 1e-8);
  }
  SUBCASE("P3.1 cross-ratio drift") {
    const auto r = run_scenario(reference_scenario(TheoremId::P3_1));
    CHECK(r.verdict == Verdict::Pass);
    CHECK(r.measured.at("max_cross_ratio_drift") <= 1e-6);
  }
  SUBCASE("T3.1 rate and bound") {
    const auto r = run_scenario(reference_scenario(TheoremId::T3_1));
    CHECK(r.verdict == Verdict::Pass);
    CHECK(r.measured.at("fitted_rate") >= 0.4);
    REQUIRE(find_check(r, "max |1-h_ij(t)|"));
    CHECK(find_check(r, "max |1-h_ij(t)|")->passed);
  }
  SUBCASE("D1 reduction chain") {
    auto sc = reference_scenario(TheoremId::D1Reduction);
    sc.options.reduction_samples = 10;
    const auto r = run_scenario(sc);
    CHECK(r.verdict == Verdict::Pass);
  }
}

TEST_CASE("real initial data makes subsystem B trivial") {
  auto sc = reference_scenario(TheoremId::T3_2);
  sc.system.initial.real_only = true;
  sc.system.integrator.t_end = 1.0;
  const auto r = run_scenario(sc);
  CHECK(r.verdict == Verdict::Pass);
  CHECK(r.measured.at("max_phase_orbit_residual") <= 1e-15);
}

TEST_CASE("ensemble distance and perturbation") {
  const auto z = testing_support::random_members(2, 4, {2});
  const auto w = perturbed(z, 1e-5, 7);
  CHECK(perturbed(z, 1e-5, 7) == w);
  for (const auto& m : w) CHECK(frobenius_norm(m) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ensemble_distance(z, z, 2.0) == 0.0);
  const double d1 = ensemble_distance(z, w, 1.0), d2 = ensemble_distance(z, w, 2.0);
  CHECK(d1 > 0.0);
  CHECK(d2 <= d1);
  CHECK(d1 < 1e-4);
}

TEST_CASE("scenario pool is deterministic across thread counts") {
  std::vector<ScenarioSpec> specs;
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    auto sc = reference_scenario(TheoremId::L4_1);
    sc.system.seed = seed;
    sc.system.integrator.t_end = 1.0;
    specs.push_back(sc);
  }
  const auto a = run_scenarios(specs, 1);
  const auto b = run_scenarios(specs, 4);
  REQUIRE(a.size() == 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].measured == b[i].measured);
    CHECK(a[i].verdict == b[i].verdict);
  }
}
