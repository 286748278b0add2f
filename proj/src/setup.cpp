#include "lohe/setup.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "lohe/observe.hpp"

namespace lohe {

TensorShape SystemSpec::generator_base() const {
  if (model == ModelKind::LoheMatrix) return TensorShape({dims.at(0)});
  return shape();
}

CouplingVector SystemSpec::effective_couplings() const {
  if (couplings) {
    if (couplings->rank() != dims.size())
      throw InvalidInput("coupling rank " + std::to_string(couplings->rank()) +
                         " does not match tensor rank " + std::to_string(dims.size()));
    return *couplings;
  }
  if (dims.size() == 1) return CouplingVector::rank1(kappa0, kappa1);
  throw InvalidInput("rank-" + std::to_string(dims.size()) + " model needs explicit strengths");
}

Members clustered_members(const CounterRng& rng, std::size_t n, const TensorShape& shape,
                          double sigma, bool real_only) {
  const ComplexTensor center = random_unit_tensor(rng, streams::kClusterCenter, shape, real_only);
  Members out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    ComplexTensor z = center;
    z.add_scaled(sigma, gaussian_tensor(rng, streams::kMembers + j, shape, real_only));
    z *= 1.0 / frobenius_norm(z);
    out.push_back(std::move(z));
  }
  return out;
}

ComplexTensor random_unitary(const CounterRng& rng, std::uint64_t stream, std::size_t d) {
  return matrix_exp(random_skew_hermitian(rng, stream, TensorShape({d}), 1.0), 1.0);
}

namespace {

Members bisect_cluster(const CounterRng& rng, std::size_t n, const TensorShape& shape,
                       bool real_only, double target, bool increasing,
                       const std::function<double(const Members&)>& metric) {
  auto at = [&](double s) { return clustered_members(rng, n, shape, s, real_only); };
  auto below = [&](double v) { return increasing ? v < target : v > target; };
  double lo = 0.0, hi = 1.0;
  while (below(metric(at(hi)))) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw InvalidInput("clustered target " + std::to_string(target) + " is infeasible");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (below(metric(at(mid))) ? lo : hi) = mid;
  }
  Members m = at(hi);
  const double got = metric(m);
  if (std::abs(got - target) > 0.01)
    throw InvalidInput("bisection missed clustered target " + std::to_string(target) + " (got " +
                       std::to_string(got) + ")");
  return m;
}

void require_unit(const Members& m) {
  for (std::size_t j = 0; j < m.size(); ++j)
    if (std::abs(frobenius_norm(m[j]) - 1.0) > kUnitNormTolerance)
      throw InvalidInput("explicit member " + std::to_string(j) + " does not have unit norm");
}

}  // namespace

Members seeded_initial(const InitialSpec& spec, std::size_t n, const TensorShape& shape,
                       std::uint64_t seed, ModelKind model) {
  if (n == 0) throw InvalidInput("ensemble size must be positive");
  const CounterRng rng(seed);
  const bool matrix = model == ModelKind::LoheMatrix;
  const bool real_only = spec.real_only || model == ModelKind::LoheSphere;
  switch (spec.kind) {
    case InitialKind::Random: {
      Members out;
      for (std::size_t j = 0; j < n; ++j)
        out.push_back(matrix ? random_unitary(rng, streams::kMembers + j, shape.dim(0))
                             : random_unit_tensor(rng, streams::kMembers + j, shape, real_only));
      return out;
    }
    case InitialKind::Clustered: {
      if (matrix) throw InvalidInput("clustered initial data is not defined for the matrix model");
      const int targets = int(spec.lambda_target.has_value()) + int(spec.rho_target.has_value()) +
                          int(spec.diameter_target.has_value());
      if (targets != 1) throw InvalidInput("clustered initial data needs exactly one target");
      if (spec.lambda_target) {
        const double t = *spec.lambda_target;
        if (!(t > 0.0 && t <= 2.0)) throw InvalidInput("lambda_target must lie in (0, 2]");
        return bisect_cluster(rng, n, shape, real_only, t, true, [](const Members& m) {
          return correlation_diameter(correlations(m)).value;
        });
      }
      if (spec.rho_target) {
        const double t = *spec.rho_target;
        if (!(t > 0.0 && t < 1.0)) throw InvalidInput("rho_target must lie in (0, 1)");
        return bisect_cluster(rng, n, shape, real_only, t, false,
                              [](const Members& m) { return order_parameter(m); });
      }
      const double t = *spec.diameter_target;
      if (!(t > 0.0 && t <= 2.0)) throw InvalidInput("diameter_target must lie in (0, 2]");
      return bisect_cluster(rng, n, shape, real_only, t, true,
                            [](const Members& m) { return diameter(m).value; });
    }
    case InitialKind::Explicit: {
      const Members& m = spec.explicit_members;
      if (m.size() != n)
        throw InvalidInput("expected " + std::to_string(n) + " explicit members, got " +
                           std::to_string(m.size()));
      for (const auto& z : m)
        if (!(z.shape() == shape)) throw InvalidInput("explicit member shape mismatch");
      if (!matrix) require_unit(m);
      return m;
    }
  }
  throw InvalidInput("unknown initial kind");
}

std::vector<SkewHermitianGenerator> seeded_generators(const GeneratorSpec& spec, std::size_t n,
                                                      const TensorShape& base, std::uint64_t seed) {
  std::vector<SkewHermitianGenerator> out;
  switch (spec.kind) {
    case GeneratorKind::Zero:
      return out;
    case GeneratorKind::RandomSkewHermitian: {
      if (!(spec.scale >= 0.0)) throw InvalidInput("generator scale must be nonnegative");
      const CounterRng rng(seed);
      for (std::size_t j = 0; j < n; ++j) {
        const std::uint64_t stream = streams::kGenerators + (spec.homogeneous ? 0 : j);
        out.push_back(random_skew_hermitian(rng, stream, base, spec.scale, spec.real_only));
      }
      break;
    }
    case GeneratorKind::Explicit: {
      const auto& e = spec.explicit_entries;
      if (e.size() != n && e.size() != 1)
        throw InvalidInput("expected 1 or " + std::to_string(n) + " explicit generators");
      for (std::size_t j = 0; j < n; ++j)
        out.emplace_back(base, e[e.size() == 1 ? 0 : j]);
      break;
    }
  }
  if (spec.diameter_target) {
    const double target = *spec.diameter_target;
    if (!(target >= 0.0)) throw InvalidInput("generator diameter_target must be nonnegative");
    const double d = generator_diameter(out);
    if (target > 0.0 && d == 0.0)
      throw InvalidInput("cannot rescale a homogeneous generator ensemble to a positive diameter");
    const double s = d == 0.0 ? 0.0 : target / d;
    for (auto& g : out) {
      ComplexTensor t = g.tensor();
      t *= s;
      g = SkewHermitianGenerator(base, std::move(t));
    }
  }
  return out;
}

BuiltSystem build_system(const SystemSpec& spec) {
  if (spec.n == 0) throw InvalidInput("n must be positive");
  if (spec.dims.empty()) throw InvalidInput("dims must name at least one dimension");
  for (auto d : spec.dims)
    if (d == 0) throw InvalidInput("every dimension must be positive");
  const bool rank1_model = spec.model != ModelKind::LoheTensor && spec.model != ModelKind::LoheMatrix;
  if (rank1_model && spec.dims.size() != 1)
    throw InvalidInput("model " + to_string(spec.model) + " needs rank-1 members");
  if (spec.model == ModelKind::LoheMatrix &&
      (spec.dims.size() != 2 || spec.dims[0] != spec.dims[1]))
    throw InvalidInput("matrix model needs square d x d members");
  if (spec.kappa0 < 0.0 && spec.model == ModelKind::LoheMatrix)
    throw InvalidInput("matrix model needs a nonnegative coupling");
  spec.integrator.validate();

  BuiltSystem b;
  b.params.kind = spec.model;
  b.params.kappa0 = spec.kappa0;
  b.params.kappa1 = spec.kappa1;
  if (spec.model == ModelKind::LoheTensor) b.params.couplings = spec.effective_couplings();
  GeneratorSpec gens = spec.generators;
  if (spec.model == ModelKind::LoheSphere) gens.real_only = true;
  b.params.generators = seeded_generators(gens, spec.n, spec.generator_base(), spec.seed);
  b.initial = seeded_initial(spec.initial, spec.n, spec.shape(), spec.seed, spec.model);
  validate_state_for(spec.model, EnsembleState(b.initial));
  return b;
}

}  // namespace lohe
