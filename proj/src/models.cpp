#include "lohe/models.hpp"

#include <algorithm>
#include <cmath>

namespace lohe {

namespace {
// Below this many scalar operations per call the OpenMP region costs more
// than it saves.
constexpr std::size_t kParallelWork = 1u << 14;

std::vector<int> bits_of(std::size_t index, std::size_t rank) {
  std::vector<int> b(rank);
  for (std::size_t k = 0; k < rank; ++k) b[k] = int((index >> (rank - 1 - k)) & 1u);
  return b;
}

void require_generators(std::span<const SkewHermitianGenerator> gens, std::size_t n,
                        const TensorShape& shape) {
  if (gens.empty()) return;
  if (gens.size() != n)
    throw InvalidInput("expected " + std::to_string(n) + " generators, got " +
                       std::to_string(gens.size()));
  for (const auto& g : gens)
    if (!(g.base_shape() == shape))
      throw InvalidInput("generator acts on " + g.base_shape().str() + ", members are " +
                         shape.str());
}

void require_uniform_shapes(std::span<const ComplexTensor> members) {
  for (const auto& m : members)
    if (!(m.shape() == members.front().shape()))
      throw InvalidInput("members have mismatched shapes " + m.shape().str() + " vs " +
                         members.front().shape().str());
}

void require_rank1(const EnsembleState& s) {
  if (s.shape().rank() != 1) throw InvalidInput("model needs rank-1 members");
}
}  // namespace

CouplingVector::CouplingVector(std::size_t rank) : rank_(rank), strengths_(std::size_t{1} << rank) {
  if (rank > 16) throw InvalidInput("coupling rank too large");
}

CouplingVector CouplingVector::rank1(double kappa0, double kappa1) {
  CouplingVector c(1);
  c.set_by_index(0, kappa0);
  c.set_by_index(1, kappa1);
  return c;
}

CouplingVector CouplingVector::from_patterns(
    std::size_t rank, const std::vector<std::pair<std::string, double>>& entries) {
  CouplingVector c(rank);
  for (const auto& [pattern, value] : entries) c.set_by_index(c.index_of(pattern), value);
  return c;
}

std::size_t CouplingVector::index_of(std::span<const int> bits) const {
  if (bits.size() != rank_)
    throw InvalidInput("bit pattern length " + std::to_string(bits.size()) +
                       " does not match rank " + std::to_string(rank_));
  std::size_t idx = 0;
  for (int b : bits) {
    if (b != 0 && b != 1) throw InvalidInput("bit pattern entries must be 0 or 1");
    idx = (idx << 1) | std::size_t(b);
  }
  return idx;
}

std::size_t CouplingVector::index_of(std::string_view pattern) const {
  std::vector<int> bits;
  for (char ch : pattern) {
    if (ch != '0' && ch != '1')
      throw InvalidInput("coupling pattern '" + std::string(pattern) + "' must use 0/1");
    bits.push_back(ch - '0');
  }
  return index_of(bits);
}

double CouplingVector::get(std::span<const int> bits) const { return strengths_[index_of(bits)]; }

void CouplingVector::set(std::span<const int> bits, double value) {
  set_by_index(index_of(bits), value);
}

void CouplingVector::set_by_index(std::size_t index, double value) {
  if (!(value >= 0.0)) throw InvalidInput("coupling strengths must be nonnegative");
  strengths_.at(index) = value;
}

std::vector<int> CouplingVector::pattern(std::size_t index) const { return bits_of(index, rank_); }

std::string CouplingVector::pattern_string(std::size_t index) const {
  std::string s;
  for (int b : pattern(index)) s.push_back(char('0' + b));
  return s;
}

double CouplingVector::kappa_hat0() const noexcept {
  double s = 0.0;
  for (std::size_t i = 1; i < strengths_.size(); ++i) s += strengths_[i];
  return s;
}

ComplexTensor centroid(std::span<const ComplexTensor> members) {
  if (members.empty()) throw InvalidInput("centroid of an empty ensemble");
  ComplexTensor c(members.front().shape());
  for (const auto& m : members) c += m;
  c *= 1.0 / double(members.size());
  return c;
}

void EnsembleState::validate(double tol) const {
  if (members.empty()) throw InvalidInput("ensemble needs at least one member");
  for (std::size_t j = 0; j < members.size(); ++j) {
    if (!(members[j].shape() == members[0].shape()))
      throw InvalidInput("member " + std::to_string(j) + " has shape " +
                         members[j].shape().str() + ", expected " + members[0].shape().str());
    const double nrm = frobenius_norm(members[j]);
    if (!(std::abs(nrm - 1.0) <= tol))
      throw InvalidInput("member " + std::to_string(j) + " has norm " + std::to_string(nrm) +
                         ", expected 1");
  }
}

void PhaseModel::validate() const {
  if (theta.size() != n || amplitudes.size() != n * n || frustrations.size() != n * n)
    throw InvalidInput("phase model arrays do not match n = " + std::to_string(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      if (std::abs(R(j, k) - R(k, j)) > kSymmetryTolerance)
        throw InvalidInput("amplitudes must be symmetric");
      if (std::abs(alpha(j, k) + alpha(k, j)) > kSymmetryTolerance)
        throw InvalidInput("frustrations must be skew-symmetric");
    }
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::LoheTensor: return "LoheTensor";
    case ModelKind::LoheHermitianSphere: return "LoheHermitianSphere";
    case ModelKind::LoheSphere: return "LoheSphere";
    case ModelKind::LoheMatrix: return "LoheMatrix";
    case ModelKind::SubsystemA: return "SubsystemA";
    case ModelKind::SubsystemB: return "SubsystemB";
    case ModelKind::KuramotoFrustration: return "KuramotoFrustration";
  }
  return "?";
}

std::optional<ModelKind> model_kind_from_string(std::string_view name) {
  for (auto k : {ModelKind::LoheTensor, ModelKind::LoheHermitianSphere, ModelKind::LoheSphere,
                 ModelKind::LoheMatrix, ModelKind::SubsystemA, ModelKind::SubsystemB,
                 ModelKind::KuramotoFrustration})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

Members tensor_field(std::span<const ComplexTensor> members,
                     std::span<const SkewHermitianGenerator> generators,
                     const CouplingVector& couplings) {
  require_uniform_shapes(members);
  const std::size_t n = members.size();
  const ComplexTensor tc = centroid(members);
  const TensorShape& shape = tc.shape();
  if (couplings.rank() != shape.rank())
    throw InvalidInput("coupling rank " + std::to_string(couplings.rank()) +
                       " does not match tensor rank " + std::to_string(shape.rank()));
  require_generators(generators, n, shape);

  std::vector<std::vector<int>> patterns;
  std::vector<double> strengths;
  for (std::size_t i = 0; i < couplings.count(); ++i)
    if (couplings.by_index(i) != 0.0) {
      patterns.push_back(couplings.pattern(i));
      strengths.push_back(couplings.by_index(i));
    }

  Members out(n);
  const std::size_t work = n * shape.size() * shape.size() * (patterns.size() + 1);
  const auto ln = static_cast<long>(n);
#pragma omp parallel for schedule(static) if (work >= kParallelWork)
  for (long jj = 0; jj < ln; ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    ComplexTensor d = generators.empty() ? ComplexTensor(shape)
                                         : apply_generator(generators[j], members[j]);
    for (std::size_t p = 0; p < patterns.size(); ++p)
      d.add_scaled(strengths[p], coupling_term(members[j], tc, patterns[p]));
    out[j] = std::move(d);
  }
  return out;
}

Members lhs_field(std::span<const ComplexTensor> members,
                  std::span<const SkewHermitianGenerator> omegas, double kappa0, double kappa1) {
  require_uniform_shapes(members);
  const std::size_t n = members.size();
  const ComplexTensor zc = centroid(members);
  const std::size_t d = zc.size();
  require_generators(omegas, n, zc.shape());

  Members out(n);
  const auto ln = static_cast<long>(n);
#pragma omp parallel for schedule(static) if (n * d * (d + 4) >= kParallelWork)
  for (long jj = 0; jj < ln; ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    const ComplexTensor& z = members[j];
    const double hjj = frobenius_norm_sq(z);
    const Complex hcj = frobenius_inner(zc, z);  // <z_c, z_j>
    const Complex hjc = std::conj(hcj);          // <z_j, z_c>
    const Complex self = -kappa0 * hcj + kappa1 * (hjc - hcj);
    ComplexTensor dz = omegas.empty() ? ComplexTensor(z.shape()) : apply_generator(omegas[j], z);
    for (std::size_t a = 0; a < d; ++a) dz[a] += kappa0 * hjj * zc[a] + self * z[a];
    out[j] = std::move(dz);
  }
  return out;
}

Members projection_field(std::span<const ComplexTensor> members, double kappa0, double kappa1) {
  require_uniform_shapes(members);
  const std::size_t n = members.size();
  const ComplexTensor zc = centroid(members);
  const std::size_t d = zc.size();
  Members out(n);
  const auto ln = static_cast<long>(n);
#pragma omp parallel for schedule(static) if (n * d * 4 >= kParallelWork)
  for (long jj = 0; jj < ln; ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    const ComplexTensor& z = members[j];
    const Complex hjc = frobenius_inner(z, zc);
    ComplexTensor dz(z.shape());
    // P_perp z_c = z_c - <z_j, z_c> z_j
    for (std::size_t a = 0; a < d; ++a) dz[a] = kappa0 * (zc[a] - hjc * z[a]);
    const Complex phase(0.0, 2.0 * (kappa0 + kappa1) * hjc.imag());
    for (std::size_t a = 0; a < d; ++a) dz[a] += phase * z[a];
    out[j] = std::move(dz);
  }
  return out;
}

Members matrix_field(std::span<const ComplexTensor> members,
                     std::span<const ComplexTensor> hamiltonians, double kappa) {
  require_uniform_shapes(members);
  const std::size_t n = members.size();
  const ComplexTensor uc = centroid(members);
  if (uc.shape().rank() != 2 || uc.shape().dim(0) != uc.shape().dim(1))
    throw InvalidInput("matrix model needs square matrices");
  if (!hamiltonians.empty() && hamiltonians.size() != n)
    throw InvalidInput("expected one hamiltonian per member");
  for (const auto& h : hamiltonians)
    if (!(h.shape() == uc.shape())) throw InvalidInput("hamiltonian shape mismatch");
  const ComplexTensor uc_adj = adjoint(uc);
  const std::size_t d = uc.shape().dim(0);

  Members out(n);
  const auto ln = static_cast<long>(n);
#pragma omp parallel for schedule(static) if (n * d * d * d * 5 >= kParallelWork)
  for (long jj = 0; jj < ln; ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    const ComplexTensor& u = members[j];
    ComplexTensor du = matmul(matmul(uc, adjoint(u)), u);
    du -= matmul(matmul(u, uc_adj), u);
    du *= 0.5 * kappa;
    if (!hamiltonians.empty()) du.add_scaled(Complex(0.0, -1.0), matmul(hamiltonians[j], u));
    out[j] = std::move(du);
  }
  return out;
}

std::vector<double> kuramoto_field(const PhaseModel& model, std::span<const double> theta) {
  const std::size_t n = model.n;
  if (theta.size() != n) throw InvalidInput("phase vector length mismatch");
  std::vector<double> out(n);
  const double scale = 2.0 * model.kappa1 / double(n);
  const auto ln = static_cast<long>(n);
#pragma omp parallel for schedule(static) if (n * n * 8 >= kParallelWork)
  for (long jj = 0; jj < ln; ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += model.R(j, k) * std::sin(theta[k] - theta[j] + model.alpha(j, k));
    out[j] = scale * s;
  }
  return out;
}

Members lohe_tensor_rhs(const EnsembleState& state,
                        std::span<const SkewHermitianGenerator> generators,
                        const CouplingVector& couplings) {
  if (state.members.empty()) throw InvalidInput("ensemble needs at least one member");
  for (const auto& m : state.members)
    if (!(m.shape() == state.shape())) throw InvalidInput("members have mismatched shapes");
  return tensor_field(state.members, generators, couplings);
}

Members lhs_rhs(const EnsembleState& state, std::span<const SkewHermitianGenerator> omegas,
                double kappa0, double kappa1) {
  state.validate();
  require_rank1(state);
  return lhs_field(state.members, omegas, kappa0, kappa1);
}

Members lohe_sphere_rhs(const EnsembleState& state,
                        std::span<const SkewHermitianGenerator> omegas, double kappa0) {
  state.validate();
  require_rank1(state);
  for (const auto& m : state.members)
    for (const auto& e : m.entries())
      if (std::abs(e.imag()) > 1e-12) throw InvalidInput("sphere model needs real members");
  for (const auto& o : omegas)
    for (const auto& e : o.tensor().entries())
      if (std::abs(e.imag()) > 1e-12) throw InvalidInput("sphere model needs real generators");

  // Real arithmetic: xdot_j = Omega_j x_j + kappa0(<x_j,x_j> x_c - <x_c,x_j> x_j)
  const std::size_t n = state.size();
  const std::size_t d = state.shape().dim(0);
  std::vector<double> xc(d, 0.0);
  for (const auto& m : state.members)
    for (std::size_t a = 0; a < d; ++a) xc[a] += m[a].real();
  for (auto& v : xc) v /= double(n);
  require_generators(omegas, n, state.shape());

  Members out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& x = state.members[j];
    double xx = 0.0, cx = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      xx += x[a].real() * x[a].real();
      cx += xc[a] * x[a].real();
    }
    ComplexTensor dx(x.shape());
    for (std::size_t a = 0; a < d; ++a) {
      double v = kappa0 * (xx * xc[a] - cx * x[a].real());
      if (!omegas.empty())
        for (std::size_t b = 0; b < d; ++b) v += omegas[j](a, b).real() * x[b].real();
      dx[a] = v;
    }
    out[j] = std::move(dx);
  }
  return out;
}

Members lohe_matrix_rhs(const EnsembleState& state, std::span<const ComplexTensor> hamiltonians,
                        double kappa) {
  if (state.members.empty()) throw InvalidInput("ensemble needs at least one member");
  for (const auto& u : state.members) {
    if (u.shape().rank() != 2 || u.shape().dim(0) != u.shape().dim(1))
      throw InvalidInput("matrix model needs square members");
    if (!(u.shape() == state.shape())) throw InvalidInput("members have mismatched shapes");
    const ComplexTensor g = matmul(adjoint(u), u) - ComplexTensor::identity(u.shape().dim(0));
    if (frobenius_norm(g) > kUnitNormTolerance) throw InvalidInput("member is not unitary");
  }
  for (const auto& h : hamiltonians) {
    if (!(h.shape() == state.shape())) throw InvalidInput("hamiltonian shape mismatch");
    if (frobenius_distance(h, adjoint(h)) > 1e-12) throw InvalidInput("hamiltonian is not hermitian");
  }
  return matrix_field(state.members, hamiltonians, kappa);
}

Members subsystem_a_rhs(const EnsembleState& state, double kappa0) {
  return lhs_rhs(state, {}, kappa0, 0.0);
}

Members subsystem_b_rhs(const EnsembleState& state, double kappa1) {
  return lhs_rhs(state, {}, 0.0, kappa1);
}

Members lhs_rhs_projection_form(const EnsembleState& state, double kappa0, double kappa1) {
  state.validate();
  require_rank1(state);
  return projection_field(state.members, kappa0, kappa1);
}

std::vector<double> kuramoto_frustration_rhs(const PhaseModel& model) {
  model.validate();
  return kuramoto_field(model, model.theta);
}

PhaseModel build_phase_model(const EnsembleState& initial, double kappa1) {
  initial.validate();
  require_rank1(initial);
  const std::size_t n = initial.size();
  PhaseModel pm;
  pm.n = n;
  pm.kappa1 = kappa1;
  pm.theta.assign(n, 0.0);
  pm.amplitudes.assign(n * n, 0.0);
  pm.frustrations.assign(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    pm.amplitudes[j * n + j] = 1.0;
    for (std::size_t k = j + 1; k < n; ++k) {
      const Complex h = frobenius_inner(initial.members[j], initial.members[k]);
      const double r = std::abs(h);
      const double a = r == 0.0 ? 0.0 : std::arg(h);
      pm.amplitudes[j * n + k] = pm.amplitudes[k * n + j] = r;
      pm.frustrations[j * n + k] = a;
      pm.frustrations[k * n + j] = -a;
    }
  }
  return pm;
}

SkewHermitianGenerator left_multiplication_generator(const SkewHermitianGenerator& a) {
  if (a.base_shape().rank() != 1) throw InvalidInput("expected a matrix generator");
  const std::size_t d = a.base_shape().dim(0);
  const TensorShape base({d, d});
  ComplexTensor lifted(base.doubled());
  const std::size_t dd = d * d;
  // [A]_{(al be),(ga de)} = a_{al ga} delta_{be de}
  for (std::size_t al = 0; al < d; ++al)
    for (std::size_t ga = 0; ga < d; ++ga)
      for (std::size_t be = 0; be < d; ++be) lifted[(al * d + be) * dd + (ga * d + be)] = a(al, ga);
  return SkewHermitianGenerator(base, std::move(lifted));
}

void validate_state_for(ModelKind kind, const EnsembleState& state) {
  switch (kind) {
    case ModelKind::LoheTensor:
      state.validate();
      return;
    case ModelKind::LoheHermitianSphere:
    case ModelKind::SubsystemA:
    case ModelKind::SubsystemB:
    case ModelKind::KuramotoFrustration:
      state.validate();
      require_rank1(state);
      return;
    case ModelKind::LoheSphere:
      state.validate();
      require_rank1(state);
      for (const auto& m : state.members)
        for (const auto& e : m.entries())
          if (std::abs(e.imag()) > 1e-12) throw InvalidInput("sphere model needs real members");
      return;
    case ModelKind::LoheMatrix:
      lohe_matrix_rhs(state, {}, 0.0);
      return;
  }
}

EnsembleRhs make_ensemble_rhs(const ModelParams& p) {
  switch (p.kind) {
    case ModelKind::LoheTensor: {
      if (!p.couplings) throw InvalidInput("tensor model needs a coupling vector");
      return [cv = *p.couplings, gens = p.generators](double, const Members& m) {
        return tensor_field(m, gens, cv);
      };
    }
    case ModelKind::LoheHermitianSphere:
    case ModelKind::LoheSphere:
      return [gens = p.generators, k0 = p.kappa0,
              k1 = p.kind == ModelKind::LoheSphere ? 0.0 : p.kappa1](double, const Members& m) {
        return lhs_field(m, gens, k0, k1);
      };
    case ModelKind::SubsystemA:
      return [k0 = p.kappa0](double, const Members& m) { return lhs_field(m, {}, k0, 0.0); };
    case ModelKind::SubsystemB:
      return [k1 = p.kappa1](double, const Members& m) { return lhs_field(m, {}, 0.0, k1); };
    case ModelKind::LoheMatrix: {
      std::vector<ComplexTensor> hs;
      // generators hold -i H_j on C^d, so H_j = i A_j
      for (const auto& g : p.generators) hs.push_back(Complex(0.0, 1.0) * g.tensor());
      return [hs = std::move(hs), k = p.kappa0](double, const Members& m) {
        return matrix_field(m, hs, k);
      };
    }
    case ModelKind::KuramotoFrustration:
      break;
  }
  throw InvalidInput("model " + to_string(p.kind) + " has no ensemble vector field");
}

}  // namespace lohe
