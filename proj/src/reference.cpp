#include "lohe/reference.hpp"

#include <cmath>

namespace lohe::reference {

Members tensor_field(std::span<const ComplexTensor> members,
                     std::span<const SkewHermitianGenerator> generators,
                     const CouplingVector& couplings) {
  const ComplexTensor tc = centroid(members);
  Members out;
  out.reserve(members.size());
  for (std::size_t j = 0; j < members.size(); ++j) {
    ComplexTensor d(tc.shape());
    if (!generators.empty()) d += apply_generator(generators[j], members[j]);
    for (std::size_t i = 0; i < couplings.count(); ++i) {
      const auto bits = couplings.pattern(i);
      d.add_scaled(couplings.by_index(i), coupling_term(members[j], tc, bits));
    }
    out.push_back(std::move(d));
  }
  return out;
}

Members lhs_field(std::span<const ComplexTensor> members,
                  std::span<const SkewHermitianGenerator> omegas, double kappa0, double kappa1) {
  const ComplexTensor zc = centroid(members);
  Members out;
  out.reserve(members.size());
  for (std::size_t j = 0; j < members.size(); ++j) {
    const ComplexTensor& z = members[j];
    ComplexTensor d(z.shape());
    if (!omegas.empty()) d += apply_generator(omegas[j], z);
    // kappa0 (<z_j,z_j> z_c - <z_c,z_j> z_j)
    d.add_scaled(kappa0 * frobenius_inner(z, z), zc);
    d.add_scaled(-kappa0 * frobenius_inner(zc, z), z);
    // kappa1 (<z_j,z_c> - <z_c,z_j>) z_j
    d.add_scaled(kappa1 * (frobenius_inner(z, zc) - frobenius_inner(zc, z)), z);
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<double> kuramoto_field(const PhaseModel& model, std::span<const double> theta) {
  std::vector<double> out(model.n, 0.0);
  for (std::size_t j = 0; j < model.n; ++j) {
    for (std::size_t k = 0; k < model.n; ++k)
      out[j] += model.R(j, k) * std::sin(theta[k] - theta[j] + model.alpha(j, k));
    out[j] *= 2.0 * model.kappa1 / double(model.n);
  }
  return out;
}

std::vector<Complex> correlations(std::span<const ComplexTensor> members) {
  const std::size_t n = members.size();
  std::vector<Complex> h(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h[i * n + j] = frobenius_inner(members[i], members[j]);
  return h;
}

}  // namespace lohe::reference
