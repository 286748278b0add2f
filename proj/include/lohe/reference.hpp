#pragma once

// Serial, formula-literal versions of the parallel kernels. They exist to be
// compared against in tests and benchmarks; nothing in the library calls them.

#include <span>
#include <vector>

#include "lohe/models.hpp"

namespace lohe::reference {

Members tensor_field(std::span<const ComplexTensor> members,
                     std::span<const SkewHermitianGenerator> generators,
                     const CouplingVector& couplings);

Members lhs_field(std::span<const ComplexTensor> members,
                  std::span<const SkewHermitianGenerator> omegas, double kappa0, double kappa1);

std::vector<double> kuramoto_field(const PhaseModel& model, std::span<const double> theta);

/// h_ij = <z_i, z_j>, row-major N x N.
std::vector<Complex> correlations(std::span<const ComplexTensor> members);

}  // namespace lohe::reference
