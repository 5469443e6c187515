#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "nmdim/errors.hpp"

namespace nmdim {

using CMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Square complex matrix interpreted as a state on a tensor product of
/// subsystems; dims lists the subsystem dimensions, product = matrix size.
struct DensityMatrix {
  CMatrix mat;
  std::vector<Eigen::Index> dims;

  Eigen::Index dim() const { return mat.rows(); }
};

struct UnitaryMatrix {
  CMatrix mat;

  Eigen::Index dim() const { return mat.rows(); }
};

/// Kronecker product: result[(i1*b.rows+i2),(j1*b.cols+j2)] = a(i1,j1)*b(i2,j2).
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Trace out every subsystem not listed in keep. keep holds indices into
/// rho.dims; output subsystem order follows the input dims order.
DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<int>& keep);

/// Checks against the DensityMatrix contract: Hermitian, unit trace,
/// positive semi-definite (all within tol).
bool is_valid_density(const DensityMatrix& rho, double tol = 1e-10);

bool is_unitary(const CMatrix& u, double tol = 1e-10);

}  // namespace nmdim
