#include "nmdim/sampling.hpp"

#include <Eigen/QR>
#include <cmath>

namespace nmdim {

namespace {

CMatrix gaussian_matrix(Eigen::Index dim, Rng& rng) {
  CMatrix a(dim, dim);
  // Row-major fill order, part of the reproducibility contract.
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = rng.complex_gaussian();
  return a;
}

}  // namespace

UnitaryMatrix sample_haar_unitary(Eigen::Index dim, Rng& rng) {
  if (dim < 1) throw ParamError("sample_haar_unitary: dim must be >= 1");
  for (;;) {
    const CMatrix a = gaussian_matrix(dim, rng);
    Eigen::HouseholderQR<CMatrix> qr(a);
    const Eigen::VectorXcd rdiag = qr.matrixQR().diagonal();
    if ((rdiag.array().abs() == 0.0).any()) continue;  // a.s. never
    CMatrix q = qr.householderQ();
    for (Eigen::Index j = 0; j < dim; ++j)
      q.col(j) *= rdiag(j) / std::abs(rdiag(j));
    return {std::move(q)};
  }
}

UnitaryMatrix sample_evolution_unitary(Eigen::Index dim, double phi, Rng& rng) {
  if (dim < 1) throw ParamError("sample_evolution_unitary: dim must be >= 1");
  if (!(phi >= 0.0 && phi <= 1.0))
    throw ParamError("sample_evolution_unitary: phi must lie in [0,1]");
  if (phi == 0.0) return {CMatrix::Identity(dim, dim)};
  Eigen::VectorXcd phases(dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    const double s = rng.uniform(0.0, phi);
    phases(r) = std::polar(1.0, 2.0 * M_PI * s);
  }
  const UnitaryMatrix g = sample_haar_unitary(dim, rng);
  return {g.mat * phases.asDiagonal() * g.mat.adjoint()};
}

DensityMatrix sample_ginibre_density(Eigen::Index dim, Rng& rng) {
  if (dim < 1) throw ParamError("sample_ginibre_density: dim must be >= 1");
  const CMatrix a = gaussian_matrix(dim, rng);
  CMatrix m = a * a.adjoint();
  m /= m.trace();
  return {std::move(m), {dim}};
}

}  // namespace nmdim
