#pragma once

#include "nmdim/linalg.hpp"
#include "nmdim/rng.hpp"

namespace nmdim {

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// R-diagonal phase correction (plain QR alone is not Haar).
UnitaryMatrix sample_haar_unitary(Eigen::Index dim, Rng& rng);

/// V = G diag(e^{i 2 pi s_r}) G^dag with s_r ~ Uniform[0, phi] and G Haar.
/// phi = 0 returns the identity exactly; phi = 1 is Haar-equivalent.
UnitaryMatrix sample_evolution_unitary(Eigen::Index dim, double phi, Rng& rng);

/// Ginibre-ensemble state: A A^dag / tr(A A^dag) for complex Gaussian A.
/// dims defaults to the single subsystem {dim}.
DensityMatrix sample_ginibre_density(Eigen::Index dim, Rng& rng);

}  // namespace nmdim
