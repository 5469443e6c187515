#pragma once

#include <array>
#include <vector>

#include "nmdim/linalg.hpp"
#include "nmdim/rng.hpp"

namespace nmdim {

// Fixed experiment shape: qubit system probed over four time steps, with a
// single projective measurement at the end.
inline constexpr int kSystemDim = 2;
inline constexpr int kTimeSteps = 4;
inline constexpr int kNumFeatures = 192;  // 4^3 control sequences x 3 bases

struct ProcessParams {
  int k1 = 1;        // Markovian environment dimension (reset each step)
  int k2 = 1;        // non-Markovian environment dimension (kept)
  double phi = 1.0;  // evolution parameter in [0,1]

  int joint_dim() const { return kSystemDim * k2 * k1; }
  int memory_dim() const { return kSystemDim * k2; }
};

/// One sampled process: a single joint unitary V on S (x) E2 (x) E1 reused at
/// every step, and an initial Ginibre state on S (x) E2.
struct ProcessInstance {
  ProcessParams params;
  UnitaryMatrix v;     // dim 2*k2*k1
  DensityMatrix rho0;  // dims {2, k2}
};

/// Samples V then rho0 from rng (order is part of the determinism contract).
ProcessInstance sample_process(const ProcessParams& params, Rng& rng);

/// Pauli control unitary, index 0..3 = identity, sigma_x, sigma_y, sigma_z.
const CMatrix& pauli_control(int u_index);

/// Measurement basis state, index 1..3 = |x+>, |y+>, |z+>.
const Eigen::Vector2cd& basis_state(int basis_index);

/// One time step on the S (x) E2 state: apply the control on S, couple a
/// fresh |0> Markovian environment through V, trace that environment out.
DensityMatrix step(const DensityMatrix& rho, int u_index,
                   const ProcessInstance& inst);

/// <psi_b| tr_E2(rho) |psi_b>, clamped to [0,1] against rounding noise.
double measure_probability(const DensityMatrix& rho, int basis_index);

enum class FeatureStrategy {
  kPrefixTree,  // share states along the 4-ary prefix tree: 84 step calls
  kNaive,       // rerun every sequence from rho0: 192 step calls
};

/// All 192 probabilities p(psi_{i4} | U_{i1}, U_{i2}, U_{i3}), ordered
/// lexicographically by (i1, i2, i3, i4) with the basis index i4 fastest.
std::array<double, kNumFeatures> generate_features(
    const ProcessInstance& inst,
    FeatureStrategy strategy = FeatureStrategy::kPrefixTree);

/// Flat feature index for control indices (i1,i2,i3) in 0..3 and basis 1..3.
inline int feature_index(int i1, int i2, int i3, int basis) {
  return ((i1 * 4 + i2) * 4 + i3) * 3 + (basis - 1);
}

/// Column name "p_<i1><i2><i3><i4>" for the flat feature index.
std::string feature_name(int index);

}  // namespace nmdim
