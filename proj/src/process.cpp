#include "nmdim/process.hpp"

#include <algorithm>
#include <string>

#include "nmdim/sampling.hpp"

namespace nmdim {

ProcessInstance sample_process(const ProcessParams& params, Rng& rng) {
  if (params.k1 < 1 || params.k2 < 1)
    throw ParamError("sample_process: k1 and k2 must be >= 1");
  UnitaryMatrix v = sample_evolution_unitary(params.joint_dim(), params.phi, rng);
  DensityMatrix rho0 = sample_ginibre_density(params.memory_dim(), rng);
  rho0.dims = {kSystemDim, params.k2};
  return {params, std::move(v), std::move(rho0)};
}

const CMatrix& pauli_control(int u_index) {
  static const std::array<CMatrix, 4> paulis = [] {
    std::array<CMatrix, 4> p;
    const Complex i{0.0, 1.0};
    p[0] = CMatrix::Identity(2, 2);
    p[1] = CMatrix{{0, 1}, {1, 0}};
    p[2] = CMatrix{{0, -i}, {i, 0}};
    p[3] = CMatrix{{1, 0}, {0, -1}};
    return p;
  }();
  if (u_index < 0 || u_index > 3)
    throw ParamError("pauli_control: index must lie in 0..3");
  return paulis[u_index];
}

const Eigen::Vector2cd& basis_state(int basis_index) {
  static const std::array<Eigen::Vector2cd, 3> states = [] {
    std::array<Eigen::Vector2cd, 3> s;
    const Complex i{0.0, 1.0};
    s[0] = Eigen::Vector2cd{1, 1} * M_SQRT1_2;   // |x+>
    s[1] = Eigen::Vector2cd{1, i} * M_SQRT1_2;   // |y+>
    s[2] = Eigen::Vector2cd{1, 0};               // |z+>
    return s;
  }();
  if (basis_index < 1 || basis_index > 3)
    throw ParamError("basis_state: index must lie in 1..3");
  return states[basis_index - 1];
}

DensityMatrix step(const DensityMatrix& rho, int u_index,
                   const ProcessInstance& inst) {
  const int k1 = inst.params.k1;
  const int k2 = inst.params.k2;
  const Eigen::Index mem = inst.params.memory_dim();
  if (rho.dims.size() != 2 || rho.dims[0] != kSystemDim ||
      rho.dims[1] != k2 || rho.dim() != mem)
    throw DimensionError("step: state dims do not match the process instance");
  if (inst.v.dim() != inst.params.joint_dim())
    throw DimensionError("step: V dimension does not match the parameters");

  const CMatrix u =
      kron(pauli_control(u_index), CMatrix::Identity(k2, k2));
  const CMatrix controlled = u * rho.mat * u.adjoint();

  // Tensor order for V is S (x) E2 (x) E1 with E1 fastest-varying, so
  // rho (x) |0><0|_{E1} is supported on the columns of V whose flat index
  // is a multiple of k1. Conjugating the restricted slab is algebraically
  // identical to forming the full Kronecker product.
  CMatrix slab(inst.v.dim(), mem);
  for (Eigen::Index c = 0; c < mem; ++c) slab.col(c) = inst.v.mat.col(c * k1);
  const CMatrix joint = slab * controlled * slab.adjoint();

  DensityMatrix full{joint, {kSystemDim, k2, k1}};
  return partial_trace(full, {0, 1});
}

double measure_probability(const DensityMatrix& rho, int basis_index) {
  const Eigen::Vector2cd& psi = basis_state(basis_index);
  const DensityMatrix sys = partial_trace(rho, {0});
  const Eigen::Vector2cd image = sys.mat * psi;
  const double p = std::real(psi.dot(image));
  if (p < -1e-9 || p > 1.0 + 1e-9)
    throw NumericalError("measure_probability: probability far outside [0,1]");
  return std::clamp(p, 0.0, 1.0);
}

namespace {

void fill_prefix(const ProcessInstance& inst, const DensityMatrix& state,
                 int depth, int base_index,
                 std::array<double, kNumFeatures>& out) {
  if (depth == kTimeSteps - 1) {
    for (int b = 1; b <= 3; ++b)
      out[base_index * 3 + (b - 1)] = measure_probability(state, b);
    return;
  }
  for (int u = 0; u < 4; ++u) {
    const DensityMatrix next = step(state, u, inst);
    fill_prefix(inst, next, depth + 1, base_index * 4 + u, out);
  }
}

}  // namespace

std::array<double, kNumFeatures> generate_features(const ProcessInstance& inst,
                                                   FeatureStrategy strategy) {
  std::array<double, kNumFeatures> out{};
  if (strategy == FeatureStrategy::kPrefixTree) {
    fill_prefix(inst, inst.rho0, 0, 0, out);
    return out;
  }
  for (int i1 = 0; i1 < 4; ++i1)
    for (int i2 = 0; i2 < 4; ++i2)
      for (int i3 = 0; i3 < 4; ++i3) {
        DensityMatrix state = step(inst.rho0, i1, inst);
        state = step(state, i2, inst);
        state = step(state, i3, inst);
        for (int b = 1; b <= 3; ++b)
          out[feature_index(i1, i2, i3, b)] = measure_probability(state, b);
      }
  return out;
}

std::string feature_name(int index) {
  const int basis = index % 3 + 1;
  int seq = index / 3;
  const int i3 = seq % 4;
  seq /= 4;
  const int i2 = seq % 4;
  const int i1 = seq / 4;
  return "p_" + std::to_string(i1) + std::to_string(i2) + std::to_string(i3) +
         std::to_string(basis);
}

}  // namespace nmdim
