#include <doctest.h>

#include <cmath>

#include "nmdim/process.hpp"
#include "nmdim/sampling.hpp"
#include "oracles.hpp"

using namespace nmdim;

namespace {

ProcessInstance make_instance(int k1, int k2, double phi, Rng& rng) {
  return sample_process({k1, k2, phi}, rng);
}

DensityMatrix projector_z_plus(int k2) {
  CMatrix z = CMatrix::Zero(2, 2);
  z(0, 0) = 1.0;
  CMatrix e2 = CMatrix::Zero(k2, k2);
  e2(0, 0) = 1.0;
  return {kron(z, e2), {2, k2}};
}

constexpr double kBlochLow = (3.0 - 1.7320508075688772) / 2.0;
constexpr double kBlochHigh = (3.0 + 1.7320508075688772) / 2.0;

}  // namespace

TEST_CASE("step with identity dynamics leaves the state unchanged") {
  Rng rng(21);
  const ProcessInstance inst = make_instance(2, 2, 0.0, rng);
  const DensityMatrix next = step(inst.rho0, 0, inst);
  CHECK((next.mat - inst.rho0.mat).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("step preserves the trace") {
  Rng rng(22);
  for (int trial = 0; trial < 5; ++trial) {
    const ProcessInstance inst = make_instance(2, 3, 0.8, rng);
    for (int u = 0; u < 4; ++u) {
      const DensityMatrix next = step(inst.rho0, u, inst);
      CHECK(std::abs(next.mat.trace() - Complex{1.0, 0.0}) < 1e-10);
      CHECK(is_valid_density(next));
    }
  }
}

TEST_CASE("step at k1=k2=1 reduces to plain unitary conjugation") {
  Rng rng(23);
  ProcessInstance inst = make_instance(1, 1, 1.0, rng);
  inst.rho0 = projector_z_plus(1);
  const DensityMatrix got = step(inst.rho0, 1, inst);
  const CMatrix sx = pauli_control(1);
  const CMatrix want =
      inst.v.mat * sx * inst.rho0.mat * sx.adjoint() * inst.v.mat.adjoint();
  CHECK((got.mat - want).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("step rejects mismatched state dimensions") {
  Rng rng(24);
  const ProcessInstance inst = make_instance(2, 2, 0.5, rng);
  const DensityMatrix wrong = projector_z_plus(3);
  CHECK_THROWS_AS(step(wrong, 0, inst), DimensionError);
}

TEST_CASE("measurement of an eigenstate returns 1") {
  Rng rng(25);
  const Eigen::Vector2cd xp = basis_state(1);
  const CMatrix rho_s = xp * xp.adjoint();
  const DensityMatrix sigma = sample_ginibre_density(3, rng);
  const DensityMatrix rho{kron(rho_s, sigma.mat), {2, 3}};
  CHECK(measure_probability(rho, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("measurement across unbiased bases returns one half") {
  Rng rng(26);
  const DensityMatrix sigma = sample_ginibre_density(2, rng);
  const DensityMatrix rho{kron(projector_z_plus(1).mat, sigma.mat), {2, 2}};
  CHECK(measure_probability(rho, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(measure_probability(rho, 2) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("measurement rejects bad basis indices") {
  const DensityMatrix rho = projector_z_plus(1);
  CHECK_THROWS_AS(measure_probability(rho, 0), ParamError);
  CHECK_THROWS_AS(measure_probability(rho, 4), ParamError);
}

TEST_CASE("basis probabilities obey the Bloch norm bound") {
  Rng rng(27);
  for (int trial = 0; trial < 20; ++trial) {
    DensityMatrix rho = sample_ginibre_density(6, rng);
    rho.dims = {2, 3};
    const double sum = measure_probability(rho, 1) +
                       measure_probability(rho, 2) +
                       measure_probability(rho, 3);
    CHECK(sum >= kBlochLow - 1e-12);
    CHECK(sum <= kBlochHigh + 1e-12);
    // Cross-check against explicit Bloch coordinates of the reduced state.
    const DensityMatrix sys = partial_trace(rho, {0});
    const auto r = oracles::bloch_vector(sys.mat);
    CHECK(sum == doctest::Approx(1.5 + 0.5 * (r[0] + r[1] + r[2]))
                     .epsilon(1e-10));
  }
}

TEST_CASE("identity dynamics features reduce to the initial state") {
  Rng rng(28);
  ProcessInstance inst = make_instance(2, 1, 0.0, rng);
  const auto features = generate_features(inst);
  const DensityMatrix sys = partial_trace(inst.rho0, {0});
  const Eigen::Vector2cd zp = basis_state(3);
  const double want = std::real(zp.dot(sys.mat * zp));
  CHECK(features[feature_index(0, 0, 0, 3)] ==
        doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("sigma_x under identity dynamics flips z+ to z-") {
  Rng rng(29);
  ProcessInstance inst = make_instance(1, 1, 0.0, rng);
  inst.rho0 = projector_z_plus(1);
  const auto features = generate_features(inst);
  CHECK(features[feature_index(1, 0, 0, 3)] == doctest::Approx(0.0));
  CHECK(features[feature_index(0, 0, 0, 3)] == doctest::Approx(1.0));
}

TEST_CASE("prefix-tree and naive evaluation agree") {
  Rng rng(30);
  for (int trial = 0; trial < 3; ++trial) {
    const ProcessInstance inst = make_instance(2, 2, 0.9, rng);
    const auto fast = generate_features(inst, FeatureStrategy::kPrefixTree);
    const auto slow = generate_features(inst, FeatureStrategy::kNaive);
    for (int i = 0; i < kNumFeatures; ++i)
      CHECK(std::abs(fast[i] - slow[i]) < 1e-12);
  }
}

TEST_CASE("all features lie in [0,1] and triples obey the Bloch bound") {
  Rng rng(31);
  const ProcessInstance inst = make_instance(4, 4, 1.0, rng);
  const auto features = generate_features(inst);
  for (double p : features) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
  for (int seq = 0; seq < 64; ++seq) {
    const double sum =
        features[seq * 3] + features[seq * 3 + 1] + features[seq * 3 + 2];
    CHECK(sum >= kBlochLow - 1e-12);
    CHECK(sum <= kBlochHigh + 1e-12);
  }
}

TEST_CASE("markovian case equals the computation without the E2 factor") {
  Rng rng(32);
  for (int k1 : {1, 2, 3}) {
    const ProcessInstance inst = make_instance(k1, 1, 1.0, rng);
    const auto got = generate_features(inst);
    const auto want =
        oracles::features_no_e2(inst.v.mat, inst.rho0.mat, k1);
    for (int i = 0; i < kNumFeatures; ++i)
      CHECK(std::abs(got[i] - want[i]) < 1e-12);
  }
}

TEST_CASE("feature names follow the digit-string convention") {
  CHECK(feature_name(0) == "p_0001");
  CHECK(feature_name(1) == "p_0002");
  CHECK(feature_name(2) == "p_0003");
  CHECK(feature_name(3) == "p_0011");
  CHECK(feature_name(kNumFeatures - 1) == "p_3333");
  CHECK(feature_index(3, 3, 3, 3) == kNumFeatures - 1);
}
