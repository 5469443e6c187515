#include <doctest.h>

#include "nmdim/linalg.hpp"
#include "nmdim/rng.hpp"
#include "oracles.hpp"

using namespace nmdim;

namespace {

CMatrix random_matrix(Eigen::Index n, Rng& rng) {
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rng.complex_gaussian();
  return m;
}

DensityMatrix random_density(const std::vector<Eigen::Index>& dims, Rng& rng) {
  Eigen::Index d = 1;
  for (auto x : dims) d *= x;
  const CMatrix a = random_matrix(d, rng);
  CMatrix m = a * a.adjoint();
  m /= m.trace();
  return {m, dims};
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("kron identity factors") {
  const CMatrix i2 = CMatrix::Identity(2, 2);
  const CMatrix i3 = CMatrix::Identity(3, 3);
  CHECK(max_abs_diff(kron(i2, i3), CMatrix::Identity(6, 6)) == 0.0);
}

TEST_CASE("kron of sigma_x with itself squares to identity") {
  CMatrix sx{{0, 1}, {1, 0}};
  const CMatrix k = kron(sx, sx);
  CHECK(max_abs_diff(k * k, CMatrix::Identity(4, 4)) < 1e-14);
}

TEST_CASE("kron mixed-product identity against index-wise oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix a = random_matrix(2, rng), b = random_matrix(2, rng);
    const CMatrix c = random_matrix(2, rng), d = random_matrix(2, rng);
    CHECK(max_abs_diff(kron(a, b) * kron(c, d),
                       oracles::kron_ref(a * c, b * d)) < 1e-12);
  }
}

TEST_CASE("kron associativity") {
  Rng rng(12);
  const CMatrix a = random_matrix(2, rng), b = random_matrix(3, rng),
                c = random_matrix(2, rng);
  CHECK(max_abs_diff(kron(kron(a, b), c), kron(a, kron(b, c))) < 1e-12);
}

TEST_CASE("partial trace of a product state recovers the first factor") {
  Rng rng(13);
  const DensityMatrix a = random_density({2}, rng);
  const DensityMatrix b = random_density({3}, rng);
  const DensityMatrix joint{kron(a.mat, b.mat), {2, 3}};
  const DensityMatrix reduced = partial_trace(joint, {0});
  CHECK(max_abs_diff(reduced.mat, a.mat) < 1e-12);
  CHECK(reduced.dims == std::vector<Eigen::Index>{2});
}

TEST_CASE("partial trace of a Bell state is maximally mixed") {
  Eigen::Vector4cd phi_plus;
  phi_plus << M_SQRT1_2, 0, 0, M_SQRT1_2;
  const DensityMatrix bell{phi_plus * phi_plus.adjoint(), {2, 2}};
  const DensityMatrix reduced = partial_trace(bell, {0});
  CHECK(max_abs_diff(reduced.mat, 0.5 * CMatrix::Identity(2, 2)) < 1e-14);
}

TEST_CASE("partial trace on 2x3x2 matches the brute-force index sum") {
  Rng rng(14);
  for (int trial = 0; trial < 5; ++trial) {
    const DensityMatrix rho = random_density({2, 3, 2}, rng);
    const DensityMatrix got = partial_trace(rho, {0, 2});
    const CMatrix want = oracles::partial_trace_ref(rho.mat, rho.dims, {0, 2});
    CHECK(max_abs_diff(got.mat, want) < 1e-12);
    CHECK(std::abs(got.mat.trace() - Complex{1.0, 0.0}) < 1e-12);
    CHECK(got.dims == std::vector<Eigen::Index>{2, 2});
  }
}

TEST_CASE("partial trace composes to the full trace") {
  Rng rng(15);
  const DensityMatrix rho = random_density({2, 2, 3}, rng);
  const DensityMatrix first = partial_trace(rho, {1});
  CHECK(std::abs(first.mat.trace() - rho.mat.trace()) < 1e-12);
}

TEST_CASE("partial trace rejects bad subsystem indices") {
  Rng rng(16);
  const DensityMatrix rho = random_density({2, 2}, rng);
  CHECK_THROWS_AS(partial_trace(rho, {2}), DimensionError);
  CHECK_THROWS_AS(partial_trace(rho, {}), DimensionError);
}

TEST_CASE("unitary conjugation preserves density invariants") {
  Rng rng(17);
  const DensityMatrix rho = random_density({4}, rng);
  CMatrix g = random_matrix(4, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  const CMatrix u = qr.householderQ();
  const DensityMatrix conj{u * rho.mat * u.adjoint(), {4}};
  CHECK(is_valid_density(conj));
  Eigen::SelfAdjointEigenSolver<CMatrix> es1(rho.mat), es2(conj.mat);
  CHECK((es1.eigenvalues() - es2.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
}
