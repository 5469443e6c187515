#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "nmdim/sampling.hpp"

using namespace nmdim;

TEST_CASE("haar sample at dim 1 is a unit-modulus scalar") {
  Rng rng(1);
  const UnitaryMatrix u = sample_haar_unitary(1, rng);
  CHECK(std::abs(std::abs(u.mat(0, 0)) - 1.0) < 1e-12);
}

TEST_CASE("haar samples are unitary") {
  Rng rng(2);
  for (Eigen::Index dim : {2, 3, 7}) {
    const UnitaryMatrix u = sample_haar_unitary(dim, rng);
    CHECK(is_unitary(u.mat, 1e-10));
  }
}

TEST_CASE("haar trace moment is roughly 1 at dim 2") {
  Rng rng(3);
  double acc = 0.0;
  const int n = 5000;
  for (int i = 0; i < n; ++i)
    acc += std::norm(sample_haar_unitary(2, rng).mat.trace());
  CHECK(acc / n == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("evolution unitary at phi 0 is exactly the identity") {
  Rng rng(4);
  for (Eigen::Index dim : {1, 2, 8}) {
    const UnitaryMatrix v = sample_evolution_unitary(dim, 0.0, rng);
    CHECK((v.mat - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("evolution unitary eigenphases stay within the phi window") {
  Rng rng(5);
  const double phi = 0.3;
  const UnitaryMatrix v = sample_evolution_unitary(6, phi, rng);
  CHECK(is_unitary(v.mat, 1e-10));
  Eigen::ComplexEigenSolver<CMatrix> es(v.mat);
  for (Eigen::Index i = 0; i < 6; ++i) {
    double arg = std::arg(es.eigenvalues()(i));
    if (arg < -1e-10) arg += 2.0 * M_PI;
    CHECK(arg >= -1e-10);
    CHECK(arg <= 2.0 * M_PI * phi + 1e-10);
  }
}

TEST_CASE("evolution unitary at phi 1 is unitary") {
  Rng rng(6);
  const UnitaryMatrix v = sample_evolution_unitary(4, 1.0, rng);
  CHECK(is_unitary(v.mat, 1e-10));
}

TEST_CASE("evolution unitary rejects phi outside [0,1]") {
  Rng rng(7);
  CHECK_THROWS_AS(sample_evolution_unitary(2, -0.1, rng), ParamError);
  CHECK_THROWS_AS(sample_evolution_unitary(2, 1.5, rng), ParamError);
}

TEST_CASE("ginibre sample at dim 1 is the scalar 1") {
  Rng rng(8);
  const DensityMatrix rho = sample_ginibre_density(1, rng);
  CHECK(std::abs(rho.mat(0, 0) - Complex{1.0, 0.0}) < 1e-14);
}

TEST_CASE("ginibre samples satisfy the density-matrix contract") {
  Rng rng(9);
  for (Eigen::Index dim : {2, 4, 8}) {
    const DensityMatrix rho = sample_ginibre_density(dim, rng);
    CHECK(std::abs(rho.mat.trace() - Complex{1.0, 0.0}) < 1e-12);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.mat, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    CHECK(is_valid_density(rho));
  }
}

TEST_CASE("sampling is a pure function of the seed") {
  Rng a(42), b(42);
  const UnitaryMatrix ua = sample_haar_unitary(3, a);
  const UnitaryMatrix ub = sample_haar_unitary(3, b);
  CHECK((ua.mat - ub.mat).cwiseAbs().maxCoeff() == 0.0);
  const DensityMatrix ra = sample_ginibre_density(4, a);
  const DensityMatrix rb = sample_ginibre_density(4, b);
  CHECK((ra.mat - rb.mat).cwiseAbs().maxCoeff() == 0.0);
}
