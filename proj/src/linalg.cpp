#include "nmdim/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>

namespace nmdim {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

namespace {

// Strides of a row-major multi-index over dims.
std::vector<Eigen::Index> strides_of(const std::vector<Eigen::Index>& dims) {
  std::vector<Eigen::Index> s(dims.size());
  Eigen::Index acc = 1;
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    s[k] = acc;
    acc *= dims[k];
  }
  return s;
}

}  // namespace

DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<int>& keep) {
  const int nsub = static_cast<int>(rho.dims.size());
  if (keep.empty()) throw DimensionError("partial_trace: empty keep set");
  std::vector<bool> kept(nsub, false);
  for (int k : keep) {
    if (k < 0 || k >= nsub)
      throw DimensionError("partial_trace: subsystem index out of range");
    kept[k] = true;
  }

  const auto stride = strides_of(rho.dims);
  std::vector<Eigen::Index> keep_dims, keep_stride, tr_dims, tr_stride;
  for (int k = 0; k < nsub; ++k) {
    if (kept[k]) {
      keep_dims.push_back(rho.dims[k]);
      keep_stride.push_back(stride[k]);
    } else {
      tr_dims.push_back(rho.dims[k]);
      tr_stride.push_back(stride[k]);
    }
  }
  const Eigen::Index dk = std::accumulate(keep_dims.begin(), keep_dims.end(),
                                          Eigen::Index{1}, std::multiplies<>());
  const Eigen::Index dt = std::accumulate(tr_dims.begin(), tr_dims.end(),
                                          Eigen::Index{1}, std::multiplies<>());

  // Flat offset contributed by the a-th multi-index over dims with strides.
  auto offset = [](Eigen::Index a, const std::vector<Eigen::Index>& dims,
                   const std::vector<Eigen::Index>& str) {
    Eigen::Index off = 0;
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
      off += (a % dims[k]) * str[k];
      a /= dims[k];
    }
    return off;
  };

  std::vector<Eigen::Index> keep_off(dk), tr_off(dt);
  for (Eigen::Index a = 0; a < dk; ++a) keep_off[a] = offset(a, keep_dims, keep_stride);
  for (Eigen::Index t = 0; t < dt; ++t) tr_off[t] = offset(t, tr_dims, tr_stride);

  CMatrix out = CMatrix::Zero(dk, dk);
  for (Eigen::Index a = 0; a < dk; ++a)
    for (Eigen::Index b = 0; b < dk; ++b) {
      Complex sum = 0;
      for (Eigen::Index t = 0; t < dt; ++t)
        sum += rho.mat(keep_off[a] + tr_off[t], keep_off[b] + tr_off[t]);
      out(a, b) = sum;
    }
  return {std::move(out), std::move(keep_dims)};
}

bool is_valid_density(const DensityMatrix& rho, double tol) {
  const auto& m = rho.mat;
  if (m.rows() != m.cols()) return false;
  Eigen::Index prod = 1;
  for (auto d : rho.dims) prod *= d;
  if (prod != m.rows()) return false;
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(m.trace() - Complex{1.0, 0.0}) > tol) return false;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

bool is_unitary(const CMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  const CMatrix gram = u.adjoint() * u;
  return (gram - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <=
         tol;
}

}  // namespace nmdim
