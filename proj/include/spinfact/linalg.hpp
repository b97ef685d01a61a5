#pragma once

// Thin Eigen wrappers for the small dense problems the algorithms reduce to:
// kernels of complex matrices, real kernels, and least-squares solves.

#include <Eigen/Dense>

#include "cga.hpp"

namespace spinfact {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Orthonormal kernel basis (columns) of A: right singular vectors whose
// singular values fall below rel_tol * sigma_max (or are absent entirely
// when A has more columns than rank).
inline CMat kernel_basis(const CMat& A, double rel_tol = 1e-8) {
  Eigen::JacobiSVD<CMat> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv.size() > 0 ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * std::max(smax, 1e-300)) ++rank;
  return svd.matrixV().rightCols(A.cols() - rank);
}

inline RMat kernel_basis_real(const RMat& A, double rel_tol = 1e-8) {
  Eigen::JacobiSVD<RMat> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv.size() > 0 ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * std::max(smax, 1e-300)) ++rank;
  return svd.matrixV().rightCols(A.cols() - rank);
}

// Minimum-norm least-squares solution of A x = b.
inline RVec lstsq(const RMat& A, const RVec& b) {
  return A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
}

// Real vectors in the column span of a complex basis K: solutions of
// Im(K c) = 0 mapped back through Re(K c). Columns are orthonormalized;
// near-zero vectors are dropped.
inline std::vector<CVec> real_span_vectors(const CMat& K, double rel_tol = 1e-8) {
  if (K.cols() == 0) return {};
  const int n = static_cast<int>(K.rows());
  const int k = static_cast<int>(K.cols());
  RMat M(n, 2 * k);  // Im(K) a + Re(K) b = 0 for c = a + i b
  M.leftCols(k) = K.imag();
  M.rightCols(k) = K.real();
  RMat ker = kernel_basis_real(M, rel_tol);
  std::vector<CVec> out;
  RMat collected(n, ker.cols());
  int cnt = 0;
  for (int j = 0; j < ker.cols(); ++j) {
    RVec a = ker.col(j).head(k), b = ker.col(j).tail(k);
    RVec x = K.real() * a - K.imag() * b;
    if (x.norm() < rel_tol) continue;
    // Gram-Schmidt against the ones already kept.
    for (int i = 0; i < cnt; ++i) x -= collected.col(i).dot(x) * collected.col(i);
    if (x.norm() < rel_tol) continue;
    x.normalize();
    collected.col(cnt++) = x;
  }
  for (int i = 0; i < cnt; ++i) {
    CVec v(n);
    for (int r = 0; r < n; ++r) v(r) = Scalar(collected(r, i), 0.0);
    out.push_back(v);
  }
  return out;
}

}  // namespace spinfact
