#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <vector>

namespace rigidity {

using cplx = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using MatR = Eigen::MatrixXd;
using VecR = Eigen::VectorXd;
using SpMatC = Eigen::SparseMatrix<cplx>;

inline constexpr cplx I_unit{0.0, 1.0};

/// Real inner product Re tr(X Y^*) on complex matrices, viewed as a real
/// vector space.
inline double real_frobenius(const MatC& x, const MatC& y) {
  return (x.array() * y.conjugate().array()).real().sum();
}

/// Modified Gram-Schmidt (two passes) with respect to real_frobenius.
/// Directions whose residual norm falls below `tol` are dropped, so the result
/// is an orthonormal basis of the real span of `span`.
inline std::vector<MatC> orthonormalize(const std::vector<MatC>& span, double tol = 1e-10) {
  std::vector<MatC> basis;
  for (const auto& v : span) {
    MatC w = v;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) w -= real_frobenius(w, b) * b;
    }
    const double norm = std::sqrt(real_frobenius(w, w));
    if (norm > tol) basis.push_back(w / norm);
  }
  return basis;
}

inline MatC commutator(const MatC& a, const MatC& b) { return a * b - b * a; }

/// Orthonormal basis (columns) of the null space of a real matrix, from the
/// right singular vectors whose singular values are below `tol`·σ_max.
inline MatR null_space(const MatR& m, double tol = 1e-10) {
  Eigen::JacobiSVD<MatR> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > tol * std::max(1.0, smax)) ++rank;
  }
  return svd.matrixV().rightCols(m.cols() - rank);
}

/// Numerical rank of a complex matrix (relative singular value cut).
inline int numerical_rank(const MatC& m, double rel_tol = 1e-9) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<MatC> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > rel_tol * s(0)) ++rank;
  }
  return rank;
}

/// Orthonormal basis (columns) of the column space of `m` with respect to the
/// standard Hermitian inner product.
inline MatC column_space(const MatC& m, double rel_tol = 1e-9) {
  if (m.cols() == 0 || m.rows() == 0) return MatC(m.rows(), 0);
  Eigen::JacobiSVD<MatC> svd(m, Eigen::ComputeThinU);
  const int r = numerical_rank(m, rel_tol);
  return svd.matrixU().leftCols(r);
}

}  // namespace rigidity
