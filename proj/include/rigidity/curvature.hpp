#pragma once

// Base-point curvature of a Hermitian symmetric pair, the operator Q on
// S^2(p^{1,0}), and the rigidity constant gamma = R / (n * lambda).

#include "rigidity/domains.hpp"

#include <limits>
#include <optional>

namespace rigidity {

/// Components c(j,k,l,m) = R_{j kbar l mbar} = g(R(e_j, ebar_k) e_l, ebar_m) in
/// an orthonormal frame e_1..e_n of p^{1,0}, with R(X,Y)Z = -[[X,Y],Z].
class CurvatureTensor {
 public:
  CurvatureTensor() = default;
  explicit CurvatureTensor(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n * n) {}

  int n() const { return n_; }
  cplx& operator()(int j, int k, int l, int m) { return data_[index(j, k, l, m)]; }
  cplx operator()(int j, int k, int l, int m) const { return data_[index(j, k, l, m)]; }

  /// Kahler scalar sum_{j,l} R_{j jbar l lbar}.
  double kahler_scalar() const {
    cplx s = 0.0;
    for (int j = 0; j < n_; ++j)
      for (int l = 0; l < n_; ++l) s += (*this)(j, j, l, l);
    return s.real();
  }

  /// Ricci form sum_j R_{j jbar l mbar} as an n x n matrix (l, m).
  MatC ricci() const {
    MatC r = MatC::Zero(n_, n_);
    for (int j = 0; j < n_; ++j)
      for (int l = 0; l < n_; ++l)
        for (int m = 0; m < n_; ++m) r(l, m) += (*this)(j, j, l, m);
    return r;
  }

  /// max |R_{j kbar l mbar} - conj(R_{k jbar m lbar})|
  double hermitian_residual() const {
    double worst = 0.0;
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        for (int l = 0; l < n_; ++l)
          for (int m = 0; m < n_; ++m)
            worst = std::max(worst, std::abs((*this)(j, k, l, m) - std::conj((*this)(k, j, m, l))));
    return worst;
  }

  /// max |R_{j kbar l mbar} - R_{l kbar j mbar}|
  double kahler_residual() const {
    double worst = 0.0;
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        for (int l = 0; l < n_; ++l)
          for (int m = 0; m < n_; ++m)
            worst = std::max(worst, std::abs((*this)(j, k, l, m) - (*this)(l, k, j, m)));
    return worst;
  }

 private:
  std::size_t index(int j, int k, int l, int m) const {
    return ((static_cast<std::size_t>(j) * n_ + k) * n_ + l) * n_ + m;
  }
  int n_ = 0;
  std::vector<cplx> data_;
};

/// Orthonormal frame of p^{1,0} for G = scale * base_metric, as columns of
/// p-coordinates.
inline MatC orthonormal_frame(const HermitianPair& pair, double scale = 1.0) {
  const MatC h = invariant_metric(pair, scale);
  Eigen::LLT<MatC> llt(h);
  if (llt.info() != Eigen::Success) throw DegenerateMetric(pair.factor.to_string() + ": metric on p10 is not positive");
  // h = L L^*; columns of B L^{-T} are orthonormal for h(u,v) = u^T G conj(v).
  const MatC l_inv_t = llt.matrixL().solve(MatC::Identity(pair.n, pair.n)).transpose();
  return pair.p10_basis * l_inv_t;
}

inline CurvatureTensor curvature_tensor(const HermitianPair& pair, double scale = 1.0) {
  const int n = pair.n, dk = pair.dim_k(), dp = pair.dim_p();
  const MatC frame = orthonormal_frame(pair, scale);
  const MatC g = (scale * pair.base_metric).cast<cplx>();
  const auto& f = pair.bracket;

  // ad(e_j): p -> k as a dk x dp matrix.
  std::vector<MatC> ad_e(n, MatC::Zero(dk, dp));
  for (int j = 0; j < n; ++j)
    for (int a = 0; a < dp; ++a) {
      const cplx ea = frame(a, j);
      if (ea == 0.0) continue;
      for (int b = 0; b < dp; ++b)
        for (int c = 0; c < dk; ++c) ad_e[j](c, b) += ea * f(dk + a, dk + b, c);
    }
  // ad(k_c) on p.
  std::vector<MatC> ad_k(dk);
  for (int c = 0; c < dk; ++c) ad_k[c] = ad_k_on_p(pair, c).cast<cplx>();

  const MatC frame_bar = frame.conjugate();
  const MatC g_frame_bar = g * frame_bar;  // column m: G conj(e_m)
  CurvatureTensor out(n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const VecC kappa = ad_e[j] * frame_bar.col(k);  // [e_j, ebar_k] in k_C
      MatC ad_kappa = MatC::Zero(dp, dp);
      for (int c = 0; c < dk; ++c)
        if (kappa(c) != 0.0) ad_kappa += kappa(c) * ad_k[c];
      const MatC w = ad_kappa * frame;  // column l: [[e_j, ebar_k], e_l]
      const MatC vals = -(w.transpose() * g_frame_bar);  // (l, m)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) out(j, k, l, m) = vals(l, m);
    }
  return out;
}

/// Riemannian scalar curvature from the real double bracket on p, contracted
/// with G^{-1} twice. Independent of the complex frame.
inline double riemannian_scalar_curvature(const HermitianPair& pair, double scale = 1.0) {
  const int dk = pair.dim_k(), dp = pair.dim_p();
  const MatR g = scale * pair.base_metric;
  const MatR g_inv = g.inverse();
  const auto& f = pair.bracket;
  // Rm(a,b,c,d) = g(R(x_a,x_b)x_c, x_d) = -g([[x_a,x_b],x_c], x_d)
  double scal = 0.0;
  VecR w(dp);
  for (int a = 0; a < dp; ++a)
    for (int b = 0; b < dp; ++b)
      for (int c = 0; c < dp; ++c) {
        if (g_inv(b, c) == 0.0) continue;
        w.setZero();
        for (int e = 0; e < dk; ++e) {
          const double fe = f(dk + a, dk + b, e);
          if (fe == 0.0) continue;
          for (int h = 0; h < dp; ++h) w(h) += fe * f(e, dk + c, dk + h);
        }
        const VecR gw = g * w;
        for (int d = 0; d < dp; ++d) scal += g_inv(a, d) * g_inv(b, c) * (-gw(d));
      }
  return scal;
}

/// Endomorphism of T (x) T: M[(k,m),(j,l)] = R_{j kbar l mbar}. Row/column
/// index of e_a (x) e_b is a*n + b.
inline MatC curvature_lift(const CurvatureTensor& r) {
  const int n = r.n();
  MatC m(n * n, n * n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int mm = 0; mm < n; ++mm) m(k * n + mm, j * n + l) = r(j, k, l, mm);
  return m;
}

/// Orthonormal basis of S^2 inside T (x) T: e_i(x)e_i and (e_i(x)e_k + e_k(x)e_i)/sqrt2,
/// i < k, in row-major pair order.
inline MatC symmetric_basis(int n) {
  const int dim = n * (n + 1) / 2;
  MatC s = MatC::Zero(n * n, dim);
  int col = 0;
  for (int i = 0; i < n; ++i)
    for (int k = i; k < n; ++k, ++col) {
      if (i == k) {
        s(i * n + i, col) = 1.0;
      } else {
        s(i * n + k, col) = 1.0 / std::sqrt(2.0);
        s(k * n + i, col) = 1.0 / std::sqrt(2.0);
      }
    }
  return s;
}

struct QOperator {
  MatC matrix;  // N x N on the orthonormal S^2 basis, N = n(n+1)/2
  int n = 0;
  double self_adjoint_residual = 0.0;
  double skew_residual = 0.0;

  double trace() const { return matrix.trace().real(); }
  VecR eigenvalues() const { return Eigen::SelfAdjointEigenSolver<MatC>(matrix).eigenvalues(); }
  double smallest_eigenvalue() const { return eigenvalues()(0); }
};

/// max over i<j of ||lift(e_i (x) e_j - e_j (x) e_i)||.
inline double skew_annihilation_residual(const MatC& lift, int n) {
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      VecC v = VecC::Zero(n * n);
      v(i * n + j) = 1.0;
      v(j * n + i) = -1.0;
      worst = std::max(worst, (lift * v).norm());
    }
  return worst;
}

inline QOperator q_operator(const CurvatureTensor& tensor) {
  const int n = tensor.n();
  const MatC lift = curvature_lift(tensor);
  QOperator q;
  q.n = n;
  q.skew_residual = skew_annihilation_residual(lift, n);
  if (q.skew_residual > 1e-8)
    throw SymmetryViolation("curvature lift does not vanish on skew tensors (residual " +
                            std::to_string(q.skew_residual) + ")");
  const MatC s = symmetric_basis(n);
  q.matrix = s.adjoint() * lift * s;
  q.self_adjoint_residual = (q.matrix - q.matrix.adjoint()).cwiseAbs().maxCoeff();
  return q;
}

struct DomainInvariants {
  std::string domain;
  int n = 0;
  std::optional<double> scalar_curvature;  // absent for products and reference factors
  std::optional<double> lambda;
  double gamma = 0.0;
  int gamma_rounded = 0;   // nearest integer when within 1e-6, else 0
  int vanishing_max_q = -1;
  bool all_groups_vanish = false;  // unit ball I(p,1) / I(1,q)
  bool reference_only = false;     // value comes from stored constants
  std::vector<DomainInvariants> factors;  // populated for products
};

/// Exact-integer snap used in reports.
inline int snap_gamma(double gamma) {
  const double r = std::round(gamma);
  return std::abs(gamma - r) < 1e-6 ? static_cast<int>(r) : 0;
}

/// Largest integer q with q < gamma - 1.
inline int vanishing_max_q(double gamma) {
  const int snapped = snap_gamma(gamma);
  if (snapped != 0) return snapped - 2;
  return static_cast<int>(std::ceil(gamma - 1.0)) - 1;
}

inline bool is_unit_ball(const DomainFactor& f) {
  return f.type == DomainType::I && (f.p == 1 || f.q == 1);
}

/// Invariants of one factor at metric scale `scale`.
inline DomainInvariants factor_invariants(const DomainFactor& f, double scale = 1.0) {
  check_parameters(f);
  DomainInvariants inv;
  inv.domain = f.to_string();
  if (!f.is_classical()) {
    inv.n = dimension_formula(f);
    inv.gamma = gamma_closed_form(f);
    inv.reference_only = true;
  } else {
    const HermitianPair pair = build_domain(f);
    const CurvatureTensor tensor = curvature_tensor(pair, scale);
    const QOperator q = q_operator(tensor);
    inv.n = pair.n;
    inv.scalar_curvature = 2.0 * q.trace();
    inv.lambda = q.smallest_eigenvalue();
    inv.gamma = *inv.scalar_curvature / (inv.n * *inv.lambda);
  }
  inv.gamma_rounded = snap_gamma(inv.gamma);
  inv.vanishing_max_q = vanishing_max_q(inv.gamma);
  inv.all_groups_vanish = is_unit_ball(f);
  return inv;
}

/// Invariants of a (possibly product) domain: gamma is the minimum over
/// factors, n the sum of factor dimensions.
inline DomainInvariants domain_invariants(const DomainSpec& spec, double scale = 1.0) {
  if (spec.factors.empty()) throw ParseError("empty domain spec");
  if (spec.factors.size() == 1) return factor_invariants(spec.factors.front(), scale);
  DomainInvariants inv;
  inv.domain = spec.to_string();
  inv.gamma = std::numeric_limits<double>::infinity();
  for (const auto& f : spec.factors) {
    inv.factors.push_back(factor_invariants(f, scale));
    const auto& fi = inv.factors.back();
    inv.n += fi.n;
    inv.gamma = std::min(inv.gamma, fi.gamma);
    inv.reference_only = inv.reference_only || fi.reference_only;
  }
  inv.gamma_rounded = snap_gamma(inv.gamma);
  inv.vanishing_max_q = vanishing_max_q(inv.gamma);
  return inv;
}

/// gamma == 2 exactly when some factor is I(1,1) = II(2) = III(1).
inline bool has_degenerate_factor(const DomainSpec& spec) {
  return std::any_of(spec.factors.begin(), spec.factors.end(), [](const DomainFactor& f) {
    return (f.type == DomainType::I && f.p == 1 && f.q == 1) || (f.type == DomainType::II && f.m == 2) ||
           (f.type == DomainType::III && f.m == 1);
  });
}

struct GammaRow {
  DomainFactor factor;
  int n = 0;
  double gamma = 0.0;
  int gamma_reference = 0;
  bool reference = false;  // stored constant, not computed
  bool match = false;
};

/// Classical domains with parameters bounded by `max_rank` (I: p+q, others: m)
/// and n <= max_dim, in the order I, II, III, IV, then V and VI.
inline std::vector<DomainFactor> table_domains(int max_rank, int max_dim = 30) {
  std::vector<DomainFactor> out;
  auto keep = [&](const DomainFactor& f) {
    if (dimension_formula(f) <= max_dim) out.push_back(f);
  };
  for (int s = 2; s <= max_rank; ++s)
    for (int p = 1; p < s; ++p) keep(DomainFactor::type_I(p, s - p));
  for (int m = 2; m <= max_rank; ++m) keep(DomainFactor::type_II(m));
  for (int m = 1; m <= max_rank; ++m) keep(DomainFactor::type_III(m));
  for (int m = 3; m <= max_rank; ++m) keep(DomainFactor::type_IV(m));
  return out;
}

inline std::vector<GammaRow> gamma_table(int max_rank) {
  std::vector<GammaRow> rows;
  for (const auto& f : table_domains(max_rank)) {
    const auto inv = factor_invariants(f);
    GammaRow row;
    row.factor = f;
    row.n = inv.n;
    row.gamma = inv.gamma;
    row.gamma_reference = gamma_closed_form(f);
    row.match = std::abs(row.gamma - row.gamma_reference) < 1e-6 && row.n == dimension_formula(f);
    rows.push_back(row);
  }
  for (const auto& f : {DomainFactor::type_V(), DomainFactor::type_VI()}) {
    GammaRow row;
    row.factor = f;
    row.n = dimension_formula(f);
    row.gamma = gamma_closed_form(f);
    row.gamma_reference = gamma_closed_form(f);
    row.reference = true;
    row.match = true;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rigidity
