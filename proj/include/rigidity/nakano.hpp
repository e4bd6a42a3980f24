#pragma once

// Tangent-valued (0,q)-forms at the base point: the curvature term
// i h(Lambda F w, w), the Hermitian form h_Q, and the pointwise certificate
//   i h(Lambda F w, w) = R/(2n) |w|^2 - h_Q(w, w)
//   h_Q(w, w) >= (q+1)/2 * lambda * |w|^2.

#include "rigidity/curvature.hpp"
#include "rigidity/exterior.hpp"

#include <random>
#include <string>

namespace rigidity {

/// F ^ w for w a T-valued (0,q)-form: sum c(j,k,l,m) w_{K,l} dz_j ^ dzbar_k ^ dzbar_K (x) e_m.
inline FormVector curvature_wedge(const CurvatureTensor& curv, const FormVector& w) {
  const int n = curv.n();
  if (w.n != n || w.p != 0 || w.rank() != n)
    throw DegreeMismatch("curvature_wedge expects a T-valued (0,q)-form on the same domain");
  const FormSpace from(n, 0, w.q), to(n, 1, w.q + 1);
  FormVector out = FormVector::zero(n, 1, w.q + 1, n);
  for (int i = 0; i < from.dim(); ++i) {
    const Mask mk = from.mask(i);
    for (int k = 0; k < n; ++k) {
      const int s1 = wedge_sign(mk, n + k);
      if (s1 == 0) continue;
      const Mask m1 = mk | (Mask{1} << (n + k));
      for (int j = 0; j < n; ++j) {
        const int s2 = wedge_sign(m1, j);  // never zero: holomorphic bit is free
        const int row = to.index_of(m1 | (Mask{1} << j));
        const double sign = s1 * s2;
        for (int l = 0; l < n; ++l) {
          const cplx wl = w.coeffs(i, l);
          if (wl == 0.0) continue;
          for (int m = 0; m < n; ++m) out.coeffs(row, m) += sign * curv(j, k, l, m) * wl;
        }
      }
    }
  }
  return out;
}

/// Lambda applied fiberwise to a vector-valued form.
inline FormVector apply_lambda(const FormVector& w) {
  if (w.p == 0 || w.q == 0) return FormVector::zero(w.n, std::max(w.p - 1, 0), std::max(w.q - 1, 0), w.rank());
  return {w.n, w.p - 1, w.q - 1, lambda_contraction(w.n, w.p, w.q) * w.coeffs};
}

/// i h_x(Lambda F w, w), computed through the exterior algebra.
inline cplx curvature_term(const CurvatureTensor& curv, const FormVector& w) {
  FormVector lf = apply_lambda(curvature_wedge(curv, w));
  lf.coeffs *= I_unit;
  return form_inner_product(lf, w);
}

/// Dense matrix of w -> i Lambda(F ^ w) on T-valued (0,q)-forms, with the
/// vectorization index (monomial * n + fiber). Assembled monomial by monomial:
/// Lambda(dz_j ^ M) = -i iota(dzbar_j) M for an antiholomorphic monomial M.
inline MatC curvature_term_operator(const CurvatureTensor& curv, int q) {
  const int n = curv.n();
  const FormSpace space(n, 0, q);
  const int dim = space.dim() * n;
  MatC op = MatC::Zero(dim, dim);
  for (int i = 0; i < space.dim(); ++i) {
    const Mask mk = space.mask(i);
    for (int k = 0; k < n; ++k) {
      const int s1 = wedge_sign(mk, n + k);
      if (s1 == 0) continue;
      const Mask m1 = mk | (Mask{1} << (n + k));
      for (int j = 0; j < n; ++j) {
        const int s3 = contract_sign(m1, n + j);
        if (s3 == 0) continue;
        const int row = space.index_of(m1 & ~(Mask{1} << (n + j)));
        const double sign = s1 * s3;
        for (int l = 0; l < n; ++l)
          for (int m = 0; m < n; ++m) op(row * n + m, i * n + l) += sign * curv(j, k, l, m);
      }
    }
  }
  return op;
}

namespace detail {

/// Tensors v_S(j, l) = w_{jS, l} for every sorted S of size q-1, where w_{jS}
/// is the antisymmetric extension of the sorted coefficients.
inline std::vector<VecC> contraction_slices(const FormVector& w) {
  const int n = w.n;
  const FormSpace space(n, 0, w.q);
  std::vector<VecC> slices;
  for (Mask s : FormSpace::subsets(n, w.q - 1)) {
    const Mask s_anti = s << n;
    VecC v = VecC::Zero(n * n);
    for (int j = 0; j < n; ++j) {
      const int sign = wedge_sign(s_anti, n + j);
      if (sign == 0) continue;
      const int idx = space.index_of(s_anti | (Mask{1} << (n + j)));
      for (int l = 0; l < n; ++l) v(j * n + l) = static_cast<double>(sign) * w.coeffs(idx, l);
    }
    slices.push_back(std::move(v));
  }
  return slices;
}

}  // namespace detail

/// h_Q(w, w) = sum_S <Q sym(v_S), sym(v_S)> with Q on the orthonormal S^2 basis.
inline double h_q_form(const QOperator& q_op, const FormVector& w) {
  if (w.q < 1) throw DegreeZero("h_Q is defined on (0,q)-forms with q >= 1");
  if (w.p != 0 || w.rank() != w.n || q_op.n != w.n) throw DegreeMismatch("h_Q expects a T-valued (0,q)-form");
  const MatC s = symmetric_basis(w.n);
  double total = 0.0;
  for (const auto& v : detail::contraction_slices(w)) {
    const VecC y = s.adjoint() * v;
    total += (y.adjoint() * q_op.matrix * y)(0).real();
  }
  return total;
}

/// h_Q with Q replaced by the identity: sum_S |sym(v_S)|^2.
inline double symmetric_contraction_norm(const FormVector& w) {
  if (w.q < 1) throw DegreeZero("contraction is defined for q >= 1");
  const MatC s = symmetric_basis(w.n);
  double total = 0.0;
  for (const auto& v : detail::contraction_slices(w)) total += (s.adjoint() * v).squaredNorm();
  return total;
}

/// Complex-Gaussian T-valued (0,q)-form from the stream (seed, index).
inline FormVector random_form(int n, int q, std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  FormVector w = FormVector::zero(n, 0, q, n);
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < w.coeffs.rows(); ++i)
    for (int l = 0; l < n; ++l) {
      const double re = normal(rng);
      const double im = normal(rng);
      w.coeffs(i, l) = cplx(re * s, im * s);
    }
  return w;
}

struct CVReport {
  int sample = 0;
  double norm2 = 0.0;
  double lhs = 0.0;           // i h(Lambda F w, w)
  double lhs_imag = 0.0;      // should vanish
  double h_q = 0.0;
  double rhs_identity = 0.0;  // R/(2n)|w|^2 - h_Q(w,w)
  double rhs_bound = 0.0;     // (R/(2n) - (q+1)lambda/2) |w|^2
  double identity_residual = 0.0;
  double bound_slack = 0.0;
  std::string sign_verdict;   // negative-definite | not-applicable | zero-form | sign-violation
};

struct CVCertification {
  std::string domain;
  int n = 0;
  int q = 0;
  double scalar_curvature = 0.0;
  double lambda = 0.0;
  double gamma = 0.0;
  double bound_coefficient = 0.0;  // R/(2n) - (q+1)lambda/2
  double tolerance = 1e-8;
  std::vector<CVReport> reports;
  double max_identity_residual = 0.0;  // scaled by max(1, |w|^2)
  double min_bound_slack = 0.0;        // scaled by max(1, |w|^2)
  bool all_signs_ok = true;

  bool passed() const {
    return max_identity_residual < tolerance && min_bound_slack >= -tolerance && all_signs_ok;
  }
};

/// Evaluates one form against precomputed domain data.
inline CVReport cv_evaluate(const CurvatureTensor& curv, const QOperator& q_op, double scalar_curvature,
                            double lambda, const FormVector& w, const MatC* term_operator = nullptr) {
  const int n = curv.n();
  CVReport rep;
  rep.norm2 = form_norm2(w);
  cplx lhs;
  if (term_operator) {
    VecC v(w.coeffs.size());
    for (int i = 0; i < w.coeffs.rows(); ++i)
      for (int l = 0; l < n; ++l) v(i * n + l) = w.coeffs(i, l);
    lhs = v.dot(*term_operator * v);  // v^* A v
  } else {
    lhs = curvature_term(curv, w);
  }
  rep.lhs = lhs.real();
  rep.lhs_imag = lhs.imag();
  rep.h_q = w.q >= 1 ? h_q_form(q_op, w) : 0.0;
  const double einstein = scalar_curvature / (2.0 * n);
  rep.rhs_identity = einstein * rep.norm2 - rep.h_q;
  const double coeff = einstein - 0.5 * (w.q + 1) * lambda;
  rep.rhs_bound = coeff * rep.norm2;
  rep.identity_residual = std::abs(lhs - cplx(rep.rhs_identity, 0.0));
  rep.bound_slack = rep.rhs_bound - rep.lhs;
  if (std::sqrt(rep.norm2) < 1e-6) {
    rep.sign_verdict = "zero-form";
  } else if (coeff < -1e-9 * (std::abs(einstein) + std::abs(lambda))) {
    rep.sign_verdict = rep.lhs < 0 ? "negative-definite" : "sign-violation";
  } else {
    rep.sign_verdict = "not-applicable";
  }
  return rep;
}

/// Certifies the curvature identity and bound on `samples` seeded random forms.
inline CVCertification cv_certify(const DomainSpec& spec, int q, int samples, std::uint64_t seed,
                                  double tol = 1e-8) {
  if (spec.factors.size() != 1 || !spec.factors.front().is_classical())
    throw UnsupportedDomain("cv_certify needs a single classical factor, got '" + spec.to_string() + "'");
  const HermitianPair pair = build_domain(spec);
  const int n = pair.n;
  if (q < 0 || q > n)
    throw DegreeOutOfRange("q = " + std::to_string(q) + " outside [0, " + std::to_string(n) + "]");
  if (samples < 1) throw DegreeOutOfRange("samples must be >= 1");

  const CurvatureTensor curv = curvature_tensor(pair);
  const QOperator q_op = q_operator(curv);
  CVCertification cert;
  cert.domain = spec.to_string();
  cert.n = n;
  cert.q = q;
  cert.tolerance = tol;
  cert.scalar_curvature = 2.0 * q_op.trace();
  cert.lambda = q_op.smallest_eigenvalue();
  cert.gamma = cert.scalar_curvature / (n * cert.lambda);
  cert.bound_coefficient = cert.scalar_curvature / (2.0 * n) - 0.5 * (q + 1) * cert.lambda;
  const MatC op = curvature_term_operator(curv, q);

  cert.min_bound_slack = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const FormVector w = random_form(n, q, seed, static_cast<std::uint64_t>(s));
    CVReport rep = cv_evaluate(curv, q_op, cert.scalar_curvature, cert.lambda, w, &op);
    rep.sample = s;
    const double scale = std::max(1.0, rep.norm2);
    cert.max_identity_residual = std::max(cert.max_identity_residual, rep.identity_residual / scale);
    cert.min_bound_slack = std::min(cert.min_bound_slack, rep.bound_slack / scale);
    if (rep.sign_verdict == "sign-violation") cert.all_signs_ok = false;
    cert.reports.push_back(std::move(rep));
  }
  return cert;
}

}  // namespace rigidity
