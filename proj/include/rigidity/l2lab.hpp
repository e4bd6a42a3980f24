#pragma once

// Discrete Dolbeault complex on the annulus eps < |z| < 1/2 with the Poincare
// metric g |dz|^2, g = 1/(|z|^2 log^2|z|^2). Forms of total degree 0, 1, 2:
//   C0 = functions, C1 = (1,0) + (0,1) forms, C2 = (1,1) forms, D = dbar.
// Basis elements are P(t) z^e times a form type, t = |z|^2, with the cutoff
// chi(t) = (1 - t/t_out)^2, t_out = 1/4, vanishing at the outer circle.
// Different (type, frequency) pairs are L2-orthogonal, so Gram matrices are
// block diagonal.

#include "rigidity/errors.hpp"
#include "rigidity/linalg.hpp"
#include "rigidity/quadrature.hpp"

#include <array>
#include <numbers>
#include <string>

namespace rigidity {

inline constexpr double kOuterRadius = 0.5;
inline constexpr double kCutoffT = kOuterRadius * kOuterRadius;
inline constexpr int kRadialPanels = 64;

enum class Radial { One, Cutoff, CutoffDerivative };
enum class FormType { Function, Dz, Dzbar, DzbarDz };

struct BasisElement {
  FormType type = FormType::Function;
  int exponent = 0;
  Radial radial = Radial::One;

  std::string to_string() const {
    static const char* radial_names[] = {"", "chi*", "chi'*"};
    static const char* type_names[] = {"", " dz", " dzbar", " dzbar^dz"};
    return std::string(radial_names[int(radial)]) + "z^" + std::to_string(exponent) + type_names[int(type)];
  }
};

inline double radial_profile(Radial r, double t) {
  switch (r) {
    case Radial::One: return 1.0;
    case Radial::Cutoff: return (1.0 - t / kCutoffT) * (1.0 - t / kCutoffT);
    case Radial::CutoffDerivative: return -(2.0 / kCutoffT) * (1.0 - t / kCutoffT);
  }
  return 0.0;
}

/// Poincare density g(r) = 1/(r^2 log^2 r^2).
inline double poincare_density(double r) {
  const double l = std::log(r * r);
  return 1.0 / (r * r * l * l);
}

/// Pointwise weight turning |coefficient|^2 dA into |form|^2 dvol.
inline double form_weight(FormType type, double r) {
  switch (type) {
    case FormType::Function: return poincare_density(r);
    case FormType::Dz:
    case FormType::Dzbar: return 1.0;
    case FormType::DzbarDz: return 1.0 / poincare_density(r);
  }
  return 0.0;
}

/// L2 inner product of two basis elements over eps < r < 1/2 by composite
/// Gauss-Legendre in s = log r.
inline double basis_inner_product(const BasisElement& a, const BasisElement& b, double epsilon, int order) {
  if (a.type != b.type || a.exponent != b.exponent) return 0.0;
  const int e = a.exponent;
  auto f = [&](double s) {
    const double r = std::exp(s), t = r * r;
    return std::pow(r, 2 * e + 2) * radial_profile(a.radial, t) * radial_profile(b.radial, t) *
           form_weight(a.type, r);
  };
  return 2.0 * std::numbers::pi *
         composite_gauss(f, std::log(epsilon), std::log(kOuterRadius), kRadialPanels, order);
}

/// Gram matrix of functions z^k (k in exponents) under the Poincare volume.
inline MatR monomial_gram(const std::vector<int>& exponents, double epsilon, int order = 16) {
  const int m = static_cast<int>(exponents.size());
  MatR g(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      g(i, j) = basis_inner_product({FormType::Function, exponents[i], Radial::One},
                                    {FormType::Function, exponents[j], Radial::One}, epsilon, order);
  return g;
}

inline constexpr double kMinGramEigenvalue = 1e-10;

inline void require_well_conditioned(const MatR& gram, int q) {
  const double smallest = Eigen::SelfAdjointEigenSolver<MatR>(gram).eigenvalues().minCoeff();
  if (!(smallest >= kMinGramEigenvalue))
    throw IllConditionedGram("degree " + std::to_string(q) + " Gram has smallest eigenvalue " +
                             std::to_string(smallest) + "; reduce basis_size");
}

struct DiscreteComplex {
  int basis_size = 0;
  double epsilon = 0.0;
  int quad_order = 0;
  std::array<std::vector<BasisElement>, 3> basis;
  std::array<VecR, 3> norms;    // L2 norms of the raw basis elements
  std::array<MatC, 3> gram;     // of the normalized basis
  std::array<MatC, 2> d;        // D_q : C^q -> C^{q+1}

  int dim(int q) const { return static_cast<int>(basis.at(q).size()); }
};

/// Frequencies of the degree-0 basis: 0 .. basis_size/2 - 1. Negative modes
/// concentrate at the inner circle where chi is close to 1, making z^e and
/// chi z^e numerically collinear.
inline std::vector<int> lab_exponents(int basis_size) {
  std::vector<int> out;
  for (int k = 0; k < basis_size / 2; ++k) out.push_back(k);
  return out;
}

inline DiscreteComplex build_discrete_complex(int basis_size, double epsilon, int quad_order = 16) {
  if (basis_size < 4 || basis_size % 2 != 0) throw ParameterOutOfRange("basis_size must be even and >= 4");
  if (!(epsilon > 0.0 && epsilon < kOuterRadius)) throw ParameterOutOfRange("epsilon must lie in (0, 0.5)");
  if (quad_order < 2) throw ParameterOutOfRange("quadrature order must be >= 2");

  DiscreteComplex c;
  c.basis_size = basis_size;
  c.epsilon = epsilon;
  c.quad_order = quad_order;
  const auto exps = lab_exponents(basis_size);
  const int half = static_cast<int>(exps.size());
  for (int e : exps) {
    c.basis[0].push_back({FormType::Function, e, Radial::One});
    c.basis[0].push_back({FormType::Function, e, Radial::Cutoff});
  }
  for (int e : exps) {
    c.basis[1].push_back({FormType::Dzbar, e + 1, Radial::CutoffDerivative});
    c.basis[1].push_back({FormType::Dzbar, e + 1, Radial::One});
  }
  for (int e : exps) {
    c.basis[1].push_back({FormType::Dz, e, Radial::One});
    c.basis[1].push_back({FormType::Dz, e, Radial::Cutoff});
  }
  for (int e : exps) {
    c.basis[2].push_back({FormType::DzbarDz, e + 1, Radial::CutoffDerivative});
    c.basis[2].push_back({FormType::DzbarDz, e + 1, Radial::One});
  }

  for (int q = 0; q < 3; ++q) {
    const int m = c.dim(q);
    MatR raw(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) raw(i, j) = raw(j, i) = basis_inner_product(c.basis[q][i], c.basis[q][j], epsilon, quad_order);
    c.norms[q] = raw.diagonal().cwiseSqrt();
    const VecR inv = c.norms[q].cwiseInverse();
    const MatR normalized = inv.asDiagonal() * raw * inv.asDiagonal();
    require_well_conditioned(normalized, q);
    c.gram[q] = normalized.cast<cplx>();
  }

  // dbar(chi z^e) = chi' z^{e+1} dzbar and dbar(chi z^e dz) = chi' z^{e+1} dzbar^dz;
  // every other basis element is dbar-closed.
  c.d[0] = MatC::Zero(c.dim(1), c.dim(0));
  c.d[1] = MatC::Zero(c.dim(2), c.dim(1));
  for (int k = 0; k < half; ++k) {
    c.d[0](2 * k, 2 * k + 1) = c.norms[0](2 * k + 1) / c.norms[1](2 * k);
    c.d[1](2 * k, basis_size + 2 * k + 1) = c.norms[1](basis_size + 2 * k + 1) / c.norms[2](2 * k);
  }
  return c;
}

namespace detail {

inline void check_degree(int q, int lo, int hi) {
  if (q < lo || q > hi)
    throw DegreeOutOfRange("degree " + std::to_string(q) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

inline MatC lower_cholesky(const MatC& g) { return g.llt().matrixL(); }

}  // namespace detail

/// Dstar_q = G_q^{-1} D_q^* G_{q+1} : C^{q+1} -> C^q.
inline MatC discrete_adjoint(const DiscreteComplex& c, int q) {
  detail::check_degree(q, 0, 1);
  return c.gram[q].llt().solve(c.d[q].adjoint() * c.gram[q + 1]);
}

/// max over basis pairs of |<D u, v> - <u, Dstar v>|.
inline double adjoint_residual(const DiscreteComplex& c, int q) {
  const MatC ds = discrete_adjoint(c, q);
  return (c.gram[q + 1] * c.d[q] - ds.adjoint() * c.gram[q]).cwiseAbs().maxCoeff();
}

/// |(Dstar)^* - D|: the adjoint of Dstar with respect to the same Gram pair.
inline double double_adjoint_residual(const DiscreteComplex& c, int q) {
  const MatC ds = discrete_adjoint(c, q);
  const MatC dss = c.gram[q + 1].llt().solve(ds.adjoint() * c.gram[q]);
  return (dss - c.d[q]).cwiseAbs().maxCoeff();
}

inline cplx gram_inner(const DiscreteComplex& c, int q, const VecC& u, const VecC& v) {
  return v.dot(c.gram[q] * u);  // v^* G u
}
inline double gram_norm2(const DiscreteComplex& c, int q, const VecC& v) { return gram_inner(c, q, v, v).real(); }

/// D_q applied to degree-q vectors; zero map out of the top degree.
inline MatC d_operator(const DiscreteComplex& c, int q) {
  detail::check_degree(q, 0, 2);
  return q < 2 ? c.d[q] : MatC::Zero(0, c.dim(2));
}

/// Dstar out of degree q (to q-1); zero map out of degree 0.
inline MatC dstar_operator(const DiscreteComplex& c, int q) {
  detail::check_degree(q, 0, 2);
  return q > 0 ? discrete_adjoint(c, q - 1) : MatC::Zero(0, c.dim(0));
}

inline MatC laplacian(const DiscreteComplex& c, int q) {
  detail::check_degree(q, 0, 2);
  MatC lap = MatC::Zero(c.dim(q), c.dim(q));
  if (q > 0) lap += c.d[q - 1] * discrete_adjoint(c, q - 1);
  if (q < 2) lap += discrete_adjoint(c, q) * c.d[q];
  return lap;
}

/// Operators in the orthonormal frame x~ = L^* x, G = L L^*.
struct OrthonormalFrame {
  MatC to_frame;    // L^*
  MatC from_frame;  // L^{-*}
};

inline OrthonormalFrame orthonormal_frame(const DiscreteComplex& c, int q) {
  const MatC l = detail::lower_cholesky(c.gram[q]);
  OrthonormalFrame f;
  f.to_frame = l.adjoint();
  f.from_frame = l.adjoint().triangularView<Eigen::Upper>().solve(MatC::Identity(c.dim(q), c.dim(q)));
  return f;
}

/// D_q in orthonormal frames of degrees q and q+1.
inline MatC frame_d(const DiscreteComplex& c, int q) {
  return orthonormal_frame(c, q + 1).to_frame * c.d[q] * orthonormal_frame(c, q).from_frame;
}

/// Basis (degree-q coefficient vectors) of ker D cap ker Dstar.
inline MatC harmonic_basis(const DiscreteComplex& c, int q) {
  detail::check_degree(q, 0, 2);
  std::vector<MatC> blocks;
  if (q > 0) blocks.push_back(frame_d(c, q - 1).adjoint());  // annihilates im D
  if (q < 2) blocks.push_back(frame_d(c, q));
  Eigen::Index rows = 0;
  for (const auto& b : blocks) rows += b.rows();
  MatC stacked(rows, c.dim(q));
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    stacked.middleRows(at, b.rows()) = b;
    at += b.rows();
  }
  Eigen::JacobiSVD<MatC> svd(stacked, Eigen::ComputeFullV);
  const int rank = numerical_rank(stacked);
  const MatC kernel = svd.matrixV().rightCols(c.dim(q) - rank);
  return orthonormal_frame(c, q).from_frame * kernel;
}

struct HodgeSplit {
  int degree = 0;
  VecC image_d;
  VecC image_dstar;
  VecC harmonic;
  double orthogonality_residual = 0.0;   // max |<a, b>| over pairs, relative to max(1, |v|^2)
  double reconstruction_residual = 0.0;  // |a + b + h - v|, relative to max(1, |v|)
  double harmonic_residual = 0.0;        // |D h| + |Dstar h|
  double energy_residual = 0.0;          // |<Lap v, v> - |Dv|^2 - |Dstar v|^2|, relative
};

/// Orthogonal decomposition v = D a + Dstar b + h in degree q.
inline HodgeSplit hodge_decompose(const DiscreteComplex& c, int q, const VecC& v) {
  detail::check_degree(q, 0, 2);
  if (v.size() != c.dim(q)) throw DegreeMismatch("vector length does not match degree " + std::to_string(q));
  const OrthonormalFrame frame = orthonormal_frame(c, q);
  const VecC x = frame.to_frame * v;
  auto project = [&](const MatC& span) -> VecC {
    if (span.cols() == 0 || span.rows() == 0) return VecC::Zero(x.size());
    const MatC basis = column_space(span);
    return basis * (basis.adjoint() * x);
  };
  const VecC exact = q > 0 ? project(frame_d(c, q - 1)) : VecC::Zero(x.size());
  const VecC coexact = q < 2 ? project(frame_d(c, q).adjoint()) : VecC::Zero(x.size());

  HodgeSplit s;
  s.degree = q;
  s.image_d = frame.from_frame * exact;
  s.image_dstar = frame.from_frame * coexact;
  s.harmonic = frame.from_frame * (x - exact - coexact);

  const double norm2 = gram_norm2(c, q, v);
  const double scale2 = std::max(1.0, norm2);
  s.orthogonality_residual = std::max({std::abs(gram_inner(c, q, s.image_d, s.image_dstar)),
                                       std::abs(gram_inner(c, q, s.image_d, s.harmonic)),
                                       std::abs(gram_inner(c, q, s.image_dstar, s.harmonic))}) /
                             scale2;
  s.reconstruction_residual =
      std::sqrt(std::max(0.0, gram_norm2(c, q, s.image_d + s.image_dstar + s.harmonic - v))) / std::sqrt(scale2);

  const MatC dq = d_operator(c, q), dsq = dstar_operator(c, q);
  const int up = q < 2 ? q + 1 : q, down = q > 0 ? q - 1 : q;
  auto norm_in = [&](int deg, const VecC& w) { return w.size() == 0 ? 0.0 : gram_norm2(c, deg, w); };
  s.harmonic_residual = std::sqrt(norm_in(up, dq * s.harmonic)) + std::sqrt(norm_in(down, dsq * s.harmonic));
  const double dv2 = norm_in(up, dq * v), dsv2 = norm_in(down, dsq * v);
  const double energy = gram_inner(c, q, laplacian(c, q) * v, v).real();
  s.energy_residual = std::abs(energy - dv2 - dsv2) / std::max({1.0, std::abs(energy), dv2 + dsv2});
  return s;
}

/// Harmonic part of a restricted degree-q form; independent of added D-exact terms.
inline VecC project_restriction(const DiscreteComplex& c, int q, const VecC& v) {
  return hodge_decompose(c, q, v).harmonic;
}

struct DimensionCount {
  std::array<int, 3> dims{};
  std::array<int, 2> ranks{};  // rank D_0, rank D_1
  std::array<int, 3> harmonic{};
  bool consistent = false;     // dim im D + dim im Dstar + dim ker Lap = dim in every degree
};

inline DimensionCount dimension_count(const DiscreteComplex& c) {
  DimensionCount dc;
  for (int q = 0; q < 2; ++q) dc.ranks[q] = numerical_rank(frame_d(c, q));
  dc.consistent = true;
  for (int q = 0; q < 3; ++q) {
    dc.dims[q] = c.dim(q);
    dc.harmonic[q] = static_cast<int>(harmonic_basis(c, q).cols());
    const int exact = q > 0 ? dc.ranks[q - 1] : 0, coexact = q < 2 ? dc.ranks[q] : 0;
    if (exact + coexact + dc.harmonic[q] != dc.dims[q]) dc.consistent = false;
  }
  return dc;
}

}  // namespace rigidity
