#pragma once

// Classical irreducible Hermitian symmetric pairs g = k + p as explicit matrix
// Lie algebras, with the complex structure J = ad(Z0) and the Killing metric.

#include "rigidity/errors.hpp"
#include "rigidity/linalg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rigidity {

enum class DomainType { I, II, III, IV, V, VI };

inline std::string to_string(DomainType t) {
  switch (t) {
    case DomainType::I: return "I";
    case DomainType::II: return "II";
    case DomainType::III: return "III";
    case DomainType::IV: return "IV";
    case DomainType::V: return "V";
    case DomainType::VI: return "VI";
  }
  return "?";
}

/// One irreducible factor. Type I uses (p, q); II-IV use m; V and VI carry no
/// parameters.
struct DomainFactor {
  DomainType type = DomainType::I;
  int p = 0;
  int q = 0;
  int m = 0;

  static DomainFactor type_I(int p, int q) { return {DomainType::I, p, q, 0}; }
  static DomainFactor type_II(int m) { return {DomainType::II, 0, 0, m}; }
  static DomainFactor type_III(int m) { return {DomainType::III, 0, 0, m}; }
  static DomainFactor type_IV(int m) { return {DomainType::IV, 0, 0, m}; }
  static DomainFactor type_V() { return {DomainType::V, 0, 0, 0}; }
  static DomainFactor type_VI() { return {DomainType::VI, 0, 0, 0}; }

  bool is_classical() const { return type != DomainType::V && type != DomainType::VI; }

  /// Parameter list as printed: "1,1" for I(1,1), "3" for II(3), "" for V.
  std::string params() const {
    switch (type) {
      case DomainType::I: return std::to_string(p) + "," + std::to_string(q);
      case DomainType::V:
      case DomainType::VI: return "";
      default: return std::to_string(m);
    }
  }

  std::string to_string() const {
    const auto par = params();
    return rigidity::to_string(type) + (par.empty() ? "" : "(" + par + ")");
  }

  friend bool operator==(const DomainFactor&, const DomainFactor&) = default;
};

struct DomainSpec {
  std::vector<DomainFactor> factors;

  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      if (i) out += "x";
      out += factors[i].to_string();
    }
    return out;
  }
  friend bool operator==(const DomainSpec&, const DomainSpec&) = default;
};

inline void check_parameters(const DomainFactor& f) {
  auto bad = [&](const std::string& why) { throw ParameterOutOfRange(f.to_string() + ": " + why); };
  switch (f.type) {
    case DomainType::I:
      if (f.p < 1 || f.q < 1) bad("type I requires p >= 1 and q >= 1");
      break;
    case DomainType::II:
      if (f.m < 2) bad("type II requires m >= 2");
      break;
    case DomainType::III:
      if (f.m < 1) bad("type III requires m >= 1");
      break;
    case DomainType::IV:
      if (f.m < 3) bad("type IV requires m >= 3");
      break;
    case DomainType::V:
    case DomainType::VI: break;
  }
}

/// Complex dimension from the classical formulas (V: 16, VI: 27).
inline int dimension_formula(const DomainFactor& f) {
  switch (f.type) {
    case DomainType::I: return f.p * f.q;
    case DomainType::II: return f.m * (f.m - 1) / 2;
    case DomainType::III: return f.m * (f.m + 1) / 2;
    case DomainType::IV: return f.m;
    case DomainType::V: return 16;
    case DomainType::VI: return 27;
  }
  return 0;
}

/// Closed-form rigidity constant: p+q, 2(m-1), m+1, m, 12, 18.
inline int gamma_closed_form(const DomainFactor& f) {
  switch (f.type) {
    case DomainType::I: return f.p + f.q;
    case DomainType::II: return 2 * (f.m - 1);
    case DomainType::III: return f.m + 1;
    case DomainType::IV: return f.m;
    case DomainType::V: return 12;
    case DomainType::VI: return 18;
  }
  return 0;
}

namespace detail {

inline int parse_int(std::string_view s, std::string_view whole) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    throw ParseError("bad integer '" + std::string(s) + "' in '" + std::string(whole) + "'");
  return std::stoi(std::string(s));
}

inline DomainFactor parse_factor(std::string_view tok, std::string_view whole) {
  const auto open = tok.find('(');
  const std::string_view head = tok.substr(0, open);
  std::vector<int> args;
  if (open != std::string_view::npos) {
    if (tok.back() != ')') throw ParseError("missing ')' in '" + std::string(whole) + "'");
    std::string_view inner = tok.substr(open + 1, tok.size() - open - 2);
    std::size_t start = 0;
    while (true) {
      const auto comma = inner.find(',', start);
      args.push_back(parse_int(inner.substr(start, comma - start), whole));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  auto expect = [&](std::size_t count) {
    if (args.size() != count)
      throw ParseError("'" + std::string(head) + "' takes " + std::to_string(count) + " parameter(s) in '" +
                       std::string(whole) + "'");
  };
  if (head == "I") { expect(2); return DomainFactor::type_I(args[0], args[1]); }
  if (head == "II") { expect(1); return DomainFactor::type_II(args[0]); }
  if (head == "III") { expect(1); return DomainFactor::type_III(args[0]); }
  if (head == "IV") { expect(1); return DomainFactor::type_IV(args[0]); }
  if (head == "V") { expect(0); return DomainFactor::type_V(); }
  if (head == "VI") { expect(0); return DomainFactor::type_VI(); }
  throw ParseError("unknown domain type '" + std::string(head) + "' in '" + std::string(whole) + "'");
}

}  // namespace detail

/// Parses "I(p,q)", "II(m)", "III(m)", "IV(m)", "V", "VI" joined by 'x'.
/// Whitespace is ignored. Parameter ranges are not checked here.
inline DomainSpec parse_domain_spec(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (s.empty()) throw ParseError("empty domain spec");
  DomainSpec spec;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto cut = s.find('x', start);
    const std::string_view tok = std::string_view(s).substr(start, cut - start);
    if (tok.empty()) throw ParseError("empty factor in '" + s + "'");
    spec.factors.push_back(detail::parse_factor(tok, s));
    if (cut == std::string::npos) break;
    start = cut + 1;
  }
  return spec;
}

inline std::vector<DomainSpec> decompose_product(const DomainSpec& spec) {
  std::vector<DomainSpec> out;
  out.reserve(spec.factors.size());
  for (const auto& f : spec.factors) out.push_back(DomainSpec{{f}});
  return out;
}

/// Real structure constants [b_a, b_b] = sum_c f(a,b,c) b_c over the basis
/// k_0..k_{dk-1}, p_0..p_{dp-1}.
class StructureConstants {
 public:
  using Terms = std::vector<std::pair<int, double>>;  // (c, value), sorted by c

  StructureConstants() = default;
  explicit StructureConstants(int dim) : dim_(dim), terms_(static_cast<std::size_t>(dim) * dim) {}

  int dim() const { return dim_; }
  double operator()(int a, int b, int c) const {
    for (const auto& [e, v] : terms(a, b))
      if (e == c) return v;
    return 0.0;
  }
  /// Nonzero coordinates of [b_a, b_b].
  const Terms& terms(int a, int b) const { return terms_[index(a, b)]; }
  void set(int a, int b, Terms t) { terms_[index(a, b)] = std::move(t); }

 private:
  std::size_t index(int a, int b) const { return static_cast<std::size_t>(a) * dim_ + b; }
  int dim_ = 0;
  std::vector<Terms> terms_;
};

struct HermitianPair {
  DomainFactor factor;
  std::vector<MatC> k_basis;  // skew-Hermitian matrices, orthonormal for Re tr(XY^*)
  std::vector<MatC> p_basis;  // Hermitian matrices, orthonormal for Re tr(XY^*)
  StructureConstants bracket;
  double closure_residual = 0.0;  // worst projection residual of [b_a, b_b]
  VecR z0;                        // central element of k (k-coordinates), ad(Z0)^2 = -1 on p
  MatR J;                         // ad(Z0) on p, in p-coordinates
  MatR killing_p;                 // Killing form restricted to p
  MatR base_metric;               // killing_p rescaled: smallest diagonal entry 1
  MatC p10_basis;                 // columns: p-coordinates of a basis of the +i eigenspace of J
  int n = 0;

  int dim_k() const { return static_cast<int>(k_basis.size()); }
  int dim_p() const { return static_cast<int>(p_basis.size()); }
  int dim() const { return dim_k() + dim_p(); }
};

namespace detail {

inline MatC unit(int n, int r, int c, cplx value = 1.0) {
  MatC m = MatC::Zero(n, n);
  m(r, c) = value;
  return m;
}

// Spanning sets (k, p) of the four classical real forms, chosen so that the
// Cartan involution is X -> -X^*.
inline std::pair<std::vector<MatC>, std::vector<MatC>> classical_spanning_sets(const DomainFactor& f) {
  std::vector<MatC> k, p;
  switch (f.type) {
    case DomainType::I: {  // su(p,q)
      const int N = f.p + f.q;
      auto add_unitary_block = [&](int off, int size) {
        for (int a = 0; a < size; ++a) {
          MatC d = unit(N, off + a, off + a, I_unit);
          d -= (I_unit / static_cast<double>(N)) * MatC::Identity(N, N);  // trace zero
          k.push_back(d);
          for (int b = a + 1; b < size; ++b) {
            k.push_back(unit(N, off + a, off + b) - unit(N, off + b, off + a));
            k.push_back(unit(N, off + a, off + b, I_unit) + unit(N, off + b, off + a, I_unit));
          }
        }
      };
      add_unitary_block(0, f.p);
      add_unitary_block(f.p, f.q);
      for (int a = 0; a < f.p; ++a) {
        for (int b = 0; b < f.q; ++b) {
          p.push_back(unit(N, a, f.p + b) + unit(N, f.p + b, a));
          p.push_back(unit(N, a, f.p + b, I_unit) - unit(N, f.p + b, a, I_unit));
        }
      }
      break;
    }
    case DomainType::II: {  // so*(2m): [[Z1, Z2], [-conj Z2, conj Z1]], Z1 in u(m), Z2 skew
      const int m = f.m, N = 2 * m;
      auto block_k = [&](const MatC& z1) {
        MatC x = MatC::Zero(N, N);
        x.topLeftCorner(m, m) = z1;
        x.bottomRightCorner(m, m) = z1.conjugate();
        return x;
      };
      auto block_p = [&](const MatC& z2) {
        MatC x = MatC::Zero(N, N);
        x.topRightCorner(m, m) = z2;
        x.bottomLeftCorner(m, m) = -z2.conjugate();
        return x;
      };
      for (int a = 0; a < m; ++a) {
        k.push_back(block_k(unit(m, a, a, I_unit)));
        for (int b = a + 1; b < m; ++b) {
          k.push_back(block_k(unit(m, a, b) - unit(m, b, a)));
          k.push_back(block_k(unit(m, a, b, I_unit) + unit(m, b, a, I_unit)));
          p.push_back(block_p(unit(m, a, b) - unit(m, b, a)));
          p.push_back(block_p(unit(m, a, b, I_unit) - unit(m, b, a, I_unit)));
        }
      }
      break;
    }
    case DomainType::III: {  // sp(m, R): [[A, B], [C, -A^T]], B, C symmetric
      const int m = f.m, N = 2 * m;
      auto blocks = [&](const MatC& tl, const MatC& tr, const MatC& bl, const MatC& br) {
        MatC x(N, N);
        x << tl, tr, bl, br;
        return x;
      };
      const MatC zero = MatC::Zero(m, m);
      for (int a = 0; a < m; ++a) {
        for (int b = a; b < m; ++b) {
          const MatC sym = a == b ? unit(m, a, a) : MatC(unit(m, a, b) + unit(m, b, a));
          // k ~ u(m): [[A, B], [-B, A]], A skew, B symmetric
          k.push_back(blocks(zero, sym, -sym, zero));
          // p: [[A, B], [B, -A]], A and B symmetric
          p.push_back(blocks(sym, zero, zero, -sym));
          p.push_back(blocks(zero, sym, sym, zero));
          if (a != b) {
            const MatC skew = unit(m, a, b) - unit(m, b, a);
            k.push_back(blocks(skew, zero, zero, skew));
          }
        }
      }
      break;
    }
    case DomainType::IV: {  // so(m, 2)
      const int m = f.m, N = m + 2;
      for (int a = 0; a < N; ++a) {
        for (int b = a + 1; b < N; ++b) {
          const bool a_in_m = a < m, b_in_m = b < m;
          if (a_in_m == b_in_m) {
            k.push_back(unit(N, a, b) - unit(N, b, a));
          } else {
            p.push_back(unit(N, a, b) + unit(N, b, a));
          }
        }
      }
      break;
    }
    case DomainType::V:
    case DomainType::VI:
      throw UnsupportedDomain(f.to_string() + " is reference-only (no Lie algebra construction)");
  }
  return {k, p};
}

}  // namespace detail

/// Builds the Hermitian symmetric pair of one classical factor.
inline HermitianPair build_domain(const DomainSpec& spec) {
  if (spec.factors.size() != 1)
    throw UnsupportedDomain("build_domain expects a single factor, got '" + spec.to_string() + "'");
  const DomainFactor& f = spec.factors.front();
  if (!f.is_classical()) throw UnsupportedDomain(f.to_string() + " is reference-only (no Lie algebra construction)");
  check_parameters(f);

  HermitianPair pair;
  pair.factor = f;
  auto [k_span, p_span] = detail::classical_spanning_sets(f);
  pair.k_basis = orthonormalize(k_span);
  pair.p_basis = orthonormalize(p_span);
  const int dk = pair.dim_k(), dp = pair.dim_p(), d = dk + dp;

  std::vector<const MatC*> basis;
  basis.reserve(d);
  for (const auto& b : pair.k_basis) basis.push_back(&b);
  for (const auto& b : pair.p_basis) basis.push_back(&b);

  // Brackets of sparse basis matrices, projected through a position index.
  const int N = static_cast<int>(basis.front()->rows());
  std::vector<SpMatC> sparse(d);
  std::vector<std::vector<std::pair<int, cplx>>> at_position(static_cast<std::size_t>(N) * N);
  for (int e = 0; e < d; ++e) {
    sparse[e] = basis[e]->sparseView(0.0, 0.0);
    for (int col = 0; col < N; ++col)
      for (SpMatC::InnerIterator it(sparse[e], col); it; ++it)
        at_position[static_cast<std::size_t>(it.row()) * N + col].push_back({e, it.value()});
  }
  pair.bracket = StructureConstants(d);
  std::vector<double> coords(d, 0.0);
  std::vector<int> touched;
  MatC rest = MatC::Zero(N, N);
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      const SpMatC c = SpMatC(sparse[a] * sparse[b]) - SpMatC(sparse[b] * sparse[a]);
      touched.clear();
      for (int col = 0; col < N; ++col)
        for (SpMatC::InnerIterator it(c, col); it; ++it)
          for (const auto& [e, v] : at_position[static_cast<std::size_t>(it.row()) * N + col]) {
            if (coords[e] == 0.0) touched.push_back(e);
            coords[e] += (it.value() * std::conj(v)).real();
          }
      std::sort(touched.begin(), touched.end());
      StructureConstants::Terms ab, ba;
      rest = c;
      for (int e : touched) {
        const double coord = coords[e];
        coords[e] = 0.0;
        if (coord == 0.0) continue;
        ab.push_back({e, coord});
        ba.push_back({e, -coord});
        for (int col = 0; col < N; ++col)
          for (SpMatC::InnerIterator it(sparse[e], col); it; ++it) rest(it.row(), col) -= coord * it.value();
      }
      pair.bracket.set(a, b, std::move(ab));
      pair.bracket.set(b, a, std::move(ba));
      pair.closure_residual = std::max(pair.closure_residual, rest.norm());
    }
  }

  // Center of k: null space of M(a, a') = sum_{b,e} f(a,b,e) f(a',b,e).
  MatR center_gram = MatR::Zero(dk, dk);
  {
    std::vector<std::vector<std::pair<int, double>>> by_be(static_cast<std::size_t>(dk) * dk);
    for (int a = 0; a < dk; ++a)
      for (int b = 0; b < dk; ++b)
        for (const auto& [e, v] : pair.bracket.terms(a, b))
          if (e < dk) by_be[static_cast<std::size_t>(b) * dk + e].push_back({a, v});
    for (const auto& column : by_be)
      for (const auto& [a, va] : column)
        for (const auto& [a2, vb] : column) center_gram(a, a2) += va * vb;
  }
  const Eigen::SelfAdjointEigenSolver<MatR> center_eig(center_gram);
  const VecR& center_vals = center_eig.eigenvalues();
  const double center_tol = 1e-10 * std::max(1.0, center_vals.cwiseAbs().maxCoeff());
  int center_dim = 0;
  while (center_dim < dk && center_vals(center_dim) <= center_tol) ++center_dim;
  if (center_dim != 1)
    throw UnsupportedDomain(f.to_string() + ": center of k has dimension " + std::to_string(center_dim));
  VecR z0 = center_eig.eigenvectors().col(0);
  // Deterministic sign: first significant coordinate positive.
  for (int a = 0; a < dk; ++a) {
    if (std::abs(z0(a)) > 1e-8) {
      if (z0(a) < 0) z0 = -z0;
      break;
    }
  }
  MatR J = MatR::Zero(dp, dp);
  for (int a = 0; a < dk; ++a)
    for (int b = 0; b < dp; ++b)
      for (const auto& [e, v] : pair.bracket.terms(a, dk + b))
        if (e >= dk) J(e - dk, b) += z0(a) * v;
  const double mu2 = -(J * J).trace() / dp;
  if (!(mu2 > 0)) throw DegenerateMetric(f.to_string() + ": ad(Z0) is not a complex structure");
  const double mu = std::sqrt(mu2);
  pair.z0 = z0 / mu;
  pair.J = J / mu;

  // Killing form B(X, Y) = tr(ad X ad Y) = sum_{g,e} f(x,g,e) f(y,e,g), restricted to p.
  pair.killing_p = MatR::Zero(dp, dp);
  for (int a = 0; a < dp; ++a)
    for (int b = a; b < dp; ++b) {
      double v = 0.0;
      for (int g = 0; g < d; ++g)
        for (const auto& [e, fa] : pair.bracket.terms(dk + a, g)) v += fa * pair.bracket(dk + b, e, g);
      pair.killing_p(a, b) = v;
      pair.killing_p(b, a) = v;
    }
  const double min_diag = pair.killing_p.diagonal().minCoeff();
  if (!(min_diag > 0)) throw DegenerateMetric(f.to_string() + ": Killing form not positive on p");
  pair.base_metric = pair.killing_p / min_diag;

  // +i eigenspace of J: column-pivoted selection from (1 - iJ)/2.
  const MatC proj = 0.5 * (MatC::Identity(dp, dp) - I_unit * pair.J.cast<cplx>());
  pair.n = dp / 2;
  Eigen::ColPivHouseholderQR<MatC> qr(proj);
  const auto& perm = qr.colsPermutation().indices();
  std::vector<int> cols(perm.data(), perm.data() + pair.n);
  std::sort(cols.begin(), cols.end());
  pair.p10_basis = MatC(dp, pair.n);
  for (int j = 0; j < pair.n; ++j) pair.p10_basis.col(j) = proj.col(cols[j]);
  return pair;
}

inline HermitianPair build_domain(const DomainFactor& f) { return build_domain(DomainSpec{{f}}); }

/// Hermitian metric h(u, v) = u^T G conj(v) on the p^{1,0} basis, for the
/// real metric G = scale * base_metric.
inline MatC invariant_metric(const HermitianPair& pair, double scale) {
  if (!(scale > 0)) throw NonPositiveScale("scale must be positive, got " + std::to_string(scale));
  const MatC g = (scale * pair.base_metric).cast<cplx>();
  return pair.p10_basis.transpose() * g * pair.p10_basis.conjugate();
}

/// ad(k_a) restricted to p, in p-coordinates.
inline MatR ad_k_on_p(const HermitianPair& pair, int a) {
  const int dk = pair.dim_k(), dp = pair.dim_p();
  MatR m(dp, dp);
  m.setZero();
  for (int b = 0; b < dp; ++b)
    for (const auto& [e, v] : pair.bracket.terms(a, dk + b))
      if (e >= dk) m(e - dk, b) = v;
  return m;
}

// ---- residual diagnostics ---------------------------------------------------

/// Largest coefficient violating [k,k] in k, [k,p] in p, [p,p] in k.
inline double cartan_residual(const HermitianPair& pair) {
  const int dk = pair.dim_k(), d = pair.dim();
  double worst = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      const bool lands_in_k = (a < dk) == (b < dk);
      for (const auto& [e, v] : pair.bracket.terms(a, b))
        if ((e < dk) != lands_in_k) worst = std::max(worst, std::abs(v));
    }
  return worst;
}

inline double jacobi_residual(const HermitianPair& pair) {
  const auto& f = pair.bracket;
  const int d = pair.dim();
  double worst = 0.0;
  VecR acc(d);
  auto add = [&](int x, int y, int z) {  // [[x, y], z]
    for (const auto& [e, v] : f.terms(x, y))
      for (const auto& [g, w] : f.terms(e, z)) acc(g) += v * w;
  };
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b)
      for (int c = b + 1; c < d; ++c) {
        acc.setZero();
        add(a, b, c);
        add(b, c, a);
        add(c, a, b);
        worst = std::max(worst, acc.cwiseAbs().maxCoeff());
      }
  return worst;
}

/// ||J^2 + 1|| (max entry).
inline double complex_structure_residual(const HermitianPair& pair) {
  return (pair.J * pair.J + MatR::Identity(pair.dim_p(), pair.dim_p())).cwiseAbs().maxCoeff();
}

/// max over k-basis of ||[ad X, J]||.
inline double j_commutes_with_k_residual(const HermitianPair& pair) {
  double worst = 0.0;
  for (int a = 0; a < pair.dim_k(); ++a) {
    const MatR ad = ad_k_on_p(pair, a);
    worst = std::max(worst, (ad * pair.J - pair.J * ad).cwiseAbs().maxCoeff());
  }
  return worst;
}

/// ad(k)-invariance of G = scale * base_metric: max ||ad^T G + G ad||.
inline double metric_ad_invariance_residual(const HermitianPair& pair, double scale = 1.0) {
  const MatR g = scale * pair.base_metric;
  double worst = 0.0;
  for (int a = 0; a < pair.dim_k(); ++a) {
    const MatR ad = ad_k_on_p(pair, a);
    worst = std::max(worst, (ad.transpose() * g + g * ad).cwiseAbs().maxCoeff());
  }
  return worst;
}

/// Same invariance seen on p^{1,0}: h([X,u], v) + h(u, [X,v]) over the k-basis.
inline double hermitian_metric_ad_invariance_residual(const HermitianPair& pair, double scale = 1.0) {
  const MatC g = (scale * pair.base_metric).cast<cplx>();
  const MatC& b = pair.p10_basis;
  double worst = 0.0;
  for (int a = 0; a < pair.dim_k(); ++a) {
    const MatC ad = ad_k_on_p(pair, a).cast<cplx>();
    const MatC lhs = (ad * b).transpose() * g * b.conjugate() + b.transpose() * g * (ad * b).conjugate();
    worst = std::max(worst, lhs.cwiseAbs().maxCoeff());
  }
  return worst;
}

inline double metric_j_invariance_residual(const HermitianPair& pair) {
  return (pair.J.transpose() * pair.base_metric * pair.J - pair.base_metric).cwiseAbs().maxCoeff();
}

}  // namespace rigidity
