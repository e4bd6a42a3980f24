#pragma once

// Pointwise exterior algebra of C^n with the flat Kahler form
// omega = i sum_j dz_j ^ dzbar_j. A monomial is a bitmask: bit j is dz_j,
// bit n+j is dzbar_j, and the canonical wedge order is increasing bit index.
// Canonical monomials are orthonormal.

#include "rigidity/errors.hpp"
#include "rigidity/linalg.hpp"

#include <bit>
#include <cstdint>
#include <unordered_map>

namespace rigidity {

using Mask = std::uint32_t;

inline int holo_degree(Mask m, int n) { return std::popcount(m & ((Mask{1} << n) - 1)); }
inline int anti_degree(Mask m, int n) { return std::popcount(m >> n); }

/// e(bit) m = sign * (m | bit), or sign 0 when the bit is already set.
inline int wedge_sign(Mask m, int bit) {
  if (m & (Mask{1} << bit)) return 0;
  return (std::popcount(m & ((Mask{1} << bit) - 1)) % 2) ? -1 : 1;
}

/// iota(bit) m = sign * (m & ~bit), or 0 when the bit is absent. Adjoint of e(bit).
inline int contract_sign(Mask m, int bit) {
  if (!(m & (Mask{1} << bit))) return 0;
  return (std::popcount(m & ((Mask{1} << bit) - 1)) % 2) ? -1 : 1;
}

/// Monomials of bidegree (p, q), ordered by (holomorphic part, antiholomorphic
/// part), each part in lexicographic order of its sorted index set.
class FormSpace {
 public:
  FormSpace() = default;
  FormSpace(int n, int p, int q) : n_(n), p_(p), q_(q) {
    if (n < 1 || n > 15) throw DegreeOutOfRange("FormSpace supports 1 <= n <= 15");
    if (p >= 0 && q >= 0 && p <= n && q <= n) {
      const auto hol = subsets(n, p);
      const auto anti = subsets(n, q);
      masks_.reserve(hol.size() * anti.size());
      for (Mask h : hol)
        for (Mask a : anti) masks_.push_back(h | (a << n));
      for (int i = 0; i < dim(); ++i) index_.emplace(masks_[i], i);
    }
  }

  int n() const { return n_; }
  int p() const { return p_; }
  int q() const { return q_; }
  int dim() const { return static_cast<int>(masks_.size()); }
  Mask mask(int i) const { return masks_[i]; }
  int index_of(Mask m) const {
    auto it = index_.find(m);
    return it == index_.end() ? -1 : it->second;
  }

  /// Subsets of {0..n-1} of size k as bitmasks, lexicographic in sorted elements.
  static std::vector<Mask> subsets(int n, int k) {
    std::vector<Mask> out;
    if (k < 0 || k > n) return out;
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      Mask m = 0;
      for (int i : idx) m |= Mask{1} << i;
      out.push_back(m);
      int i = k - 1;
      while (i >= 0 && idx[i] == n - k + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
  }

 private:
  int n_ = 0, p_ = 0, q_ = 0;
  std::vector<Mask> masks_;
  std::unordered_map<Mask, int> index_;
};

/// Matrix of e(bit): from -> to.
inline MatC exterior_multiplication(const FormSpace& from, const FormSpace& to, int bit) {
  MatC m = MatC::Zero(to.dim(), from.dim());
  for (int i = 0; i < from.dim(); ++i) {
    const int s = wedge_sign(from.mask(i), bit);
    if (s == 0) continue;
    const int j = to.index_of(from.mask(i) | (Mask{1} << bit));
    if (j >= 0) m(j, i) = s;
  }
  return m;
}

/// Matrix of iota(bit): from -> to.
inline MatC interior_multiplication(const FormSpace& from, const FormSpace& to, int bit) {
  MatC m = MatC::Zero(to.dim(), from.dim());
  for (int i = 0; i < from.dim(); ++i) {
    const int s = contract_sign(from.mask(i), bit);
    if (s == 0) continue;
    const int j = to.index_of(from.mask(i) & ~(Mask{1} << bit));
    if (j >= 0) m(j, i) = s;
  }
  return m;
}

/// L = omega ^ . : (p,q) -> (p+1,q+1).
inline MatC lefschetz(int n, int p, int q) {
  const FormSpace from(n, p, q), mid(n, p, q + 1), to(n, p + 1, q + 1);
  MatC l = MatC::Zero(to.dim(), from.dim());
  for (int j = 0; j < n; ++j)
    l += I_unit * exterior_multiplication(mid, to, j) * exterior_multiplication(from, mid, n + j);
  return l;
}

/// Lambda : (p,q) -> (p-1,q-1) as the conjugate transpose of L in the
/// orthonormal monomial basis.
inline MatC lambda_adjoint(int n, int p, int q) { return lefschetz(n, p - 1, q - 1).adjoint(); }

/// Lambda : (p,q) -> (p-1,q-1) as -i sum_j iota(dzbar_j) iota(dz_j).
inline MatC lambda_contraction(int n, int p, int q) {
  const FormSpace from(n, p, q), mid(n, p - 1, q), to(n, p - 1, q - 1);
  MatC l = MatC::Zero(to.dim(), from.dim());
  for (int j = 0; j < n; ++j)
    l += -I_unit * interior_multiplication(mid, to, n + j) * interior_multiplication(from, mid, j);
  return l;
}

/// Coefficient v of the volume form omega^n / n! on the top monomial.
inline cplx volume_coefficient(int n) {
  VecC v = VecC::Ones(1);
  double fact = 1.0;
  for (int k = 0; k < n; ++k) {
    v = lefschetz(n, k, k) * v;
    fact *= (k + 1);
  }
  return v(0) / fact;
}

/// Conjugate-linear Hodge star (p,q) -> (n-p,n-q), alpha ^ star(beta) =
/// <alpha, beta> vol. Represented by K with star(beta) = K conj(beta).
inline MatC hodge_star_matrix(int n, int p, int q) {
  const FormSpace from(n, p, q), to(n, n - p, n - q);
  const Mask top = (Mask{1} << (2 * n)) - 1;
  const cplx vol = volume_coefficient(n);
  MatC k = MatC::Zero(to.dim(), from.dim());
  for (int i = 0; i < from.dim(); ++i) {
    const Mask b = from.mask(i), comp = top & ~b;
    // sign of b ^ comp relative to the top monomial
    int sign = 1;
    Mask acc = b;
    for (int bit = 0; bit < 2 * n; ++bit) {
      if (!(comp & (Mask{1} << bit))) continue;
      // append bit at the end of the current product acc ^ dx_bit: move past
      // bits of acc above it
      sign *= (std::popcount(acc >> (bit + 1)) % 2) ? -1 : 1;
      acc |= Mask{1} << bit;
    }
    k(to.index_of(comp), i) = vol * static_cast<double>(sign);
  }
  return k;
}

/// Lambda = star^{-1} L star on (p,q) forms, assembled from the conjugate-linear star.
inline MatC lambda_hodge(int n, int p, int q) {
  const MatC k_pq = hodge_star_matrix(n, p, q);              // (p,q) -> (n-p,n-q)
  const MatC l = lefschetz(n, n - p, n - q);                 // -> (n-p+1,n-q+1)
  const MatC k_low = hodge_star_matrix(n, p - 1, q - 1);     // (p-1,q-1) -> (n-p+1,n-q+1)
  // Lambda beta = conj(K_low^{-1} L K conj(beta))
  const MatC inner = k_low.fullPivLu().solve(l * k_pq);
  return inner.conjugate();
}

/// Vector-valued form of bidegree (p,q): coefficients (monomial index, fiber index).
struct FormVector {
  int n = 0, p = 0, q = 0;
  MatC coeffs;  // FormSpace(n,p,q).dim() x rank

  int rank() const { return static_cast<int>(coeffs.cols()); }
  static FormVector zero(int n, int p, int q, int rank) {
    return {n, p, q, MatC::Zero(FormSpace(n, p, q).dim(), rank)};
  }
};

/// h_x(w1, w2) = sum h_X(alpha, beta) h(s, t) in orthonormal frames.
inline cplx form_inner_product(const FormVector& w1, const FormVector& w2) {
  if (w1.n != w2.n || w1.p != w2.p || w1.q != w2.q || w1.rank() != w2.rank())
    throw DegreeMismatch("forms of bidegree (" + std::to_string(w1.p) + "," + std::to_string(w1.q) + ") and (" +
                         std::to_string(w2.p) + "," + std::to_string(w2.q) + ")");
  return (w1.coeffs.array() * w2.coeffs.conjugate().array()).sum();
}

inline double form_norm2(const FormVector& w) { return w.coeffs.squaredNorm(); }

}  // namespace rigidity
