#include "rigidity/l2lab.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace rigidity;

namespace {

constexpr double kPi = std::numbers::pi;

// Composite Simpson in r over [eps, 1/2] for the Poincare norm of z^e.
double simpson_monomial_norm2(int e, double eps, int intervals = 200000) {
  auto f = [e](double r) {
    const double l = std::log(r * r);
    return 2.0 * kPi * std::pow(r, 2 * e + 1) / (r * r * l * l);
  };
  const double h = (0.5 - eps) / intervals;
  double sum = f(eps) + f(0.5);
  for (int i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(eps + i * h);
  return sum * h / 3.0;
}

double constant_mode_norm2(double eps) { return 0.5 * kPi * (1.0 / std::log(2.0) - 1.0 / std::abs(std::log(eps))); }

VecC random_vector(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  VecC v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(normal(rng), normal(rng));
  return v;
}

// G-orthogonal projection onto the column span of a, by least squares in the
// Cholesky coordinates of g.
VecC gram_projection(const MatC& g, const MatC& a, const VecC& v) {
  const MatC u = g.llt().matrixU();
  const MatC ua = u * a;
  const VecC x = ua.completeOrthogonalDecomposition().solve(u * v);
  return a * x;
}

}  // namespace

TEST(MonomialGram, MatchesSimpsonOracle) {
  const double eps = 0.05;
  const MatR g = monomial_gram({0, 1, 2, 3, 4}, eps);
  ASSERT_EQ(g.rows(), 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      if (i == j) {
        EXPECT_NEAR(g(i, i), simpson_monomial_norm2(i, eps), 1e-9 * g(i, i)) << i;
      } else {
        EXPECT_EQ(g(i, j), 0.0);
      }
    }
  EXPECT_NEAR(g(0, 0), constant_mode_norm2(eps), 1e-12);
}

TEST(MonomialGram, QuadratureOrderConverges) {
  const std::vector<int> exps{0, 1, 2, 3, 5};
  const MatR lo = monomial_gram(exps, 1e-3, 8), hi = monomial_gram(exps, 1e-3, 16);
  EXPECT_LT((lo - hi).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(DiscreteComplex, ParameterValidation) {
  EXPECT_THROW(build_discrete_complex(3, 0.01), ParameterOutOfRange);
  EXPECT_THROW(build_discrete_complex(2, 0.01), ParameterOutOfRange);
  EXPECT_THROW(build_discrete_complex(8, 0.0), ParameterOutOfRange);
  EXPECT_THROW(build_discrete_complex(8, 0.5), ParameterOutOfRange);
  EXPECT_THROW(build_discrete_complex(8, 0.01, 1), ParameterOutOfRange);
}

TEST(DiscreteComplex, IllConditionedGramIsRejected) {
  MatR g(2, 2);
  g << 1.0, 1.0, 1.0, 1.0;
  EXPECT_THROW(require_well_conditioned(g, 0), IllConditionedGram);
  EXPECT_NO_THROW(require_well_conditioned(MatR::Identity(3, 3), 1));
}

TEST(DiscreteComplex, ShapesAndClosedColumns) {
  const auto c = build_discrete_complex(8, 1e-3);
  EXPECT_EQ(c.dim(0), 8);
  EXPECT_EQ(c.dim(1), 16);
  EXPECT_EQ(c.dim(2), 8);
  // holomorphic monomials z^e are dbar-closed
  for (int k = 0; k < 4; ++k) EXPECT_EQ(c.d[0].col(2 * k).norm(), 0.0);
  EXPECT_EQ((c.d[1] * c.d[0]).norm(), 0.0);
  for (int q = 0; q < 3; ++q) EXPECT_LT((c.gram[q].diagonal().array() - 1.0).abs().maxCoeff(), 1e-14);
}

TEST(DiscreteComplex, DifferentialMatchesRawNorms) {
  // dbar(chi z^e) = chi' z^{e+1} dzbar; check the normalized entry from raw norms
  const double eps = 1e-2;
  const auto c = build_discrete_complex(6, eps);
  for (int e = 0; e < 3; ++e) {
    const double src = std::sqrt(basis_inner_product({FormType::Function, e, Radial::Cutoff},
                                                     {FormType::Function, e, Radial::Cutoff}, eps, 16));
    const double dst = std::sqrt(basis_inner_product({FormType::Dzbar, e + 1, Radial::CutoffDerivative},
                                                     {FormType::Dzbar, e + 1, Radial::CutoffDerivative}, eps, 16));
    EXPECT_NEAR(c.d[0](2 * e, 2 * e + 1).real(), src / dst, 1e-12 * src / dst);
  }
}

TEST(Adjoint, ResidualsVanish) {
  for (int n : {4, 8, 16}) {
    const auto c = build_discrete_complex(n, 1e-3);
    for (int q = 0; q < 2; ++q) {
      EXPECT_LT(adjoint_residual(c, q), 1e-10) << n << " " << q;
      EXPECT_LT(double_adjoint_residual(c, q), 1e-10) << n << " " << q;
    }
  }
  const auto c = build_discrete_complex(8, 1e-3);
  EXPECT_THROW(discrete_adjoint(c, 2), DegreeOutOfRange);
  EXPECT_THROW(laplacian(c, 3), DegreeOutOfRange);
}

TEST(Adjoint, DefiningIdentityOnRandomVectors) {
  const auto c = build_discrete_complex(8, 1e-3);
  for (int q = 0; q < 2; ++q) {
    const VecC u = random_vector(c.dim(q), 1 + q), w = random_vector(c.dim(q + 1), 7 + q);
    const cplx lhs = gram_inner(c, q + 1, c.d[q] * u, w);
    const cplx rhs = gram_inner(c, q, u, discrete_adjoint(c, q) * w);
    EXPECT_LT(std::abs(lhs - rhs), 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(Harmonic, KilledByBothOperators) {
  const auto c = build_discrete_complex(8, 1e-3);
  for (int q = 0; q < 3; ++q) {
    const MatC h = harmonic_basis(c, q);
    if (q < 2) EXPECT_LT((c.d[q] * h).cwiseAbs().maxCoeff(), 1e-10);
    if (q > 0) EXPECT_LT((discrete_adjoint(c, q - 1) * h).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Laplacian, SelfAdjointAndNonNegative) {
  const auto c = build_discrete_complex(8, 1e-3);
  for (int q = 0; q < 3; ++q) {
    const MatC gl = c.gram[q] * laplacian(c, q);
    EXPECT_LT((gl - gl.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
    const VecR ev = Eigen::SelfAdjointEigenSolver<MatC>(0.5 * (gl + gl.adjoint())).eigenvalues();
    EXPECT_GT(ev.minCoeff(), -1e-10);
  }
}

TEST(Laplacian, KernelIsHarmonicSpace) {
  const auto c = build_discrete_complex(8, 1e-3);
  for (int q = 0; q < 3; ++q) {
    const MatC lap = laplacian(c, q);
    const MatC h = harmonic_basis(c, q);
    EXPECT_LT((lap * h).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_EQ(c.dim(q) - numerical_rank(lap), h.cols()) << q;
  }
}

TEST(Hodge, DecompositionResiduals) {
  const auto c = build_discrete_complex(8, 1e-3);
  for (int q = 0; q < 3; ++q) {
    const auto s = hodge_decompose(c, q, random_vector(c.dim(q), 11 + q));
    EXPECT_LT(s.orthogonality_residual, 1e-10) << q;
    EXPECT_LT(s.reconstruction_residual, 1e-10) << q;
    EXPECT_LT(s.harmonic_residual, 1e-10) << q;
    EXPECT_LT(s.energy_residual, 1e-10) << q;
  }
  EXPECT_THROW(hodge_decompose(c, 1, VecC::Zero(3)), DegreeMismatch);
  EXPECT_THROW(hodge_decompose(c, 3, VecC::Zero(8)), DegreeOutOfRange);
}

TEST(Hodge, MatchesLeastSquaresProjection) {
  const auto c = build_discrete_complex(8, 1e-3);
  const int q = 1;
  const VecC v = random_vector(c.dim(q), 5);
  MatC span(c.dim(q), c.dim(0) + c.dim(2));
  span << c.d[0], discrete_adjoint(c, 1);
  const VecC harmonic = v - gram_projection(c.gram[q], span, v);
  const auto s = hodge_decompose(c, q, v);
  EXPECT_LT(std::sqrt(gram_norm2(c, q, s.harmonic - harmonic)), 1e-9);
  const VecC exact = gram_projection(c.gram[q], c.d[0], v);
  EXPECT_LT(std::sqrt(gram_norm2(c, q, s.image_d - exact)), 1e-9);
}

TEST(Hodge, ProjectionIgnoresExactTermsAndFixesHarmonics) {
  const auto c = build_discrete_complex(8, 1e-3);
  for (int q = 1; q < 3; ++q) {
    const VecC v = random_vector(c.dim(q), 3 * q);
    const VecC shifted = v + c.d[q - 1] * random_vector(c.dim(q - 1), 99);
    EXPECT_LT(std::sqrt(gram_norm2(c, q, project_restriction(c, q, v) - project_restriction(c, q, shifted))), 1e-9);
    const MatC h = harmonic_basis(c, q);
    const VecC pure = h * random_vector(static_cast<int>(h.cols()), 4);
    EXPECT_LT(std::sqrt(gram_norm2(c, q, project_restriction(c, q, pure) - pure)), 1e-9);
  }
}

TEST(Hodge, ZeroProjectsToZero) {
  const auto c = build_discrete_complex(8, 1e-3);
  for (int q = 0; q < 3; ++q) EXPECT_EQ(project_restriction(c, q, VecC::Zero(c.dim(q))).norm(), 0.0);
}

TEST(DimensionCount, MatchesExpected) {
  for (int n : {4, 8, 12}) {
    const auto dc = dimension_count(build_discrete_complex(n, 1e-3));
    EXPECT_TRUE(dc.consistent);
    EXPECT_EQ(dc.dims, (std::array<int, 3>{n, 2 * n, n}));
    EXPECT_EQ(dc.ranks, (std::array<int, 2>{n / 2, n / 2}));
    EXPECT_EQ(dc.harmonic, (std::array<int, 3>{n / 2, n, n / 2}));
  }
}

TEST(EpsilonStability, ConstantModeNormFollowsTail) {
  // the L2 norm converges as eps -> 0 with tail (pi/2)/|log eps|
  double previous = 0.0;
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    const auto c = build_discrete_complex(8, eps);
    const double n2 = c.norms[0](0) * c.norms[0](0);
    EXPECT_NEAR(n2, constant_mode_norm2(eps), 1e-12);
    EXPECT_GT(n2, previous);
    previous = n2;
  }
  EXPECT_LT(std::abs(previous - 0.5 * kPi / std::log(2.0)), 0.5 * kPi / std::log(1e6) + 1e-12);
}

TEST(EpsilonStability, HarmonicDimensionsStable) {
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    const auto dc = dimension_count(build_discrete_complex(8, eps));
    EXPECT_EQ(dc.harmonic, (std::array<int, 3>{4, 8, 4})) << eps;
  }
}

TEST(BasisElement, Names) {
  EXPECT_EQ((BasisElement{FormType::Function, 2, Radial::Cutoff}.to_string()), "chi*z^2");
  EXPECT_EQ((BasisElement{FormType::Dzbar, 1, Radial::CutoffDerivative}.to_string()), "chi'*z^1 dzbar");
}
