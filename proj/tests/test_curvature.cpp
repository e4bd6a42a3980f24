#include "rigidity/curvature.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace rigidity;

namespace {

// Brute-force curvature from matrix commutators. The real forms used here meet
// i*g only in 0, so p (x) C embeds in gl(N, C) and complex brackets are plain
// matrix commutators.
CurvatureTensor brute_force_curvature(const HermitianPair& pair) {
  const int n = pair.n, dp = pair.dim_p();
  const MatC frame = orthonormal_frame(pair);
  const Eigen::Index rows = pair.p_basis.front().size();
  MatC coords(rows, dp);  // vectorized p basis, for complex coordinates
  for (int a = 0; a < dp; ++a) coords.col(a) = pair.p_basis[a].reshaped();
  auto combine = [&](const VecC& c) {
    MatC x = MatC::Zero(pair.p_basis.front().rows(), pair.p_basis.front().cols());
    for (int a = 0; a < dp; ++a) x += c(a) * pair.p_basis[a];
    return x;
  };
  const auto solver = coords.colPivHouseholderQr();
  const MatC g = pair.base_metric.cast<cplx>();
  std::vector<MatC> e(n), ebar(n);
  for (int j = 0; j < n; ++j) {
    e[j] = combine(frame.col(j));
    ebar[j] = combine(frame.col(j).conjugate());
  }
  CurvatureTensor out(n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const MatC inner = commutator(e[j], ebar[k]);
      for (int l = 0; l < n; ++l) {
        const MatC w = commutator(inner, e[l]);
        const VecC wc = solver.solve(VecC(w.reshaped()));
        for (int m = 0; m < n; ++m) out(j, k, l, m) = -(wc.transpose() * g * frame.col(m).conjugate())(0);
      }
    }
  return out;
}

double max_difference(const CurvatureTensor& a, const CurvatureTensor& b) {
  double worst = 0.0;
  const int n = a.n();
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) worst = std::max(worst, std::abs(a(j, k, l, m) - b(j, k, l, m)));
  return worst;
}

}  // namespace

TEST(CurvatureTensor, DiskHasSingleNegativeComponent) {
  const auto t = curvature_tensor(build_domain(DomainFactor::type_I(1, 1)));
  ASSERT_EQ(t.n(), 1);
  EXPECT_LT(t(0, 0, 0, 0).real(), 0.0);
  EXPECT_NEAR(t(0, 0, 0, 0).imag(), 0.0, 1e-14);
}

TEST(CurvatureTensor, MatchesMatrixCommutatorOracle) {
  for (const auto& f : {DomainFactor::type_I(2, 2), DomainFactor::type_II(3), DomainFactor::type_III(2),
                        DomainFactor::type_IV(3), DomainFactor::type_IV(4)}) {
    const auto pair = build_domain(f);
    EXPECT_LT(max_difference(curvature_tensor(pair), brute_force_curvature(pair)), 1e-10) << f.to_string();
  }
}

TEST(CurvatureTensor, SymmetriesOfSiegelAndLieBall) {
  const auto t3 = curvature_tensor(build_domain(DomainFactor::type_III(2)));
  EXPECT_EQ(t3.n(), 3);
  EXPECT_LT(t3.kahler_residual(), 1e-10);
  EXPECT_LT(t3.hermitian_residual(), 1e-12);
  const auto t4 = curvature_tensor(build_domain(DomainFactor::type_IV(3)));
  EXPECT_LT(t4.hermitian_residual(), 1e-12);
  EXPECT_LT(t4.kahler_residual(), 1e-10);
}

TEST(QOperator, DiskGivesGammaTwo) {
  const auto q = q_operator(curvature_tensor(build_domain(DomainFactor::type_I(1, 1))));
  ASSERT_EQ(q.matrix.rows(), 1);
  const double r = 2.0 * q.trace(), lambda = q.smallest_eigenvalue();
  EXPECT_NEAR(r / lambda, 2.0, 1e-12);
}

TEST(QOperator, LiftAnnihilatesSkewTensors) {
  for (const auto& f : {DomainFactor::type_I(2, 2), DomainFactor::type_III(2), DomainFactor::type_IV(5)}) {
    const auto t = curvature_tensor(build_domain(f));
    const MatC lift = curvature_lift(t);
    const int n = t.n();
    VecC v = VecC::Zero(n * n);
    v(0 * n + 1) = 1.0;
    v(1 * n + 0) = -1.0;
    EXPECT_LT((lift * v).norm(), 1e-10) << f.to_string();
    EXPECT_LT(skew_annihilation_residual(lift, n), 1e-10);
  }
}

TEST(QOperator, SiegelSpaceSixBySix) {
  const auto q = q_operator(curvature_tensor(build_domain(DomainFactor::type_III(2))));
  ASSERT_EQ(q.matrix.rows(), 6);
  EXPECT_LT(q.self_adjoint_residual, 1e-10);
  const double gamma = 2.0 * q.trace() / (3 * q.smallest_eigenvalue());
  EXPECT_NEAR(gamma, 3.0, 1e-9);
}

TEST(QOperator, RejectsTensorWithoutSkewAnnihilation) {
  CurvatureTensor t(2);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l)
        for (int m = 0; m < 2; ++m) t(j, k, l, m) = cplx(normal(rng), normal(rng));
  EXPECT_THROW(q_operator(t), SymmetryViolation);
}

TEST(QOperator, TraceMatchesRiemannianScalarCurvature) {
  for (const auto& f : {DomainFactor::type_I(1, 3), DomainFactor::type_I(2, 3), DomainFactor::type_II(4),
                        DomainFactor::type_III(3), DomainFactor::type_IV(6)}) {
    const auto pair = build_domain(f);
    const auto q = q_operator(curvature_tensor(pair));
    const double r = riemannian_scalar_curvature(pair);
    EXPECT_LT(std::abs(r - 2.0 * q.trace()) / std::abs(r), 1e-9) << f.to_string();
    EXPECT_LT(r, 0.0);
    EXPECT_LT(q.smallest_eigenvalue(), 0.0);
  }
}

TEST(DomainInvariants, Examples) {
  const auto i22 = domain_invariants(parse_domain_spec("I(2,2)"));
  EXPECT_EQ(i22.n, 4);
  EXPECT_NEAR(i22.gamma, 4.0, 1e-9);
  EXPECT_EQ(i22.vanishing_max_q, 2);
  const auto ii3 = domain_invariants(parse_domain_spec("II(3)"));
  EXPECT_EQ(ii3.n, 3);
  EXPECT_NEAR(ii3.gamma, 4.0, 1e-9);
  const auto prod = domain_invariants(parse_domain_spec("I(1,1)xIII(2)"));
  EXPECT_NEAR(prod.gamma, 2.0, 1e-9);
  EXPECT_EQ(prod.n, 4);
  EXPECT_FALSE(prod.scalar_curvature.has_value());
  ASSERT_EQ(prod.factors.size(), 2u);
}

TEST(DomainInvariants, UnitBallFlagsAllGroups) {
  EXPECT_TRUE(domain_invariants(parse_domain_spec("I(3,1)")).all_groups_vanish);
  EXPECT_TRUE(domain_invariants(parse_domain_spec("I(1,4)")).all_groups_vanish);
  EXPECT_FALSE(domain_invariants(parse_domain_spec("I(2,2)")).all_groups_vanish);
}

TEST(DomainInvariants, ReferenceFactors) {
  const auto v = domain_invariants(parse_domain_spec("V"));
  EXPECT_TRUE(v.reference_only);
  EXPECT_EQ(v.n, 16);
  EXPECT_EQ(v.gamma, 12.0);
  const auto mixed = domain_invariants(parse_domain_spec("IV(5)xVI"));
  EXPECT_EQ(mixed.n, 5 + 27);
  EXPECT_NEAR(mixed.gamma, 5.0, 1e-9);
  EXPECT_TRUE(mixed.reference_only);
}

TEST(DomainInvariants, VanishingRange) {
  EXPECT_EQ(vanishing_max_q(2.0), 0);
  EXPECT_EQ(vanishing_max_q(4.0), 2);
  EXPECT_EQ(vanishing_max_q(4.5), 3);
  for (const auto& f : table_domains(6)) EXPECT_GE(factor_invariants(f).vanishing_max_q, 0) << f.to_string();
}

TEST(DomainInvariants, ParameterOutOfRange) {
  EXPECT_THROW(domain_invariants(parse_domain_spec("III(0)")), ParameterOutOfRange);
}

TEST(GammaTable, ClassicalRowsMatchClosedForms) {
  for (const auto& row : gamma_table(6)) {
    EXPECT_TRUE(row.match) << row.factor.to_string();
    if (!row.reference) EXPECT_NEAR(row.gamma, row.gamma_reference, 1e-6);
  }
}

TEST(GammaTable, Examples) {
  const auto rows = gamma_table(6);
  auto find = [&](const std::string& name) {
    for (const auto& r : rows)
      if (r.factor.to_string() == name) return r;
    ADD_FAILURE() << name << " missing";
    return GammaRow{};
  };
  EXPECT_NEAR(find("III(1)").gamma, 2.0, 1e-9);
  EXPECT_NEAR(find("IV(5)").gamma, 5.0, 1e-9);
  EXPECT_EQ(find("IV(5)").n, 5);
  const auto v = find("V");
  EXPECT_EQ(v.gamma, 12.0);
  EXPECT_EQ(v.n, 16);
  EXPECT_TRUE(v.reference);
  const auto vi = find("VI");
  EXPECT_EQ(vi.gamma, 18.0);
  EXPECT_EQ(vi.n, 27);
}

TEST(GammaProperties, IntegerValuedUpToDimensionThirty) {
  for (const auto& f : table_domains(8, 30)) {
    const double gamma = factor_invariants(f).gamma;
    EXPECT_NEAR(gamma, std::round(gamma), 1e-6) << f.to_string();
    EXPECT_GE(std::round(gamma), 2.0);
  }
}

TEST(GammaProperties, ScaleInvariance) {
  for (const auto& f : {DomainFactor::type_I(1, 2), DomainFactor::type_II(4), DomainFactor::type_IV(4)}) {
    const double base = factor_invariants(f).gamma;
    for (double c : {0.5, 2.0, 10.0}) {
      const auto inv = factor_invariants(f, c);
      EXPECT_LT(std::abs(inv.gamma - base) / base, 1e-9) << f.to_string() << " scale " << c;
      // R and lambda both scale like 1/c
      EXPECT_NEAR(*inv.scalar_curvature * c, *factor_invariants(f).scalar_curvature, 1e-9);
    }
  }
}

TEST(GammaProperties, DegenerateFactorDetection) {
  for (const char* s : {"I(1,1)", "II(2)", "III(1)", "I(2,2)xIII(1)", "IV(3)", "I(1,2)", "II(3)xIII(2)", "V"}) {
    const auto spec = parse_domain_spec(s);
    const bool is_two = std::abs(domain_invariants(spec).gamma - 2.0) < 1e-9;
    EXPECT_EQ(is_two, has_degenerate_factor(spec)) << s;
  }
}
