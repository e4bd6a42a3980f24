#pragma once

// The acceptance suite: eight criteria, each returning a pass flag and a short
// detail line. Shared by the command-line tool and the acceptance test.

#include "rigidity/curvature.hpp"
#include "rigidity/growth.hpp"
#include "rigidity/l2lab.hpp"
#include "rigidity/nakano.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

namespace rigidity::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

/// Classical domains of the table check: I(p,q) with p+q <= 6, II(m) m <= 5,
/// III(m) m <= 4, IV(m) 3 <= m <= 6.
inline std::vector<DomainFactor> table_check_domains() {
  std::vector<DomainFactor> out;
  for (int s = 2; s <= 6; ++s)
    for (int p = 1; p < s; ++p) out.push_back(DomainFactor::type_I(p, s - p));
  for (int m = 2; m <= 5; ++m) out.push_back(DomainFactor::type_II(m));
  for (int m = 1; m <= 4; ++m) out.push_back(DomainFactor::type_III(m));
  for (int m = 3; m <= 6; ++m) out.push_back(DomainFactor::type_IV(m));
  return out;
}

inline CriterionResult table_reproduction() {
  CriterionResult r{1, "table reproduction", true, "", 0.0, 60.0};
  double worst = 0.0;
  int count = 0;
  for (const auto& f : table_check_domains()) {
    const auto inv = factor_invariants(f);
    const double err = std::abs(inv.gamma - gamma_closed_form(f));
    worst = std::max(worst, err);
    ++count;
    if (err >= 1e-6 || inv.n != dimension_formula(f)) {
      r.passed = false;
      r.detail += f.to_string() + " mismatch; ";
    }
  }
  r.detail += std::to_string(count) + " domains, max |gamma - closed form| = " + fmt(worst);
  return r;
}

inline CriterionResult scale_invariance() {
  CriterionResult r{2, "scale invariance", true, "", 0.0, 10.0};
  double worst = 0.0;
  for (const auto& f : {DomainFactor::type_I(2, 3), DomainFactor::type_III(3), DomainFactor::type_IV(5)}) {
    const double base = factor_invariants(f).gamma;
    for (double s : {0.5, 2.0, 10.0}) worst = std::max(worst, std::abs(factor_invariants(f, s).gamma - base) / std::abs(base));
  }
  r.passed = worst < 1e-9;
  r.detail = "I(2,3), III(3), IV(5) at scales 0.5, 2, 10: max relative change " + fmt(worst);
  return r;
}

inline CriterionResult operator_properties() {
  CriterionResult r{3, "operator properties", true, "", 0.0, 60.0};
  double self_adj = 0.0, skew = 0.0, trace_rel = 0.0;
  for (const auto& f : table_check_domains()) {
    const HermitianPair pair = build_domain(f);
    const QOperator q = q_operator(curvature_tensor(pair));
    const double r_scal = riemannian_scalar_curvature(pair);
    const double lambda = q.smallest_eigenvalue();
    self_adj = std::max(self_adj, q.self_adjoint_residual);
    skew = std::max(skew, q.skew_residual);
    trace_rel = std::max(trace_rel, std::abs(r_scal - 2.0 * q.trace()) / std::abs(r_scal));
    if (!(r_scal < 0 && lambda < 0)) {
      r.passed = false;
      r.detail += f.to_string() + " has R or lambda >= 0; ";
    }
  }
  r.passed = r.passed && self_adj < 1e-10 && skew < 1e-10 && trace_rel < 1e-9;
  r.detail += "|Q - Q^*| " + fmt(self_adj) + ", skew " + fmt(skew) + ", |R - 2 tr Q|/|R| " + fmt(trace_rel);
  return r;
}

inline CriterionResult cv_identity_suite(std::uint64_t seed, int samples = 200) {
  CriterionResult r{4, "curvature identity suite", true, "", 0.0, 300.0};
  double worst_identity = 0.0, worst_slack = std::numeric_limits<double>::infinity();
  int runs = 0;
  for (const auto& f : table_check_domains()) {
    const int n = dimension_formula(f);
    if (n > 10) continue;
    for (int q = 0; q <= std::min(n, 3); ++q) {
      const auto cert = cv_certify(DomainSpec{{f}}, q, samples, seed);
      worst_identity = std::max(worst_identity, cert.max_identity_residual);
      worst_slack = std::min(worst_slack, cert.min_bound_slack);
      ++runs;
      // below gamma - 1 every nonzero form must give a negative curvature term
      bool sign_ok = cert.all_signs_ok;
      if (q < cert.gamma - 1.0 - 1e-9)
        for (const auto& rep : cert.reports)
          if (std::sqrt(rep.norm2) >= 1e-6 && !(rep.lhs < 0)) sign_ok = false;
      if (!cert.passed() || !sign_ok) {
        r.passed = false;
        r.detail += f.to_string() + " q=" + std::to_string(q) + " failed; ";
      }
    }
  }
  r.detail += std::to_string(runs) + " (domain, q) pairs x " + std::to_string(samples) + " forms: max identity residual " +
              fmt(worst_identity) + ", min bound slack " + fmt(worst_slack);
  return r;
}

inline CriterionResult growth_fixtures() {
  CriterionResult r{5, "growth fixtures", true, "", 0.0, 30.0};
  const PuncturedChart chart;  // rho down to 1e-6
  const auto dz = poincare_growth_test(fixtures::dz(), 1, chart);
  const auto dz_z = poincare_growth_test(fixtures::dz_over_z(), 1, chart);
  const auto dz_zlog = poincare_growth_test(fixtures::dz_over_zlog(), 1, chart);
  double ratio_err = 0.0;
  for (const auto& s : dz_zlog.samples) ratio_err = std::max(ratio_err, std::abs(s.ratio - 1.0));
  const auto log2 = good_metric_check(fixtures::log_power(2.0), chart);
  const auto absz = good_metric_check(fixtures::abs_z_squared(), chart);
  const bool ok_forms = dz.verdict == GrowthVerdict::PoincareGrowth &&
                        dz_z.verdict == GrowthVerdict::NotPoincareGrowth &&
                        dz_zlog.verdict == GrowthVerdict::PoincareGrowth && ratio_err < 1e-6;
  const bool ok_metrics = log2.overall && std::abs(log2.log_growth.fitted_n - 2.0) <= 0.1 && !absz.overall;
  r.passed = ok_forms && ok_metrics;
  r.detail = "dz " + to_string(dz.verdict) + ", dz/z " + to_string(dz_z.verdict) + ", dz/(z log|z|^2) " +
             to_string(dz_zlog.verdict) + " (max |ratio - 1| " + fmt(ratio_err) + "); (-log|z|^2)^2 good=" +
             (log2.overall ? "yes" : "no") + " N=" + fmt(log2.log_growth.fitted_n) +
             "; |z|^2 good=" + (absz.overall ? "yes" : "no");
  return r;
}

inline CriterionResult ke_check() {
  CriterionResult r{6, "Kahler-Einstein check", true, "", 0.0, 10.0};
  const auto grid = interior_grid(1);
  const auto disk = fixtures::poincare_disk();
  const double k = fit_ke_constant(disk, grid);
  const double res = ke_form_residual(disk, k, grid);
  const auto flat = fixtures::flat_disk();
  const double kf = fit_ke_constant(flat, grid);
  const double res_flat = ke_form_residual(flat, kf, grid);
  r.passed = res < 1e-4 && res_flat > 0.1;
  r.detail = "Poincare disk k=" + fmt(k) + " residual " + fmt(res) + "; flat residual " + fmt(res_flat);
  return r;
}

/// 1/(z log|z|^2) dz with a bounded factor 1 + zbar/2.
inline OneFormEvaluator poincare_growth_integrand() {
  return [](cplx z) {
    const double l = std::log(std::norm(z));
    return std::pair<cplx, cplx>{(1.0 + 0.5 * std::conj(z)) / (z * l), 0.0};
  };
}

inline OneFormEvaluator log_pole_integrand() {
  return [](cplx z) { return std::pair<cplx, cplx>{1.0 / z, 0.0}; };
}

inline std::vector<double> decay_deltas() { return {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}; }

inline CriterionResult boundary_decay() {
  CriterionResult r{7, "boundary decay", true, "", 0.0, 10.0};
  const auto decay = boundary_integral_decay(poincare_growth_integrand(), decay_deltas());
  const auto pole = boundary_integral_decay(log_pole_integrand(), decay_deltas());
  r.passed = decay.monotone_decreasing && std::abs(decay.fitted_rate - 1.0) <= 0.2 && pole.constant;
  r.detail = "decay monotone=" + std::string(decay.monotone_decreasing ? "yes" : "no") + " rate " +
             fmt(decay.fitted_rate) + "; dz/z constant=" + (pole.constant ? "yes" : "no") + " value " +
             fmt(pole.values.front());
  return r;
}

struct LabSummary {
  double adjoint_residual = 0.0;
  double energy_identity_residual = 0.0;
  double decomposition_residual = 0.0;
  double projection_residual = 0.0;
  DimensionCount dims;
  bool dimension_exact = false;
};

inline VecC random_vector(int size, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  VecC v(size);
  for (auto& x : v) {
    const double re = normal(rng);
    x = cplx(re, normal(rng));
  }
  return v;
}

/// Residuals of one discrete complex: adjointness (both degrees and the
/// double adjoint), energy identity and decomposition on seeded random
/// vectors, and gauge invariance of the harmonic projection.
inline LabSummary lab_summary(const DiscreteComplex& c, std::uint64_t seed) {
  LabSummary s;
  for (int q = 0; q < 2; ++q)
    s.adjoint_residual = std::max({s.adjoint_residual, adjoint_residual(c, q), double_adjoint_residual(c, q)});
  std::mt19937_64 rng(seed);
  for (int q = 0; q < 3; ++q) {
    const VecC v = random_vector(c.dim(q), rng);
    const HodgeSplit split = hodge_decompose(c, q, v);
    s.energy_identity_residual = std::max(s.energy_identity_residual, split.energy_residual);
    s.decomposition_residual = std::max({s.decomposition_residual, split.orthogonality_residual,
                                         split.reconstruction_residual, split.harmonic_residual});
    if (q > 0) {
      const VecC u = random_vector(c.dim(q - 1), rng);
      const VecC shifted = v + c.d[q - 1] * u;
      const VecC diff = project_restriction(c, q, shifted) - project_restriction(c, q, v);
      s.projection_residual = std::max(s.projection_residual, std::sqrt(gram_norm2(c, q, diff)) /
                                                                  std::max(1.0, std::sqrt(gram_norm2(c, q, shifted))));
    }
  }
  s.dims = dimension_count(c);
  const int n = c.basis_size;
  s.dimension_exact = s.dims.consistent && s.dims.dims == std::array<int, 3>{n, 2 * n, n} &&
                      s.dims.harmonic == std::array<int, 3>{n / 2, n, n / 2} &&
                      (c.d[1] * c.d[0]).cwiseAbs().maxCoeff() == 0.0;
  return s;
}

inline CriterionResult discrete_hodge_suite(std::uint64_t seed) {
  CriterionResult r{8, "discrete Hodge suite", true, "", 0.0, 30.0};
  double worst = 0.0;
  for (int n : {8, 16, 32}) {
    const auto c = build_discrete_complex(n, 1e-2, 16);
    const auto s = lab_summary(c, seed);
    const double w = std::max({s.adjoint_residual, s.energy_identity_residual, s.decomposition_residual,
                               s.projection_residual});
    worst = std::max(worst, w);
    if (!(w < 1e-10) || !s.dimension_exact) {
      r.passed = false;
      r.detail += "basis " + std::to_string(n) + " failed; ";
    }
  }
  r.detail += "basis sizes 8, 16, 32: max residual " + fmt(worst) + ", dimension counts " +
              (r.passed ? "exact" : "checked");
  return r;
}

/// Runs the criteria in order; `on_result` sees each result as it completes.
inline std::vector<CriterionResult> run_all(std::uint64_t seed,
                                            const std::function<void(const CriterionResult&)>& on_result = {}) {
  const std::vector<std::function<CriterionResult()>> suite = {
      table_reproduction, scale_invariance, operator_properties, [seed] { return cv_identity_suite(seed); },
      growth_fixtures,    ke_check,         boundary_decay,      [seed] { return discrete_hodge_suite(seed); }};
  std::vector<CriterionResult> out;
  for (const auto& criterion : suite) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = criterion();
    } catch (const std::exception& e) {
      r.id = static_cast<int>(out.size()) + 1;
      r.passed = false;
      r.detail = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace rigidity::acceptance
