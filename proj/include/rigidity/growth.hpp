#pragma once

// Charts (D*)^r x D^{n-r} with the Poincare metric and numeric evidence for
// Poincare growth of forms, good metrics, the Kahler-Einstein form identity,
// boundary-integral decay and boundedness of log-twisted sections.
//
// Forms reuse the monomial bitmasks of exterior.hpp: bit i is dz_i, bit n+i
// is dzbar_i.

#include "rigidity/exterior.hpp"
#include "rigidity/quadrature.hpp"

#include <cctype>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>

namespace rigidity {

struct SamplingPlan {
  double rho_min = 1e-6;
  double rho_max = 0.5;
  int per_decade = 8;
  int angles = 8;
};

/// Geometric radial grid from rho_max down to rho_min (both included).
inline std::vector<double> radial_grid(const SamplingPlan& plan) {
  std::vector<double> out;
  const double decades = std::log10(plan.rho_max / plan.rho_min);
  const int steps = std::max(1, static_cast<int>(std::ceil(decades * plan.per_decade)));
  for (int i = 0; i <= steps; ++i) out.push_back(plan.rho_max * std::pow(plan.rho_min / plan.rho_max, double(i) / steps));
  return out;
}

struct PuncturedChart {
  int r = 1;  // punctured factors come first
  int n = 1;
  SamplingPlan plan;

  void validate() const {
    if (r < 1 || r > n) throw ParameterOutOfRange("chart needs 1 <= r <= n");
    if (!(plan.rho_min > 0 && plan.rho_min < plan.rho_max && plan.rho_max < 1))
      throw ParameterOutOfRange("chart needs 0 < rho_min < rho_max < 1");
  }

  /// Sample points at radius rho: punctured coordinates rho e^{i theta},
  /// unpunctured ones fixed inside the disk.
  std::vector<VecC> points_at(double rho) const {
    std::vector<VecC> pts;
    for (int a = 0; a < plan.angles; ++a) {
      const double theta = 2.0 * std::numbers::pi * (a + 0.5) / plan.angles;
      VecC z(n);
      for (int i = 0; i < n; ++i) z(i) = i < r ? std::polar(rho, theta + 0.7 * i) : std::polar(0.3, theta + 1.0);
      pts.push_back(z);
    }
    return pts;
  }
};

/// Diagonal Poincare metric: 1/(|z|^2 log^2|z|^2) on punctured coordinates and
/// 4/(1-|z|^2)^2 on the others.
inline MatR poincare_metric_at(const PuncturedChart& chart, const VecC& z) {
  MatR g = MatR::Zero(chart.n, chart.n);
  for (int i = 0; i < chart.n; ++i) {
    const double t = std::norm(z(i));
    if (i < chart.r) {
      if (t == 0.0) throw OnDivisor("punctured coordinate " + std::to_string(i) + " is zero");
      const double l = std::log(t);
      g(i, i) = 1.0 / (t * l * l);
    } else {
      g(i, i) = 4.0 / ((1.0 - t) * (1.0 - t));
    }
  }
  return g;
}

struct FormTerm {
  Mask mask = 0;
  cplx coeff;
};
/// A p-form evaluator returns coefficients on canonical monomials. Several
/// terms may share a mask (entries of a matrix-valued form).
using FormEvaluator = std::function<std::vector<FormTerm>(const VecC&)>;

/// sup over coordinate frame vectors of |eta(t_1..t_p)|^2 / prod |t_i|_P^2.
inline double growth_ratio(const PuncturedChart& chart, const FormEvaluator& eta, int degree, const VecC& z) {
  const MatR g = poincare_metric_at(chart, z);
  std::vector<FormTerm> terms;
  try {
    terms = eta(z);
  } catch (const std::exception& e) {
    throw EvaluationFailure(e.what());
  }
  double worst = 0.0;
  for (const auto& t : terms) {
    if (std::popcount(t.mask) != degree) throw EvaluationFailure("term of wrong degree in form evaluator");
    if (!std::isfinite(std::abs(t.coeff))) throw EvaluationFailure("non-finite form coefficient");
    double denom = 1.0;
    for (int bit = 0; bit < 2 * chart.n; ++bit)
      if (t.mask & (Mask{1} << bit)) denom *= g(bit % chart.n, bit % chart.n);
    worst = std::max(worst, std::norm(t.coeff) / denom);
  }
  return worst;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
};

inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double k = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / k, my = sy / k;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

struct GrowthSample {
  double rho = 0.0;
  double ratio = 0.0;  // max over angles
};

enum class GrowthVerdict { PoincareGrowth, NotPoincareGrowth, Inconclusive };

inline std::string to_string(GrowthVerdict v) {
  switch (v) {
    case GrowthVerdict::PoincareGrowth: return "poincare-growth";
    case GrowthVerdict::NotPoincareGrowth: return "not-poincare-growth";
    case GrowthVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct GrowthReport {
  std::vector<GrowthSample> samples;
  double sup_ratio = 0.0;
  /// Exponent N of the fit ratio ~ (-log rho^2)^N over the last decade.
  double fitted_exponent = 0.0;
  double fit_r2 = 1.0;
  GrowthVerdict verdict = GrowthVerdict::Inconclusive;
};

/// Slopes below this count as a non-increasing trend.
inline constexpr double kTrendTolerance = 0.05;
inline constexpr double kMinFitR2 = 0.9;

namespace detail {

/// Fit of log(values) against log(-log rho^2) over the samples with rho <= 10 rho_min.
inline LinearFit last_decade_log_fit(const std::vector<GrowthSample>& samples, double rho_min, bool* vanished) {
  std::vector<double> x, y;
  *vanished = false;
  for (const auto& s : samples) {
    if (s.rho > 10.0 * rho_min * (1 + 1e-12)) continue;
    if (s.ratio <= 0.0) {
      *vanished = true;
      continue;
    }
    x.push_back(std::log(-std::log(s.rho * s.rho)));
    y.push_back(std::log(s.ratio));
  }
  if (x.size() < 2) return {};
  return fit_line(x, y);
}

}  // namespace detail

inline GrowthReport poincare_growth_test(const FormEvaluator& eta, int degree, const PuncturedChart& chart) {
  chart.validate();
  GrowthReport rep;
  for (double rho : radial_grid(chart.plan)) {
    double m = 0.0;
    for (const auto& z : chart.points_at(rho)) m = std::max(m, growth_ratio(chart, eta, degree, z));
    rep.samples.push_back({rho, m});
    rep.sup_ratio = std::max(rep.sup_ratio, m);
  }
  if (!std::isfinite(rep.sup_ratio)) {
    rep.verdict = GrowthVerdict::NotPoincareGrowth;
    return rep;
  }
  bool vanished = false;
  const LinearFit fit = detail::last_decade_log_fit(rep.samples, chart.plan.rho_min, &vanished);
  rep.fitted_exponent = fit.slope;
  rep.fit_r2 = fit.r2;
  if (vanished || fit.slope <= kTrendTolerance) {
    rep.verdict = GrowthVerdict::PoincareGrowth;
  } else if (fit.r2 >= kMinFitR2) {
    rep.verdict = GrowthVerdict::NotPoincareGrowth;
  } else {
    rep.verdict = GrowthVerdict::Inconclusive;
  }
  return rep;
}

// ---- metrics and connections -------------------------------------------------

using MetricEvaluator = std::function<MatC(const VecC&)>;

struct MetricSampler {
  MetricEvaluator h;
  int n = 1;               // chart dimension
  double rel_step = 1e-5;  // finite-difference step relative to |z_i|
};

/// Step relative to |z_i|; absolute at the origin.
inline double relative_step(double rel, cplx zi) { return zi == 0.0 ? rel : rel * std::abs(zi); }
inline double fd_step(const MetricSampler& s, cplx zi) { return relative_step(s.rel_step, zi); }

/// Wirtinger derivatives (d/dz_i, d/dzbar_i) of a matrix function by central
/// differences with absolute step `step`.
template <class Fn>
std::pair<MatC, MatC> wirtinger(const Fn& f, const VecC& z, int i, double step) {
  VecC zp = z, zm = z;
  zp(i) += step;
  zm(i) -= step;
  const MatC fx = (f(zp) - f(zm)) / (2.0 * step);
  zp = z;
  zm = z;
  zp(i) += cplx(0.0, step);
  zm(i) -= cplx(0.0, step);
  const MatC fy = (f(zp) - f(zm)) / (2.0 * step);
  return {0.5 * (fx - I_unit * fy), 0.5 * (fx + I_unit * fy)};
}

inline MatC checked_inverse(const MatC& h) {
  Eigen::FullPivLU<MatC> lu(h);
  const double scale = h.cwiseAbs().maxCoeff();
  if (!(scale > 0) || !lu.isInvertible() || lu.rcond() < 1e-13) throw SingularMetric("metric is numerically singular");
  return lu.inverse();
}

/// omega_h = dh h^{-1}: coefficient matrices of dz_1..dz_n.
inline std::vector<MatC> chern_connection(const MetricSampler& s, const VecC& z) {
  const MatC h_inv = checked_inverse(s.h(z));
  std::vector<MatC> out;
  for (int i = 0; i < s.n; ++i) {
    const auto [dz, dzbar] = wirtinger(s.h, z, i, fd_step(s, z(i)));
    (void)dzbar;
    out.push_back(dz * h_inv);
  }
  return out;
}

/// omega_h as a matrix-valued 1-form evaluator (one term per entry).
inline FormEvaluator connection_form(const MetricSampler& s) {
  return [s](const VecC& z) {
    std::vector<FormTerm> terms;
    const auto omega = chern_connection(s, z);
    for (int i = 0; i < s.n; ++i)
      for (Eigen::Index a = 0; a < omega[i].size(); ++a) terms.push_back({Mask{1} << i, omega[i](a)});
    return terms;
  };
}

/// d omega_h as a matrix-valued 2-form evaluator. Outer differences use a
/// coarser relative step than the inner ones.
inline FormEvaluator connection_curvature_form(const MetricSampler& s, double outer_rel_step = 1e-3) {
  return [s, outer_rel_step](const VecC& z) {
    const int n = s.n;
    std::vector<FormTerm> terms;
    for (int i = 0; i < n; ++i) {
      auto omega_i = [&](const VecC& w) { return chern_connection(s, w)[i]; };
      for (int j = 0; j < n; ++j) {
        const double step = relative_step(outer_rel_step, z(j));
        const auto [d, dbar] = wirtinger(omega_i, z, j, step);
        // dzbar_j ^ dz_i = -(dz_i ^ dzbar_j)
        const Mask anti = (Mask{1} << i) | (Mask{1} << (n + j));
        for (Eigen::Index a = 0; a < dbar.size(); ++a) terms.push_back({anti, -dbar(a)});
        if (j != i) {
          // dz_j ^ dz_i in canonical order
          const Mask hol = (Mask{1} << i) | (Mask{1} << j);
          const double sign = j < i ? 1.0 : -1.0;
          for (Eigen::Index a = 0; a < d.size(); ++a) terms.push_back({hol, sign * d(a)});
        }
      }
    }
    return terms;
  };
}

struct LogGrowthReport {
  bool verdict = false;        // entries grow at most like C(log)^N
  double fitted_n = 0.0;       // N over the last decade
  double previous_n = 0.0;     // N over the decade before
  double sup_entry = 0.0;
};

/// Log-growth of max |entry| of a matrix function: the exponent N in
/// C(-log rho^2)^N must be stable across the last two decades (polynomial
/// growth makes it drift upward).
template <class Fn>
LogGrowthReport log_growth_check(const Fn& entries, const PuncturedChart& chart) {
  LogGrowthReport rep;
  std::vector<GrowthSample> samples;
  for (double rho : radial_grid(chart.plan)) {
    double m = 0.0;
    for (const auto& z : chart.points_at(rho)) m = std::max(m, entries(z).cwiseAbs().maxCoeff());
    samples.push_back({rho, m});
    rep.sup_entry = std::max(rep.sup_entry, m);
  }
  auto decade_fit = [&](double lo) {
    std::vector<double> x, y;
    for (const auto& s : samples) {
      if (s.rho < lo * (1 - 1e-12) || s.rho > 10.0 * lo * (1 + 1e-12) || s.ratio <= 0.0) continue;
      x.push_back(std::log(-std::log(s.rho * s.rho)));
      y.push_back(std::log(s.ratio));
    }
    return x.size() >= 2 ? fit_line(x, y).slope : 0.0;
  };
  rep.fitted_n = decade_fit(chart.plan.rho_min);
  rep.previous_n = decade_fit(10.0 * chart.plan.rho_min);
  if (!std::isfinite(rep.sup_entry)) return rep;
  if (rep.fitted_n <= kTrendTolerance) {
    rep.verdict = true;  // bounded or decaying
  } else {
    rep.verdict = std::abs(rep.fitted_n - rep.previous_n) <= 0.1 * std::max(1.0, std::abs(rep.fitted_n));
  }
  return rep;
}

struct GoodMetricReport {
  LogGrowthReport log_growth;
  LogGrowthReport inverse_log_growth;
  GrowthReport connection;
  GrowthReport d_connection;
  bool connection_good = false;
  bool d_connection_good = false;
  bool overall = false;
};

inline GoodMetricReport good_metric_check(const MetricSampler& s, const PuncturedChart& chart) {
  chart.validate();
  GoodMetricReport rep;
  rep.log_growth = log_growth_check(s.h, chart);
  rep.inverse_log_growth = log_growth_check([&](const VecC& z) { return checked_inverse(s.h(z)); }, chart);
  rep.connection = poincare_growth_test(connection_form(s), 1, chart);
  rep.d_connection = poincare_growth_test(connection_curvature_form(s), 2, chart);
  rep.connection_good = rep.connection.verdict == GrowthVerdict::PoincareGrowth;
  rep.d_connection_good = rep.d_connection.verdict == GrowthVerdict::PoincareGrowth;
  rep.overall = rep.log_growth.verdict && rep.inverse_log_growth.verdict && rep.connection_good && rep.d_connection_good;
  return rep;
}

/// Metric h^{-T} induced on the dual bundle.
inline MetricSampler dual_metric(const MetricSampler& s) {
  MetricSampler d = s;
  d.h = [h = s.h](const VecC& z) -> MatC { return checked_inverse(h(z)).transpose(); };
  return d;
}

// ---- Kahler-Einstein form identity ---------------------------------------------

/// Interior polar grid of the unit polydisk chart, |z_i| <= r_max.
inline std::vector<VecC> interior_grid(int n, double r_max = 0.8, int radii = 6, int angles = 8) {
  std::vector<VecC> pts;
  for (int a = 0; a < radii; ++a)
    for (int b = 0; b < angles; ++b) {
      const double r = r_max * a / std::max(1, radii - 1);
      const double theta = 2.0 * std::numbers::pi * b / angles;
      VecC z(n);
      for (int i = 0; i < n; ++i) z(i) = std::polar(r * (1.0 - 0.1 * i), theta + 0.9 * i);
      pts.push_back(z);
      if (a == 0) break;  // the origin once
    }
  return pts;
}

/// Coefficients of i dd^c-type form: (d_j dbar_k log det h)(z), by a real
/// central-difference Hessian with step `step`.
inline MatC ddbar_log_det(const MetricSampler& s, const VecC& z, double step = 1e-4) {
  const int n = s.n;
  auto u = [&](const VecC& w) { return std::log(std::abs(s.h(w).determinant())); };
  auto shifted = [&](int a, double da, int b, double db) {
    VecC w = z;
    w(a / 2) += a % 2 == 0 ? cplx(da, 0) : cplx(0, da);
    w(b / 2) += b % 2 == 0 ? cplx(db, 0) : cplx(0, db);
    return u(w);
  };
  // real Hessian over (x_0, y_0, x_1, y_1, ...)
  MatR hess(2 * n, 2 * n);
  for (int a = 0; a < 2 * n; ++a)
    for (int b = a; b < 2 * n; ++b) {
      double v;
      if (a == b) {
        v = (shifted(a, step, a, 0) - 2.0 * u(z) + shifted(a, -step, a, 0)) / (step * step);
      } else {
        v = (shifted(a, step, b, step) - shifted(a, step, b, -step) - shifted(a, -step, b, step) +
             shifted(a, -step, b, -step)) /
            (4.0 * step * step);
      }
      hess(a, b) = v;
      hess(b, a) = v;
    }
  MatC out(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const double xx = hess(2 * j, 2 * k), yy = hess(2 * j + 1, 2 * k + 1);
      const double xy = hess(2 * j, 2 * k + 1), yx = hess(2 * j + 1, 2 * k);
      out(j, k) = 0.25 * cplx(xx + yy, xy - yx);
    }
  return out;
}

/// Least-squares k in h_{jk} = k (d_j dbar_k log det h) over the grid; 0 when
/// the right side vanishes identically.
inline double fit_ke_constant(const MetricSampler& s, const std::vector<VecC>& grid) {
  double num = 0.0, den = 0.0;
  for (const auto& z : grid) {
    const MatC a = s.h(z), b = ddbar_log_det(s, z);
    num += (b.conjugate().array() * a.array()).real().sum();
    den += b.squaredNorm();
  }
  return den > 1e-300 ? num / den : 0.0;
}

/// max_{z, j, k} |h_{jk}(z) - k (d_j dbar_k log det h)(z)|, i.e. the largest
/// entry of omega_h - k i ddbar log det h.
inline double ke_form_residual(const MetricSampler& s, double k, const std::vector<VecC>& grid) {
  double worst = 0.0;
  for (const auto& z : grid) worst = std::max(worst, (s.h(z) - k * ddbar_log_det(s, z)).cwiseAbs().maxCoeff());
  return worst;
}

// ---- boundary integrals -------------------------------------------------------

/// A 1-form a dz + b dzbar on the punctured disk.
using OneFormEvaluator = std::function<std::pair<cplx, cplx>(cplx)>;

struct DecayReport {
  std::vector<double> deltas;
  std::vector<double> values;  // |integral over |z| = delta|
  double fitted_rate = std::numeric_limits<double>::quiet_NaN();  // values ~ |log delta|^(-rate)
  bool monotone_decreasing = false;
  bool constant = false;  // all values within 1e-8 of the first
};

/// |oint_{|z|=delta} a dz + b dzbar| by the periodic trapezoid rule, checked
/// against a doubled resolution.
inline double circle_integral(const OneFormEvaluator& f, double delta, int points = 256) {
  auto integrate = [&](int m) {
    return periodic_trapezoid(
        [&](double theta) {
          const cplx z = std::polar(delta, theta);
          const auto [a, b] = f(z);
          return a * (I_unit * z) + b * (-I_unit * std::conj(z));
        },
        m);
  };
  const cplx coarse = integrate(points), fine = integrate(2 * points);
  if (!std::isfinite(std::abs(fine)) || std::abs(coarse - fine) > 1e-10 * std::max(1.0, std::abs(fine)))
    throw QuadratureFailure("circle integral not resolved at delta = " + std::to_string(delta));
  return std::abs(fine);
}

inline DecayReport boundary_integral_decay(const OneFormEvaluator& f, const std::vector<double>& deltas) {
  for (std::size_t i = 1; i < deltas.size(); ++i)
    if (!(deltas[i] < deltas[i - 1])) throw QuadratureFailure("delta sequence must be strictly decreasing");
  DecayReport rep;
  rep.deltas = deltas;
  for (double d : deltas) rep.values.push_back(circle_integral(f, d));
  rep.monotone_decreasing = true;
  rep.constant = true;
  for (std::size_t i = 1; i < rep.values.size(); ++i) {
    if (!(rep.values[i] < rep.values[i - 1])) rep.monotone_decreasing = false;
    if (std::abs(rep.values[i] - rep.values[0]) > 1e-8) rep.constant = false;
  }
  std::vector<double> x, y;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (rep.values[i] <= 0.0) continue;
    x.push_back(std::log(std::abs(std::log(deltas[i]))));
    y.push_back(std::log(rep.values[i]));
  }
  if (x.size() >= 2) rep.fitted_rate = -fit_line(x, y).slope;
  return rep;
}

// ---- log-twisted sections ------------------------------------------------------

struct BoundedSectionReport {
  double sup = 0.0;               // sup |f|^2 |s|^2 over samples
  double polynomial_exponent = 0.0;  // slope of log max vs log(1/rho) over the last decade
  bool tends_to_zero = false;
  bool bounded = false;
};

/// Samples |f s|^2 = |f|^2 |s|^2 on a 1-dimensional punctured chart.
inline BoundedSectionReport bounded_section_check(const std::function<double(cplx)>& section_norm2,
                                                  const std::function<cplx(cplx)>& f, const SamplingPlan& plan) {
  PuncturedChart chart{1, 1, plan};
  chart.validate();
  BoundedSectionReport rep;
  std::vector<double> x, y;
  const double decade = 10.0 * plan.rho_min;
  double at_min = 0.0, at_decade = 0.0, decade_gap = std::numeric_limits<double>::infinity();
  for (double rho : radial_grid(plan)) {
    double m = 0.0;
    for (const auto& z : chart.points_at(rho)) m = std::max(m, std::norm(f(z(0))) * section_norm2(z(0)));
    rep.sup = std::max(rep.sup, m);
    if (rho <= decade * (1 + 1e-12) && m > 0.0) {
      x.push_back(std::log(1.0 / rho));
      y.push_back(std::log(m));
    }
    if (std::abs(rho / plan.rho_min - 1.0) < 1e-9) at_min = m;
    if (const double gap = std::abs(std::log(rho / decade)); gap < decade_gap) {
      decade_gap = gap;
      at_decade = m;  // sample closest to ten times rho_min
    }
  }
  if (x.size() >= 2) rep.polynomial_exponent = fit_line(x, y).slope;
  rep.tends_to_zero = at_min <= at_decade;
  rep.bounded = std::isfinite(rep.sup) && rep.polynomial_exponent <= kTrendTolerance;
  return rep;
}

// ---- custom one-variable forms ---------------------------------------------

/// Coefficient f(z) given as a product of factors separated by '*':
/// a number, z^a, zbar^a or L^a with L = log|z|^2 (exponent 1 when omitted).
/// Example: "2*z^-1*L^-1".
inline std::function<cplx(cplx)> parse_coefficient(std::string_view text) {
  struct Factor {
    int kind;  // 0 constant, 1 z, 2 zbar, 3 L
    double value;
  };
  std::vector<Factor> factors;
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw ParseError("empty coefficient expression");
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t end = std::min(s.find('*', start), s.size());
    const std::string tok = s.substr(start, end - start);
    if (tok.empty()) throw ParseError("empty factor in '" + s + "'");
    auto number = [&](const std::string& t) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(t, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != t.size() || !std::isfinite(v)) throw ParseError("bad number '" + t + "' in '" + s + "'");
      return v;
    };
    const std::size_t caret = tok.find('^');
    const std::string base = tok.substr(0, caret);
    const double expo = caret == std::string::npos ? 1.0 : number(tok.substr(caret + 1));
    if (base == "z") factors.push_back({1, expo});
    else if (base == "zbar") factors.push_back({2, expo});
    else if (base == "L") factors.push_back({3, expo});
    else if (caret == std::string::npos) factors.push_back({0, number(base)});
    else throw ParseError("unknown factor '" + tok + "' in '" + s + "'");
    start = end + 1;
  }
  return [factors](cplx z) {
    cplx v = 1.0;
    for (const auto& f : factors) {
      switch (f.kind) {
        case 0: v *= f.value; break;
        case 1: v *= std::pow(z, f.value); break;
        case 2: v *= std::pow(std::conj(z), f.value); break;
        case 3: v *= std::pow(std::log(std::norm(z)), f.value); break;
      }
    }
    return v;
  };
}

/// f(z) times the monomial `mask` as a form evaluator on the punctured disk.
inline FormEvaluator coefficient_form(std::function<cplx(cplx)> f, Mask mask) {
  return [f = std::move(f), mask](const VecC& z) { return std::vector<FormTerm>{{mask, f(z(0))}}; };
}

// ---- fixtures --------------------------------------------------------------------

namespace fixtures {

/// dz on the punctured disk.
inline FormEvaluator dz() {
  return [](const VecC&) { return std::vector<FormTerm>{{Mask{1}, 1.0}}; };
}
/// dz / z
inline FormEvaluator dz_over_z() {
  return [](const VecC& z) { return std::vector<FormTerm>{{Mask{1}, 1.0 / z(0)}}; };
}
/// dz / (z log|z|^2)
inline FormEvaluator dz_over_zlog() {
  return [](const VecC& z) { return std::vector<FormTerm>{{Mask{1}, 1.0 / (z(0) * std::log(std::norm(z(0))))}}; };
}
/// Poincare (1,1) form i g dz ^ dzbar on the punctured disk.
inline FormEvaluator poincare_volume() {
  return [](const VecC& z) {
    const double t = std::norm(z(0)), l = std::log(t);
    return std::vector<FormTerm>{{Mask{0b11}, I_unit / (t * l * l)}};
  };
}

/// h = (-log|z|^2)^a on the trivial line bundle.
inline MetricSampler log_power(double a) {
  return {[a](const VecC& z) {
            MatC h(1, 1);
            h(0, 0) = std::pow(-std::log(std::norm(z(0))), a);
            return h;
          },
          1};
}
/// h = |z|^2
inline MetricSampler abs_z_squared() {
  return {[](const VecC& z) {
            MatC h(1, 1);
            h(0, 0) = std::norm(z(0));
            return h;
          },
          1};
}
/// h = identity of the given rank on an n-dimensional chart.
inline MetricSampler identity(int rank = 1, int n = 1) {
  return {[rank](const VecC&) { return MatC(MatC::Identity(rank, rank)); }, n};
}

/// Poincare metric 4/(1-|z|^2)^2 on the disk (product over coordinates).
inline MetricSampler poincare_disk(int n = 1) {
  return {[n](const VecC& z) {
            MatC h = MatC::Zero(n, n);
            for (int i = 0; i < n; ++i) {
              const double t = std::norm(z(i));
              h(i, i) = 4.0 / ((1.0 - t) * (1.0 - t));
            }
            return h;
          },
          n};
}
/// Euclidean metric on the disk.
inline MetricSampler flat_disk(int n = 1) { return identity(n, n); }

}  // namespace fixtures

}  // namespace rigidity
