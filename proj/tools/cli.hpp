#pragma once

// rigidity-gauge command line: argument parsing, dispatch and report output.
// Kept in a header so tests can drive `run` in-process.

#include "rigidity/acceptance.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>

namespace rigidity::cli {

using json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr std::uint64_t kDefaultSeed = 42;

struct RunConfig {
  std::string subcommand;
  std::string domain;
  std::string case_name;
  std::string custom;
  std::string form = "dz";
  std::string expect;
  int q = 0;
  int samples = 200;
  std::optional<std::uint64_t> seed;
  double tol = 1e-8;
  int basis = 16;
  double epsilon = 1e-2;
  int quad_order = 16;
  int max_rank = 6;
  int dim = 1;
  double rho_min = 1e-6;
  bool dual = false;
  std::string format = "json";
  std::string output;
};

/// Seed from the flag, else RIGIDITY_GAUGE_SEED, else the default.
inline std::uint64_t resolve_seed(const RunConfig& cfg) {
  if (cfg.seed) return *cfg.seed;
  if (const char* env = std::getenv("RIGIDITY_GAUGE_SEED")) {
    try {
      std::size_t used = 0;
      const std::string s(env);
      const unsigned long long v = std::stoull(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("RIGIDITY_GAUGE_SEED must be a non-negative integer");
  }
  return kDefaultSeed;
}

/// Rounds to 12 significant digits so reports do not carry last-bit noise.
inline double clean(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

inline json finite_or_null(double x) { return std::isfinite(x) ? json(clean(x)) : json(nullptr); }

// ---- rendering -----------------------------------------------------------------

inline std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

inline void flatten(const json& v, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (v.is_array() && !v.empty() && (v.front().is_object() || v.front().is_array())) {
    for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], prefix + "." + std::to_string(i), out);
  } else {
    out.emplace_back(prefix, scalar_text(v));
  }
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

/// Rows of objects with identical keys as a table; anything else as key/value pairs.
inline std::string render(const json& report, const std::string& format) {
  if (format == "json") return report.dump(2) + "\n";
  std::ostringstream os;
  const json* rows = nullptr;
  if (report.is_object() && report.contains("rows") && report["rows"].is_array()) rows = &report["rows"];
  if (rows && !rows->empty()) {
    std::vector<std::string> keys;
    for (auto it = rows->front().begin(); it != rows->front().end(); ++it) keys.push_back(it.key());
    if (format == "csv") {
      for (std::size_t i = 0; i < keys.size(); ++i) os << (i ? "," : "") << csv_field(keys[i]);
      os << "\n";
      for (const auto& row : *rows) {
        for (std::size_t i = 0; i < keys.size(); ++i) os << (i ? "," : "") << csv_field(scalar_text(row[keys[i]]));
        os << "\n";
      }
    } else {
      os << "|";
      for (const auto& k : keys) os << " " << k << " |";
      os << "\n|";
      for (std::size_t i = 0; i < keys.size(); ++i) os << "---|";
      os << "\n";
      for (const auto& row : *rows) {
        os << "|";
        for (const auto& k : keys) os << " " << scalar_text(row[k]) << " |";
        os << "\n";
      }
    }
    return os.str();
  }
  std::vector<std::pair<std::string, std::string>> pairs;
  flatten(report, "", pairs);
  if (format == "csv") {
    os << "key,value\n";
    for (const auto& [k, v] : pairs) os << csv_field(k) << "," << csv_field(v) << "\n";
  } else {
    os << "| key | value |\n|---|---|\n";
    for (const auto& [k, v] : pairs) os << "| " << k << " | " << v << " |\n";
  }
  return os.str();
}

// ---- subcommands -----------------------------------------------------------------

struct Outcome {
  json report;
  bool passed = true;
};

inline Outcome cmd_table(const RunConfig& cfg) {
  if (cfg.max_rank < 2) throw ParameterOutOfRange("--max must be >= 2");
  Outcome o;
  json rows = json::array();
  for (const auto& row : gamma_table(cfg.max_rank)) {
    rows.push_back({{"type", to_string(row.factor.type)},
                    {"params", row.factor.params()},
                    {"n", row.n},
                    {"gamma", clean(row.gamma)},
                    {"gamma_reference", row.gamma_reference},
                    {"source", row.reference ? "reference" : "computed"},
                    {"match", row.match}});
    o.passed = o.passed && row.match;
  }
  o.report = {{"max", cfg.max_rank}, {"rows", rows}, {"passed", o.passed}};
  return o;
}

inline json invariants_json(const DomainInvariants& inv) {
  json j = {{"domain", inv.domain}, {"n", inv.n}, {"gamma", clean(inv.gamma)}};
  if (inv.scalar_curvature) j["scalar_curvature"] = clean(*inv.scalar_curvature);
  if (inv.lambda) j["lambda"] = clean(*inv.lambda);
  j["vanishing_q_max"] = inv.vanishing_max_q;
  j["all_groups_vanish"] = inv.all_groups_vanish;
  j["reference_only"] = inv.reference_only;
  if (!inv.factors.empty()) {
    j["factors"] = json::array();
    for (const auto& f : inv.factors) j["factors"].push_back(invariants_json(f));
  }
  return j;
}

inline Outcome cmd_gamma(const RunConfig& cfg) {
  return {invariants_json(domain_invariants(parse_domain_spec(cfg.domain))), true};
}

inline Outcome cmd_cv(const RunConfig& cfg) {
  const std::uint64_t seed = resolve_seed(cfg);
  const auto cert = cv_certify(parse_domain_spec(cfg.domain), cfg.q, cfg.samples, seed, cfg.tol);
  std::map<std::string, int> verdicts;
  for (const auto& r : cert.reports) ++verdicts[r.sign_verdict];
  json counts = json::object();
  for (const auto& [k, v] : verdicts) counts[k] = v;
  Outcome o;
  o.passed = cert.passed();
  o.report = {{"domain", cert.domain},
              {"n", cert.n},
              {"q", cert.q},
              {"samples", cfg.samples},
              {"seed", seed},
              {"tolerance", cert.tolerance},
              {"scalar_curvature", clean(cert.scalar_curvature)},
              {"lambda", clean(cert.lambda)},
              {"gamma", clean(cert.gamma)},
              {"bound_coefficient", clean(cert.bound_coefficient)},
              {"max_identity_residual", cert.max_identity_residual},
              {"min_bound_slack", cert.min_bound_slack},
              {"sign_verdicts", counts},
              {"passed", o.passed}};
  return o;
}

inline json growth_json(const GrowthReport& rep) {
  json samples = json::array();
  for (const auto& s : rep.samples) samples.push_back({{"rho", clean(s.rho)}, {"ratio", finite_or_null(s.ratio)}});
  return {{"verdict", to_string(rep.verdict)},
          {"sup_ratio", finite_or_null(rep.sup_ratio)},
          {"fitted_exponent", clean(rep.fitted_exponent)},
          {"fit_r2", clean(rep.fit_r2)},
          {"samples", samples}};
}

inline Mask form_mask(const std::string& form) {
  if (form == "dz") return 0b01;
  if (form == "dzbar") return 0b10;
  if (form == "dz^dzbar") return 0b11;
  throw UsageError("--form must be dz, dzbar or dz^dzbar");
}

inline Outcome cmd_growth(const RunConfig& cfg) {
  if (cfg.case_name.empty() == cfg.custom.empty()) throw UsageError("verify growth needs exactly one of --case, --custom");
  PuncturedChart chart;
  chart.plan.rho_min = cfg.rho_min;
  FormEvaluator eta;
  int degree = 1;
  std::string expect = cfg.expect;
  std::string label;
  if (!cfg.custom.empty()) {
    const Mask mask = form_mask(cfg.form);
    degree = std::popcount(mask);
    eta = coefficient_form(parse_coefficient(cfg.custom), mask);
    label = "(" + cfg.custom + ") " + cfg.form;
  } else {
    label = cfg.case_name;
    std::string expected;
    if (cfg.case_name == "dz") {
      eta = fixtures::dz();
      expected = "poincare-growth";
    } else if (cfg.case_name == "dz-over-z") {
      eta = fixtures::dz_over_z();
      expected = "not-poincare-growth";
    } else if (cfg.case_name == "dz-over-zlog") {
      eta = fixtures::dz_over_zlog();
      expected = "poincare-growth";
    } else if (cfg.case_name == "poincare-volume") {
      eta = fixtures::poincare_volume();
      degree = 2;
      expected = "poincare-growth";
    } else {
      throw UsageError("unknown growth case '" + cfg.case_name + "' (dz, dz-over-z, dz-over-zlog, poincare-volume)");
    }
    if (expect.empty()) expect = expected;
  }
  const GrowthReport rep = poincare_growth_test(eta, degree, chart);
  Outcome o;
  const std::string verdict = to_string(rep.verdict);
  o.passed = expect.empty() ? rep.verdict != GrowthVerdict::Inconclusive : verdict == expect;
  o.report = {{"form", label}, {"degree", degree}, {"rho_min", cfg.rho_min}};
  if (!expect.empty()) o.report["expected"] = expect;
  const json details = growth_json(rep);
  for (const auto& [k, v] : details.items()) o.report[k] = v;
  o.report["passed"] = o.passed;
  return o;
}

inline Outcome cmd_good_metric(const RunConfig& cfg) {
  MetricSampler sampler;
  bool expected = true;
  const std::string& c = cfg.case_name;
  if (c.rfind("log-power:", 0) == 0) {
    double a = 0.0;
    try {
      std::size_t used = 0;
      a = std::stod(c.substr(10), &used);
      if (used != c.size() - 10) throw std::invalid_argument(c);
    } catch (const std::exception&) {
      throw UsageError("bad exponent in '" + c + "'");
    }
    sampler = fixtures::log_power(a);
  } else if (c == "abs-z-squared") {
    sampler = fixtures::abs_z_squared();
    expected = false;
  } else if (c == "identity") {
    sampler = fixtures::identity();
  } else {
    throw UsageError("unknown metric case '" + c + "' (log-power:<a>, abs-z-squared, identity)");
  }
  if (cfg.dual) sampler = dual_metric(sampler);
  PuncturedChart chart;
  chart.plan.rho_min = cfg.rho_min;
  const auto rep = good_metric_check(sampler, chart);
  auto lg = [](const LogGrowthReport& r) {
    return json{{"verdict", r.verdict}, {"fitted_n", clean(r.fitted_n)}, {"previous_n", clean(r.previous_n)}};
  };
  Outcome o;
  o.passed = rep.overall == expected;
  o.report = {{"metric", c},
              {"dual", cfg.dual},
              {"log_growth", lg(rep.log_growth)},
              {"inverse_log_growth", lg(rep.inverse_log_growth)},
              {"connection", to_string(rep.connection.verdict)},
              {"d_connection", to_string(rep.d_connection.verdict)},
              {"good", rep.overall},
              {"expected_good", expected},
              {"passed", o.passed}};
  return o;
}

inline Outcome cmd_ke(const RunConfig& cfg) {
  if (cfg.dim < 1 || cfg.dim > 3) throw ParameterOutOfRange("--dim must lie in [1, 3]");
  MetricSampler sampler;
  bool expected = true;
  if (cfg.case_name == "poincare-disk") {
    sampler = fixtures::poincare_disk(cfg.dim);
  } else if (cfg.case_name == "flat") {
    sampler = fixtures::flat_disk(cfg.dim);
    expected = false;
  } else {
    throw UsageError("unknown KE case '" + cfg.case_name + "' (poincare-disk, flat)");
  }
  const auto grid = interior_grid(cfg.dim);
  const double k = fit_ke_constant(sampler, grid);
  const double residual = ke_form_residual(sampler, k, grid);
  const bool einstein = residual < 1e-4;
  Outcome o;
  o.passed = einstein == expected;
  o.report = {{"metric", cfg.case_name},      {"dim", cfg.dim},
              {"fitted_k", clean(k)},         {"residual", residual},
              {"tolerance", 1e-4},            {"kahler_einstein", einstein},
              {"expected", expected},         {"passed", o.passed}};
  return o;
}

inline Outcome cmd_lab(const RunConfig& cfg) {
  const std::uint64_t seed = resolve_seed(cfg);
  const auto c = build_discrete_complex(cfg.basis, cfg.epsilon, cfg.quad_order);
  const auto s = acceptance::lab_summary(c, seed);
  Outcome o;
  o.passed = s.adjoint_residual < 1e-10 && s.energy_identity_residual < 1e-10 && s.decomposition_residual < 1e-10 &&
             s.projection_residual < 1e-10 && s.dims.consistent;
  o.report = {{"basis", cfg.basis},
              {"epsilon", cfg.epsilon},
              {"quad_order", cfg.quad_order},
              {"seed", seed},
              {"adjoint_residual", s.adjoint_residual},
              {"energy_identity_residual", s.energy_identity_residual},
              {"decomposition_residual", s.decomposition_residual},
              {"projection_residual", s.projection_residual},
              {"dimensions", s.dims.dims},
              {"ranks", s.dims.ranks},
              {"harmonic_dim", s.dims.harmonic},
              {"dimension_count_consistent", s.dims.consistent},
              {"passed", o.passed}};
  return o;
}

inline Outcome cmd_all(const RunConfig& cfg) {
  const std::uint64_t seed = resolve_seed(cfg);
  Outcome o;
  json rows = json::array();
  for (const auto& r : acceptance::run_all(seed)) {
    rows.push_back({{"id", r.id}, {"criterion", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    o.passed = o.passed && r.passed;
  }
  o.report = {{"seed", seed}, {"rows", rows}, {"passed", o.passed}};
  return o;
}

inline json failure_summary(const json& report) {
  json f = json::array();
  if (!report.contains("rows")) return f;
  for (const auto& row : report["rows"]) {
    const char* key = row.contains("passed") ? "passed" : "match";
    if (row.contains(key) && !row[key].get<bool>()) f.push_back(row);
  }
  return f;
}

// ---- entry point ---------------------------------------------------------------

/// Parses `args` (without the program name), runs the subcommand and writes
/// the report. Returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Curvature and L2 diagnostics for bounded symmetric domains", "rigidity-gauge"};
  app.require_subcommand(1);
  const std::vector<std::string> formats = {"json", "csv", "md"};
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember(formats));
    sub->add_option("-o,--output", cfg.output, "Write the report to a file instead of stdout");
  };
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "Random seed (default 42, or RIGIDITY_GAUGE_SEED)");
  };

  auto* table = app.add_subcommand("table", "Rigidity constants of the classical domains");
  table->add_option("--max", cfg.max_rank, "Largest p+q (type I) or m (other types)")->capture_default_str();

  auto* gamma = app.add_subcommand("gamma", "Invariants of one domain, e.g. 'I(2,2)' or 'I(1,1)xIV(3)'");
  gamma->add_option("domain", cfg.domain, "Domain spec")->required();

  auto* verify = app.add_subcommand("verify", "Numerical verifications");
  verify->require_subcommand(1);
  auto* cv = verify->add_subcommand("cv", "Curvature identity and sign on random tangent-valued forms");
  cv->add_option("--domain", cfg.domain, "Domain spec")->required();
  cv->add_option("--q", cfg.q, "Form degree")->capture_default_str();
  cv->add_option("--samples", cfg.samples, "Number of random forms")->capture_default_str();
  cv->add_option("--tol", cfg.tol, "Residual tolerance")->capture_default_str();
  add_seed(cv);
  auto* growth = verify->add_subcommand("growth", "Poincare growth of a form on the punctured disk");
  growth->add_option("--case", cfg.case_name, "dz | dz-over-z | dz-over-zlog | poincare-volume");
  growth->add_option("--custom", cfg.custom, "Coefficient expression, e.g. 'z^-1*L^-1'");
  growth->add_option("--form", cfg.form, "dz | dzbar | dz^dzbar (with --custom)")->capture_default_str();
  growth->add_option("--expect", cfg.expect, "Expected verdict")
      ->check(CLI::IsMember({"poincare-growth", "not-poincare-growth", "inconclusive"}));
  growth->add_option("--rho-min", cfg.rho_min, "Smallest sampled radius")->capture_default_str();
  auto* good = verify->add_subcommand("good-metric", "Good-metric conditions for a line-bundle metric");
  good->add_option("--case", cfg.case_name, "log-power:<a> | abs-z-squared | identity")->required();
  good->add_flag("--dual", cfg.dual, "Check the induced metric on the dual bundle");
  good->add_option("--rho-min", cfg.rho_min, "Smallest sampled radius")->capture_default_str();
  auto* ke = verify->add_subcommand("ke", "Kahler-Einstein form identity on the disk");
  ke->add_option("--case", cfg.case_name, "poincare-disk | flat")->required();
  ke->add_option("--dim", cfg.dim, "Polydisk dimension")->capture_default_str();
  auto* all = verify->add_subcommand("all", "Run the acceptance suite");
  add_seed(all);

  auto* lab = app.add_subcommand("lab", "Discrete Dolbeault laboratory");
  lab->require_subcommand(1);
  auto* decompose = lab->add_subcommand("decompose", "Adjoint, energy and Hodge decomposition residuals");
  decompose->add_option("--basis", cfg.basis, "Degree-0 basis size")->capture_default_str();
  decompose->add_option("--epsilon", cfg.epsilon, "Inner radius")->capture_default_str();
  decompose->add_option("--quad-order", cfg.quad_order, "Gauss-Legendre order per panel")->capture_default_str();
  add_seed(decompose);

  for (auto* sub : {table, gamma, cv, growth, good, ke, all, decompose}) add_format(sub);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (table->parsed() && table->count("--format") == 0) cfg.format = "md";  // tables read best as markdown

  Outcome outcome;
  try {
    if (table->parsed()) outcome = cmd_table(cfg);
    else if (gamma->parsed()) outcome = cmd_gamma(cfg);
    else if (cv->parsed()) outcome = cmd_cv(cfg);
    else if (growth->parsed()) outcome = cmd_growth(cfg);
    else if (good->parsed()) outcome = cmd_good_metric(cfg);
    else if (ke->parsed()) outcome = cmd_ke(cfg);
    else if (all->parsed()) outcome = cmd_all(cfg);
    else if (decompose->parsed()) outcome = cmd_lab(cfg);
  } catch (const UsageError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const ParameterOutOfRange& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const UnsupportedDomain& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const DegreeOutOfRange& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "CheckFailure: " << e.what() << "\n";
    return kExitCheckFailure;
  }

  if (!outcome.passed && cfg.format == "json") {
    const json failures = failure_summary(outcome.report);
    if (!failures.empty()) outcome.report["failures"] = failures;
  }
  const std::string text = render(outcome.report, cfg.format);
  if (cfg.output.empty()) {
    out << text;
  } else {
    std::ofstream file(cfg.output, std::ios::binary);
    if (!file) {
      err << "UsageError: cannot open '" << cfg.output << "' for writing\n";
      return kExitUsage;
    }
    file << text;
  }
  if (!outcome.passed) {
    err << "CheckFailure: one or more checks failed\n";
    return kExitCheckFailure;
  }
  return kExitOk;
}

}  // namespace rigidity::cli
