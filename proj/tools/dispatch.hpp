#pragma once

// Subcommand dispatch for the qnn command-line tool. Every run produces one
// JSON report:
//
//   { "schema_version": "1", "subcommand": ..., "seed": ...,
//     "inputs": [ {"role", "file", "sha256"} ... ],
//     "results": {...}            // or "error": {"kind", "message", ...}
//     "exit_code": ..., "timing_ms": ... }
//
// Exit codes: 0 success / gate passed, 2 input or configuration error,
// 3 gate failed (network sunk), 4 numeric degeneracy (infinite F, saturated
// model, degenerate correlation).

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "digest.hpp"
#include "qnn/grover.hpp"
#include "qnn/io/csv.hpp"
#include "qnn/io/pipeline_config.hpp"
#include "qnn/io/report.hpp"
#include "qnn/network.hpp"
#include "qnn/qgje.hpp"
#include "qnn/rng.hpp"
#include "qnn/stats.hpp"

namespace qnn::cli {

using io::Json;

/// Environment variable that overrides the default pivot tolerance.
inline constexpr const char* kTolEnvVar = "QNN_TOL";

enum class Subcommand { Fit, Rref, Chi2, Quantile, Grover, Pipeline };

inline const char* to_string(Subcommand s) {
  switch (s) {
    case Subcommand::Fit: return "fit";
    case Subcommand::Rref: return "rref";
    case Subcommand::Chi2: return "chi2";
    case Subcommand::Quantile: return "quantile";
    case Subcommand::Grover: return "grover";
    case Subcommand::Pipeline: return "pipeline";
  }
  return "?";
}

enum ExitCode : int { kOk = 0, kInputError = 2, kSunk = 3, kDegenerate = 4 };

struct RunConfig {
  Subcommand subcommand = Subcommand::Fit;
  std::string input;     // fit samples, rref matrix
  std::string observed;  // chi2
  std::string expected;  // chi2, optional
  std::string config;    // pipeline
  std::optional<double> alpha;
  unsigned degree = 1;
  std::optional<std::size_t> vars;
  std::optional<std::string> strategy;  // classical when unset
  std::optional<double> tol;
  std::uint64_t seed = 0;
  // quantile
  std::string dist;
  std::vector<long long> df;
  std::optional<double> statistic;
  // grover
  std::size_t size = 0;
  std::string marked;
  std::optional<std::uint64_t> iterations;
  std::size_t repeat = 1;
};

struct Outcome {
  Json report;
  int exit_code = kOk;
};

namespace detail {

inline double resolve_tol(const RunConfig& c) {
  if (c.tol) return *c.tol;
  if (const char* env = std::getenv(kTolEnvVar)) {
    double v = 0.0;
    if (!io::detail::parse_double(io::detail::trim(env), v) || !(v > 0.0)) {
      throw ConfigError(std::string(kTolEnvVar) + " must be a positive number");
    }
    return v;
  }
  return qgje::kDefaultTol;
}

inline void add_input(Json& inputs, const std::string& role, const std::filesystem::path& path) {
  inputs.push_back({{"role", role}, {"file", path.filename().string()}, {"sha256", sha256_hex(io::read_file(path))}});
}

inline std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (auto cell : io::detail::split(text)) {
    if (cell.empty()) continue;
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw ConfigError("marked index '" + std::string(cell) + "' is not a non-negative integer");
    }
    out.push_back(v);
  }
  return out;
}

inline double require_alpha(const std::optional<double>& a, double fallback) {
  const double v = a.value_or(fallback);
  if (!(v > 0.0 && v < 1.0)) throw ConfigError("--alpha must lie in (0, 1)");
  return v;
}

inline qgje::PivotStrategy strategy(const RunConfig& c) {
  try {
    return qgje::parse_strategy(c.strategy.value_or("classical"));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

inline int run_fit(const RunConfig& c, Json& inputs, Json& results) {
  if (c.input.empty()) throw ConfigError("fit requires --input");
  const auto samples = io::parse_csv_samples(c.input);
  add_input(inputs, "input", c.input);
  if (c.vars && *c.vars != samples.n_vars) {
    throw ConfigError("--vars " + std::to_string(*c.vars) + " does not match the " + std::to_string(samples.n_vars) +
                      " x-columns in the header");
  }
  const network::RunOptions opt{strategy(c), resolve_tol(c), c.seed};
  const auto outcome = network::evaluate_fit_gate(samples, c.degree, require_alpha(c.alpha, 0.05), opt);
  results = io::to_json(outcome);
  results["strategy"] = qgje::to_string(opt.strategy);
  if (outcome.ftest.f.is_infinite()) return kDegenerate;
  return outcome.decision.pass ? kOk : kSunk;
}

inline int run_rref(const RunConfig& c, Json& inputs, Json& results) {
  if (c.input.empty()) throw ConfigError("rref requires --input");
  const Matrix a = io::parse_csv_matrix(c.input);
  add_input(inputs, "input", c.input);
  const double tol = resolve_tol(c);
  results = io::to_json(qgje::rref(a, strategy(c), tol, c.seed));
  results["tol"] = tol;
  return kOk;
}

inline int run_chi2(const RunConfig& c, Json& inputs, Json& results) {
  if (c.observed.empty()) throw ConfigError("chi2 requires --observed");
  Matrix observed = io::parse_csv_matrix(c.observed);
  add_input(inputs, "observed", c.observed);
  std::optional<stats::ContingencyTable> table;
  if (!c.expected.empty()) {
    Matrix expected = io::parse_csv_matrix(c.expected);
    add_input(inputs, "expected", c.expected);
    table = stats::ContingencyTable::make(std::move(observed), std::move(expected));
  } else {
    table = stats::ContingencyTable::from_marginals(std::move(observed));
  }
  const auto df = stats::chi2_df(static_cast<long long>(table->rows()), static_cast<long long>(table->cols()));
  const auto g = stats::chi2_threshold_pass(stats::chi2_stat(*table), df, require_alpha(c.alpha, 0.05));
  results["rows"] = table->rows();
  results["cols"] = table->cols();
  results["expected_source"] = c.expected.empty() ? "marginals" : "file";
  results["chi2"] = io::to_json(g.statistic);
  results["df"] = df;
  results["alpha"] = g.alpha;
  results["threshold"] = g.threshold;
  results["pass"] = g.pass;
  return g.pass ? kOk : kSunk;
}

inline int run_quantile(const RunConfig& c, Json& results) {
  const double alpha = require_alpha(c.alpha, 0.05);
  results["dist"] = c.dist;
  results["df"] = c.df;
  results["alpha"] = alpha;
  if (c.dist == "chi2") {
    if (c.df.size() != 1) throw ConfigError("chi2 quantile takes exactly one --df");
    results["threshold"] = stats::chi2_quantile(c.df[0], alpha);
    if (c.statistic) {
      const auto g = stats::chi2_threshold_pass(*c.statistic, c.df[0], alpha);
      results["statistic"] = *c.statistic;
      results["pass"] = g.pass;
      return g.pass ? kOk : kSunk;
    }
  } else if (c.dist == "f") {
    if (c.df.size() != 2) throw ConfigError("f quantile takes --df d1,d2");
    results["threshold"] = stats::f_quantile(c.df[0], c.df[1], alpha);
    if (c.statistic) {
      const auto g = stats::f_threshold_pass(stats::Statistic::finite(*c.statistic), c.df[0], c.df[1], alpha);
      results["statistic"] = *c.statistic;
      results["pass"] = g.pass;
      return g.pass ? kOk : kSunk;
    }
  } else {
    throw ConfigError("--dist must be chi2 or f");
  }
  return kOk;
}

inline int run_grover(const RunConfig& c, Json& results) {
  const auto marked = parse_index_list(c.marked);
  if (c.size < 2 || (c.size & (c.size - 1)) != 0) throw ConfigError("--size must be a power of two >= 2");
  for (auto m : marked)
    if (m >= c.size) throw ConfigError("marked index " + std::to_string(m) + " outside [0, size)");
  if (c.repeat < 1) throw ConfigError("--repeat must be positive");
  std::vector<std::size_t> unique = marked;
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  const std::uint64_t iterations =
      c.iterations.value_or(grover::optimal_iterations(c.size, std::max<std::size_t>(1, unique.size())));

  std::size_t successes = 0;
  std::uint64_t queries = 0;
  for (std::size_t i = 0; i < c.repeat; ++i) {
    grover::Oracle oracle(c.size, unique);
    const auto run = grover::grover_search(oracle, iterations, mix_seed(c.seed, i));
    successes += run.success ? 1 : 0;
    queries += run.oracle_queries;
  }
  results["M"] = c.size;
  results["marked"] = unique;
  results["iterations"] = iterations;
  results["repeat"] = c.repeat;
  results["success_rate"] = static_cast<double>(successes) / static_cast<double>(c.repeat);
  results["mean_queries"] = static_cast<double>(queries) / static_cast<double>(c.repeat);
  results["theory_success_probability"] =
      unique.empty() ? Json(0.0) : Json(grover::success_probability(c.size, unique.size(), iterations));
  return kOk;
}

inline int run_pipeline(const RunConfig& c, Json& inputs, Json& results) {
  if (c.config.empty()) throw ConfigError("pipeline requires --config");
  const auto cfg = io::parse_pipeline_config(c.config);
  add_input(inputs, "config", c.config);
  for (const auto& in : cfg.inputs) add_input(inputs, in.role, in.path);
  network::RunOptions opt;
  // Flags override the config file, which overrides the environment.
  opt.strategy = c.strategy ? strategy(c) : cfg.strategy.value_or(qgje::PivotStrategy::Classical);
  opt.tol = c.tol ? *c.tol : cfg.tol.value_or(resolve_tol(c));
  opt.seed = c.seed;
  const auto report = network::run_pipeline(cfg.layers, {}, opt);
  results = io::to_json(report);
  return report.final_pass ? kOk : kSunk;
}

inline Json error_json(const char* kind, const std::string& message) {
  return Json{{"kind", kind}, {"message", message}};
}

}  // namespace detail

/// Runs one subcommand and builds its report. Never throws for input,
/// configuration or numeric problems; those become an "error" object and a
/// non-zero exit code.
inline Outcome dispatch(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  Json inputs = Json::array();
  Json results = Json::object();
  std::optional<Json> error;
  int code = kOk;
  try {
    switch (c.subcommand) {
      case Subcommand::Fit: code = detail::run_fit(c, inputs, results); break;
      case Subcommand::Rref: code = detail::run_rref(c, inputs, results); break;
      case Subcommand::Chi2: code = detail::run_chi2(c, inputs, results); break;
      case Subcommand::Quantile: code = detail::run_quantile(c, results); break;
      case Subcommand::Grover: code = detail::run_grover(c, results); break;
      case Subcommand::Pipeline: code = detail::run_pipeline(c, inputs, results); break;
    }
  } catch (const ParseError& e) {
    error = detail::error_json("parse_error", e.what());
    if (e.row() > 0) (*error)["row"] = e.row();
    if (!e.column().empty()) (*error)["column"] = e.column();
    code = kInputError;
  } catch (const IoError& e) {
    error = detail::error_json("io_error", e.what());
    code = kInputError;
  } catch (const ConfigError& e) {
    error = detail::error_json("config_error", e.what());
    code = kInputError;
  } catch (const SaturatedModelError& e) {
    error = detail::error_json("saturated_model", e.what());
    code = kDegenerate;
  } catch (const DegenerateError& e) {
    error = detail::error_json("degenerate", e.what());
    code = kDegenerate;
  } catch (const Error& e) {
    error = detail::error_json("invalid_input", e.what());
    code = kInputError;
  }

  Outcome out;
  out.report["schema_version"] = io::kSchemaVersion;
  out.report["subcommand"] = to_string(c.subcommand);
  out.report["seed"] = c.seed;
  out.report["inputs"] = std::move(inputs);
  if (error) {
    out.report["error"] = std::move(*error);
  } else {
    out.report["results"] = std::move(results);
  }
  out.report["exit_code"] = code;
  out.report["timing_ms"] =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  out.exit_code = code;
  return out;
}

}  // namespace qnn::cli
