#pragma once

// Boolean threshold nodes and the layered gate pipeline.
//
// A pipeline evaluates its layers strictly in order. Statistical gates (fit /
// chi-squared) pass when their statistic falls inside the 1 - alpha region;
// boolean layers read the previous layer's pass bit. The first layer that does
// not pass sinks the network: its result is recorded and nothing after it runs.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qnn/error.hpp"
#include "qnn/polyfit.hpp"
#include "qnn/qgje.hpp"
#include "qnn/rng.hpp"
#include "qnn/stats.hpp"

namespace qnn::network {

struct ThresholdNode {
  std::size_t n_inputs = 1;
  long long delta = 0;
  unsigned weight_bound = 1;  // metadata only
};

struct EqualityNode {
  std::size_t n_inputs = 1;
  std::vector<long long> weights;  // carried, not used by the evaluation
};

namespace detail {

inline long long checked_sum(std::size_t n_inputs, std::span<const int> bits) {
  if (n_inputs < 1) throw DomainError("node needs at least one input");
  if (bits.size() != n_inputs) {
    throw DimensionError("node expects " + std::to_string(n_inputs) + " inputs, got " + std::to_string(bits.size()));
  }
  long long s = 0;
  for (int b : bits) {
    if (b != 0 && b != 1) throw DomainError("node inputs must be 0 or 1");
    s += b;
  }
  return s;
}

}  // namespace detail

/// 1 iff the number of set inputs is at least delta.
inline int th_eval(const ThresholdNode& node, std::span<const int> bits) {
  return detail::checked_sum(node.n_inputs, bits) >= node.delta ? 1 : 0;
}

/// 0 iff every input is 0.
inline int et_eval(const EqualityNode& node, std::span<const int> bits) {
  return detail::checked_sum(node.n_inputs, bits) == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// Layers

struct FitGate {
  unsigned degree = 1;
  double alpha = 0.05;
  std::optional<polyfit::SampleSet> samples;  // falls back to the pipeline dataset
};

struct Chi2Gate {
  double alpha = 0.05;
  std::optional<stats::ContingencyTable> table;  // falls back to the pipeline dataset
};

struct BoolThreshold {
  long long delta = 1;
  unsigned weight_bound = 1;
};

struct BoolEquality {};

using LayerKind = std::variant<FitGate, Chi2Gate, BoolThreshold, BoolEquality>;

struct LayerSpec {
  std::string label;
  LayerKind kind;
};

inline const char* kind_name(const LayerKind& k) {
  switch (k.index()) {
    case 0: return "fit";
    case 1: return "chi2";
    case 2: return "threshold";
    default: return "equality";
  }
}

struct Dataset {
  std::optional<polyfit::SampleSet> samples;
  std::optional<stats::ContingencyTable> table;
};

struct RunOptions {
  qgje::PivotStrategy strategy = qgje::PivotStrategy::Classical;
  double tol = qgje::kDefaultTol;
  std::uint64_t seed = 0;
};

/// Everything computed for one fit gate.
struct FitGateOutcome {
  polyfit::FitResult fit;
  stats::FTest ftest;
  std::optional<double> r;  // correlation of fitted with observed values
  stats::GateDecision decision;
  double residual_norm = 0.0;
};

/// Fits, splits the sums of squares and applies the F threshold.
inline FitGateOutcome evaluate_fit_gate(const polyfit::SampleSet& samples, unsigned degree, double alpha,
                                        const RunOptions& opt) {
  FitGateOutcome out;
  out.fit = polyfit::fit(samples, degree, opt.strategy, opt.tol, opt.seed);
  out.residual_norm = norm2(out.fit.residuals);
  out.ftest = stats::f_ratio_ss(out.fit, samples.y);
  try {
    out.r = stats::pearson_r(out.fit.fitted, samples.y);
  } catch (const DegenerateError&) {
    out.r.reset();
  }
  out.decision = stats::f_threshold_pass(out.ftest.f, out.ftest.ss.df_regr, out.ftest.ss.df_resid, alpha);
  return out;
}

struct LayerResult {
  std::string label;
  std::string kind;
  std::optional<stats::GateDecision> decision;  // statistical layers
  std::optional<int> bit;                       // boolean layers
  std::optional<FitGateOutcome> fit;            // fit layers only
  bool pass = false;
};

struct PipelineReport {
  std::vector<LayerResult> layer_results;
  std::optional<std::size_t> sunk_at;
  bool final_pass = false;
  std::uint64_t seed = 0;
  // QNN(s, d) metadata with weight bound w; reported, not analysed.
  std::size_t size_s = 0;
  std::size_t depth_d = 0;
  unsigned weight_bound = 1;
};

/// Rejects pipelines whose layers lack their data or carry bad parameters.
inline void validate_pipeline(const std::vector<LayerSpec>& layers, const Dataset& data) {
  if (layers.empty()) throw ConfigError("pipeline has no layers");
  auto check_alpha = [](const std::string& label, double a) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("layer '" + label + "': alpha must lie in (0, 1)");
  };
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (const auto* g = std::get_if<FitGate>(&l.kind)) {
      check_alpha(l.label, g->alpha);
      if (g->degree < 1) throw ConfigError("layer '" + l.label + "': fit gate needs degree >= 1");
      if (!g->samples && !data.samples) throw ConfigError("layer '" + l.label + "': fit gate has no samples");
    } else if (const auto* c = std::get_if<Chi2Gate>(&l.kind)) {
      check_alpha(l.label, c->alpha);
      if (!c->table && !data.table) throw ConfigError("layer '" + l.label + "': chi2 gate has no table");
      const auto& t = c->table ? *c->table : *data.table;
      if (t.rows() < 2) throw ConfigError("layer '" + l.label + "': chi2 table needs at least two rows");
    } else if (i == 0) {
      throw ConfigError("layer '" + l.label + "': a boolean layer needs a preceding layer");
    }
  }
}

inline PipelineReport run_pipeline(const std::vector<LayerSpec>& layers, const Dataset& data,
                                   const RunOptions& opt) {
  validate_pipeline(layers, data);

  PipelineReport report;
  report.seed = opt.seed;
  report.size_s = layers.size();
  report.depth_d = layers.size();
  for (const auto& l : layers)
    if (const auto* t = std::get_if<BoolThreshold>(&l.kind))
      report.weight_bound = std::max(report.weight_bound, t->weight_bound);

  int previous_bit = 1;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    LayerResult res;
    res.label = l.label;
    res.kind = kind_name(l.kind);

    if (const auto* g = std::get_if<FitGate>(&l.kind)) {
      RunOptions layer_opt = opt;
      layer_opt.seed = mix_seed(opt.seed, i);
      auto outcome = evaluate_fit_gate(g->samples ? *g->samples : *data.samples, g->degree, g->alpha, layer_opt);
      res.decision = outcome.decision;
      res.pass = outcome.decision.pass;
      res.fit = std::move(outcome);
    } else if (const auto* c = std::get_if<Chi2Gate>(&l.kind)) {
      const auto& t = c->table ? *c->table : *data.table;
      const auto df = stats::chi2_df(static_cast<long long>(t.rows()), static_cast<long long>(t.cols()));
      res.decision = stats::chi2_threshold_pass(stats::chi2_stat(t), df, c->alpha);
      res.pass = res.decision->pass;
    } else if (const auto* th = std::get_if<BoolThreshold>(&l.kind)) {
      const int in[1] = {previous_bit};
      res.bit = th_eval({1, th->delta, th->weight_bound}, in);
      res.pass = *res.bit == 1;
    } else {
      const int in[1] = {previous_bit};
      res.bit = et_eval({1, {}}, in);
      res.pass = *res.bit == 1;
    }

    previous_bit = res.pass ? 1 : 0;
    report.layer_results.push_back(std::move(res));
    if (!report.layer_results.back().pass) {
      report.sunk_at = i;
      break;
    }
  }
  report.final_pass = !report.sunk_at.has_value();
  return report;
}

}  // namespace qnn::network
