#pragma once

// JSON views of results. Keys keep insertion order so serialized reports are
// stable. Infinite statistics serialize as the string "infinite-F"; no other
// non-finite number may reach a report.

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"
#include "qnn/error.hpp"
#include "qnn/matrix.hpp"
#include "qnn/network.hpp"
#include "qnn/polyfit.hpp"
#include "qnn/qgje.hpp"
#include "qnn/stats.hpp"

namespace qnn::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kInfiniteToken = "infinite-F";

inline Json number(double v) {
  if (!std::isfinite(v)) throw DomainError("refusing to serialize a non-finite number");
  return v;
}

inline Json to_json(const stats::Statistic& s) {
  return s.is_infinite() ? Json(kInfiniteToken) : number(s.value());
}

inline Json to_json(const Vector& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

inline Json to_json(const Matrix& m) {
  Json a = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (double x : m.row(i)) row.push_back(number(x));
    a.push_back(std::move(row));
  }
  return a;
}

inline Json to_json(const polyfit::MonomialBasis& b) {
  Json a = Json::array();
  for (const auto& m : b.indices) a.push_back(m.alpha);
  return a;
}

inline Json to_json(const stats::GateDecision& g) {
  Json j;
  j["test"] = stats::to_string(g.test);
  j["statistic"] = to_json(g.statistic);
  j["df"] = g.df;
  j["alpha"] = number(g.alpha);
  j["threshold"] = number(g.threshold);
  j["pass"] = g.pass;
  return j;
}

inline Json to_json(const qgje::EchelonResult& e) {
  Json j;
  j["rows"] = e.rref.rows();
  j["cols"] = e.rref.cols();
  j["strategy"] = qgje::to_string(e.pivot_strategy);
  j["rank"] = e.rank;
  j["pivot_cols"] = e.pivot_cols;
  j["nullspace_dim"] = e.nullspace_basis.size();
  j["queries"] = {{"oracle", e.total_oracle_queries}, {"classical_probes", e.total_classical_probes}};
  j["rref"] = to_json(e.rref);
  Json ns = Json::array();
  for (const auto& v : e.nullspace_basis) ns.push_back(to_json(v));
  j["nullspace_basis"] = std::move(ns);
  return j;
}

/// The `fit` report body: basis, coefficients, residual norm, correlation, F
/// and its threshold decision.
inline Json to_json(const network::FitGateOutcome& o) {
  Json j;
  j["n_vars"] = o.fit.basis.n_vars;
  j["degree"] = o.fit.basis.max_degree;
  j["n_samples"] = o.fit.fitted.size();
  j["basis"] = to_json(o.fit.basis);
  j["coeffs"] = to_json(o.fit.coeffs);
  j["rank"] = o.fit.rank;
  j["residual_norm"] = number(o.residual_norm);
  j["r"] = o.r ? number(*o.r) : Json(nullptr);
  j["F"] = to_json(o.ftest.f);
  j["df"] = o.decision.df;
  j["ss"] = {{"total", number(o.ftest.ss.ss_total)},
             {"regr", number(o.ftest.ss.ss_regr)},
             {"resid", number(o.ftest.ss.ss_resid)}};
  j["alpha"] = number(o.decision.alpha);
  j["f_threshold"] = number(o.decision.threshold);
  j["pass"] = o.decision.pass;
  j["queries"] = {{"oracle", o.fit.oracle_queries}, {"classical_probes", o.fit.classical_probes}};
  return j;
}

inline Json to_json(const network::PipelineReport& r) {
  Json layers = Json::array();
  for (const auto& l : r.layer_results) {
    Json j;
    j["label"] = l.label;
    j["kind"] = l.kind;
    if (l.decision) j["decision"] = to_json(*l.decision);
    if (l.bit) j["bit"] = *l.bit;
    if (l.fit) {
      j["coeffs"] = to_json(l.fit->fit.coeffs);
      j["residual_norm"] = number(l.fit->residual_norm);
      j["r"] = l.fit->r ? number(*l.fit->r) : Json(nullptr);
    }
    j["pass"] = l.pass;
    layers.push_back(std::move(j));
  }
  Json j;
  j["layer_results"] = std::move(layers);
  j["sunk_at"] = r.sunk_at ? Json(*r.sunk_at) : Json(nullptr);
  j["final_pass"] = r.final_pass;
  j["seed"] = r.seed;
  j["qnn"] = {{"size", r.size_s}, {"depth", r.depth_d}, {"weight_bound", r.weight_bound}};
  return j;
}

}  // namespace qnn::io
