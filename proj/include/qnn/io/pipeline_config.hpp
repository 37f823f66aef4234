#pragma once

// Pipeline description files.
//
//   # comment (also allowed after a value)
//   strategy = grover          # optional: classical | grover
//   tol = 1e-10                # optional pivot tolerance
//
//   [layer]
//   label = regression         # optional, defaults to "<kind><index>"
//   kind = fit                 # fit | chi2 | threshold | equality
//   degree = 1                 # fit
//   alpha = 0.05               # fit, chi2
//   samples = flat.csv         # fit: CSV with header x1,...,xn,y
//
//   [layer]
//   kind = chi2
//   observed = obs.csv         # chi2: headerless matrix
//   expected = exp.csv         # chi2, optional: derived from marginals if absent
//
//   [layer]
//   kind = threshold
//   delta = 1                  # threshold
//
// Global keys must precede the first [layer]. Relative data paths resolve
// against the directory containing the config file.

#include <charconv>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qnn/error.hpp"
#include "qnn/io/csv.hpp"
#include "qnn/network.hpp"
#include "qnn/qgje.hpp"

namespace qnn::io {

struct InputFile {
  std::string role;  // e.g. "layer0.samples"
  std::filesystem::path path;
};

struct PipelineConfig {
  std::vector<network::LayerSpec> layers;
  std::optional<qgje::PivotStrategy> strategy;
  std::optional<double> tol;
  std::vector<InputFile> inputs;
};

namespace detail {

struct Section {
  std::size_t line = 0;
  std::map<std::string, std::string, std::less<>> keys;
};

inline double config_double(const Section& s, std::string_view key, double fallback) {
  const auto it = s.keys.find(key);
  if (it == s.keys.end()) return fallback;
  double v = 0.0;
  if (!parse_double(it->second, v)) {
    throw ConfigError("line " + std::to_string(s.line) + ": '" + std::string(key) + "' must be a number");
  }
  return v;
}

inline long long config_int(const Section& s, std::string_view key, long long fallback) {
  const auto it = s.keys.find(key);
  if (it == s.keys.end()) return fallback;
  long long v = 0;
  const auto& txt = it->second;
  const auto [ptr, ec] = std::from_chars(txt.data(), txt.data() + txt.size(), v);
  if (ec != std::errc() || ptr != txt.data() + txt.size()) {
    throw ConfigError("line " + std::to_string(s.line) + ": '" + std::string(key) + "' must be an integer");
  }
  return v;
}

inline void allow_only(const Section& s, std::initializer_list<std::string_view> allowed) {
  for (const auto& [k, v] : s.keys) {
    bool ok = false;
    for (auto a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError("line " + std::to_string(s.line) + ": unknown key '" + k + "' for this layer kind");
  }
}

}  // namespace detail

/// Parses a pipeline description and loads every data file it names.
inline PipelineConfig parse_pipeline_config_text(std::string_view text, const std::filesystem::path& base_dir) {
  detail::Section globals;
  std::vector<detail::Section> sections;
  detail::Section* current = &globals;

  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find('\n', start);
    std::string_view line = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    ++number;
    start = pos == std::string_view::npos ? text.size() + 1 : pos + 1;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line == "[layer]") {
      sections.push_back({number, {}});
      current = &sections.back();
      continue;
    }
    if (line.front() == '[') throw ConfigError("line " + std::to_string(number) + ": unknown section " + std::string(line));
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    if (key.empty() || value.empty()) throw ConfigError("line " + std::to_string(number) + ": empty key or value");
    if (!current->keys.emplace(key, value).second) {
      throw ConfigError("line " + std::to_string(number) + ": duplicate key '" + key + "'");
    }
    if (current->line == 0) current->line = number;
  }

  PipelineConfig cfg;
  detail::allow_only(globals, {"strategy", "tol"});
  if (auto it = globals.keys.find("strategy"); it != globals.keys.end()) {
    try {
      cfg.strategy = qgje::parse_strategy(it->second);
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  if (globals.keys.count("tol")) cfg.tol = detail::config_double(globals, "tol", qgje::kDefaultTol);

  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };

  for (std::size_t i = 0; i < sections.size(); ++i) {
    const auto& s = sections[i];
    const auto kind_it = s.keys.find("kind");
    if (kind_it == s.keys.end()) throw ConfigError("line " + std::to_string(s.line) + ": layer without 'kind'");
    const std::string& kind = kind_it->second;
    const auto label_it = s.keys.find("label");
    network::LayerSpec spec;
    spec.label = label_it != s.keys.end() ? label_it->second : kind + std::to_string(i);
    const std::string role = "layer" + std::to_string(i);

    if (kind == "fit") {
      detail::allow_only(s, {"kind", "label", "degree", "alpha", "samples"});
      network::FitGate g;
      const long long degree = detail::config_int(s, "degree", 1);
      if (degree < 0) throw ConfigError("line " + std::to_string(s.line) + ": degree must be non-negative");
      g.degree = static_cast<unsigned>(degree);
      g.alpha = detail::config_double(s, "alpha", 0.05);
      if (auto it = s.keys.find("samples"); it != s.keys.end()) {
        const auto path = resolve(it->second);
        g.samples = parse_csv_samples(path);
        cfg.inputs.push_back({role + ".samples", path});
      }
      spec.kind = std::move(g);
    } else if (kind == "chi2") {
      detail::allow_only(s, {"kind", "label", "alpha", "observed", "expected"});
      network::Chi2Gate g;
      g.alpha = detail::config_double(s, "alpha", 0.05);
      const auto obs = s.keys.find("observed");
      if (obs != s.keys.end()) {
        const auto opath = resolve(obs->second);
        Matrix observed = parse_csv_matrix(opath);
        cfg.inputs.push_back({role + ".observed", opath});
        if (auto exp = s.keys.find("expected"); exp != s.keys.end()) {
          const auto epath = resolve(exp->second);
          g.table = stats::ContingencyTable::make(std::move(observed), parse_csv_matrix(epath));
          cfg.inputs.push_back({role + ".expected", epath});
        } else {
          g.table = stats::ContingencyTable::from_marginals(std::move(observed));
        }
      } else if (s.keys.count("expected")) {
        throw ConfigError("line " + std::to_string(s.line) + ": 'expected' given without 'observed'");
      }
      spec.kind = std::move(g);
    } else if (kind == "threshold") {
      detail::allow_only(s, {"kind", "label", "delta", "weight_bound"});
      network::BoolThreshold t;
      t.delta = detail::config_int(s, "delta", 1);
      const long long w = detail::config_int(s, "weight_bound", 1);
      if (w < 1) throw ConfigError("line " + std::to_string(s.line) + ": weight_bound must be positive");
      t.weight_bound = static_cast<unsigned>(w);
      spec.kind = t;
    } else if (kind == "equality") {
      detail::allow_only(s, {"kind", "label"});
      spec.kind = network::BoolEquality{};
    } else {
      throw ConfigError("line " + std::to_string(s.line) + ": unknown layer kind '" + kind + "'");
    }
    cfg.layers.push_back(std::move(spec));
  }
  return cfg;
}

inline PipelineConfig parse_pipeline_config(const std::filesystem::path& path) {
  return parse_pipeline_config_text(read_file(path), path.parent_path());
}

}  // namespace qnn::io
