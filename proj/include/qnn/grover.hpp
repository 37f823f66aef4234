#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>

#include "qnn/error.hpp"
#include "qnn/qsim.hpp"

namespace qnn::grover {

/// Marked-set phase oracle over M = 2^q items with a query counter.
using Oracle = qsim::PhaseOracle;

struct GroverRun {
  std::uint64_t iterations = 0;
  std::size_t measured_index = 0;
  bool success = false;  // measured_index is marked
  std::uint64_t oracle_queries = 0;
  std::uint64_t seed = 0;
};

/// Smallest power of two >= n, and at least 2 (one qubit).
inline std::size_t padded_size(std::size_t n) { return std::bit_ceil(std::max<std::size_t>(n, 2)); }

namespace detail {

inline void check_domain(std::size_t size, std::size_t k_marked) {
  if (size == 0 || !std::has_single_bit(size)) {
    throw DomainError("search size must be a power of two, got " + std::to_string(size));
  }
  if (k_marked == 0 || k_marked > size) {
    throw DomainError("marked count " + std::to_string(k_marked) + " outside [1, " + std::to_string(size) + "]");
  }
}

}  // namespace detail

/// floor(pi/4 * sqrt(M/k)).
inline std::uint64_t optimal_iterations(std::size_t size, std::size_t k_marked) {
  detail::check_domain(size, k_marked);
  if (k_marked == size) return 0;
  const double ratio = static_cast<double>(size) / static_cast<double>(k_marked);
  return static_cast<std::uint64_t>(std::floor(std::numbers::pi / 4.0 * std::sqrt(ratio)));
}

/// Closed-form probability of measuring a marked item after t rounds:
/// sin^2((2t + 1) * asin(sqrt(k/M))).
inline double success_probability(std::size_t size, std::size_t k_marked, std::uint64_t iterations) {
  detail::check_domain(size, k_marked);
  const double theta = std::asin(std::sqrt(static_cast<double>(k_marked) / static_cast<double>(size)));
  const double s = std::sin((2.0 * static_cast<double>(iterations) + 1.0) * theta);
  return s * s;
}

/// Uniform superposition, then `iterations` rounds of phase flip + diffusion,
/// then a full measurement seeded by `seed`. An empty marked set is legal and
/// simply yields success = false.
inline GroverRun grover_search(Oracle& oracle, std::uint64_t iterations, std::uint64_t seed) {
  const std::size_t q = oracle.num_qubits();
  auto state = qsim::new_state(q);
  for (std::size_t t = 0; t < q; ++t) state = qsim::apply_gate(state, qsim::GateKind::H, {t});

  const std::uint64_t before = oracle.query_count();
  for (std::uint64_t it = 0; it < iterations; ++it) {
    state = oracle.apply(state);
    state = qsim::apply_diffusion(state);
  }

  const auto m = qsim::measure_all(state, seed);
  GroverRun run;
  run.iterations = iterations;
  run.measured_index = m.index;
  run.success = oracle.is_marked(m.index);
  run.oracle_queries = oracle.query_count() - before;
  run.seed = seed;
  return run;
}

}  // namespace qnn::grover
