#pragma once

// Dense statevector simulator.
//
// Qubit k is bit k of the basis index, so with two qubits the basis order is
// |q1 q0> = |00>, |01>, |10>, |11>. A two-qubit gate applied to targets {a, b}
// sees the local index 2*bit(a) + bit(b); for XOR the first target is the
// control and the second the target.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qnn/error.hpp"
#include "qnn/rng.hpp"

namespace qnn::qsim {

using Amplitude = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 20;
inline constexpr double kNormTolerance = 1e-10;

enum class GateKind { Id, X, Y, Z, H, Xor, Swap, PhaseFlipOracle, Diffusion };

inline const char* to_string(GateKind k) {
  switch (k) {
    case GateKind::Id: return "Id";
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
    case GateKind::H: return "H";
    case GateKind::Xor: return "XOR";
    case GateKind::Swap: return "SWAP";
    case GateKind::PhaseFlipOracle: return "PhaseFlipOracle";
    case GateKind::Diffusion: return "Diffusion";
  }
  return "?";
}

/// Unit-norm amplitude vector over 2^num_qubits basis states. Immutable: every
/// operation returns a new state.
class StateVector {
 public:
  std::size_t num_qubits() const noexcept { return num_qubits_; }
  std::size_t dimension() const noexcept { return amps_.size(); }
  const std::vector<Amplitude>& amplitudes() const noexcept { return amps_; }
  Amplitude operator[](std::size_t i) const { return amps_[i]; }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }

  /// Builds a state from explicit amplitudes; rejects wrong length, non-finite
  /// entries and norms off by more than kNormTolerance.
  static StateVector from_amplitudes(std::size_t num_qubits, std::vector<Amplitude> amps) {
    check_qubits(num_qubits);
    if (amps.size() != (std::size_t{1} << num_qubits)) {
      throw SizeError("expected " + std::to_string(std::size_t{1} << num_qubits) +
                      " amplitudes, got " + std::to_string(amps.size()));
    }
    for (const auto& a : amps) {
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw DomainError("non-finite amplitude");
    }
    StateVector s(num_qubits, std::move(amps));
    if (std::abs(s.norm_squared() - 1.0) >= kNormTolerance) throw DomainError("state is not normalized");
    return s;
  }

  static StateVector basis(std::size_t num_qubits, std::size_t index) {
    check_qubits(num_qubits);
    if (index >= (std::size_t{1} << num_qubits)) throw DomainError("basis index out of range");
    std::vector<Amplitude> amps(std::size_t{1} << num_qubits);
    amps[index] = 1.0;
    return StateVector(num_qubits, std::move(amps));
  }

  static void check_qubits(std::size_t num_qubits) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
      throw SizeError("qubit count " + std::to_string(num_qubits) + " outside [1, " +
                      std::to_string(kMaxQubits) + "]");
    }
  }

 private:
  friend StateVector with_amplitudes(const StateVector&, std::vector<Amplitude>);

  StateVector(std::size_t n, std::vector<Amplitude> amps) : num_qubits_(n), amps_(std::move(amps)) {}

  std::size_t num_qubits_ = 0;
  std::vector<Amplitude> amps_;
};

// Internal: rewraps amplitudes produced by a unitary update of `like`.
inline StateVector with_amplitudes(const StateVector& like, std::vector<Amplitude> amps) {
  return StateVector(like.num_qubits(), std::move(amps));
}

/// |0...0> on num_qubits qubits, 1 <= num_qubits <= 20.
inline StateVector new_state(std::size_t num_qubits) { return StateVector::basis(num_qubits, 0); }

/// Diagonal +-1 oracle flipping the phase of each marked basis state. Counts
/// applications; the counter is not synchronized, so one oracle belongs to one
/// search run at a time.
class PhaseOracle {
 public:
  PhaseOracle(std::size_t size, std::vector<std::size_t> marked) : size_(size), marked_(std::move(marked)) {
    if (size_ < 2 || (size_ & (size_ - 1)) != 0) {
      throw DomainError("oracle size must be a power of two >= 2, got " + std::to_string(size_));
    }
    std::sort(marked_.begin(), marked_.end());
    marked_.erase(std::unique(marked_.begin(), marked_.end()), marked_.end());
    if (!marked_.empty() && marked_.back() >= size_) throw DomainError("marked index outside [0, size)");
  }

  std::size_t size() const noexcept { return size_; }
  std::size_t num_qubits() const noexcept { return static_cast<std::size_t>(std::countr_zero(size_)); }
  const std::vector<std::size_t>& marked() const noexcept { return marked_; }
  std::uint64_t query_count() const noexcept { return queries_; }

  bool is_marked(std::size_t i) const { return std::binary_search(marked_.begin(), marked_.end(), i); }

  StateVector apply(const StateVector& s) {
    if (s.dimension() != size_) throw TargetError("oracle size does not match state dimension");
    ++queries_;
    std::vector<Amplitude> amps = s.amplitudes();
    for (std::size_t i : marked_) amps[i] = -amps[i];
    return with_amplitudes(s, std::move(amps));
  }

 private:
  std::size_t size_;
  std::vector<std::size_t> marked_;
  std::uint64_t queries_ = 0;
};

/// Square complex matrix, row-major; used to expose gate unitaries.
struct GateMatrix {
  std::size_t dim = 0;
  std::vector<Amplitude> entries;

  Amplitude operator()(std::size_t i, std::size_t j) const { return entries[i * dim + j]; }
};

namespace detail {

inline const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

inline GateMatrix local_matrix(GateKind kind) {
  using C = Amplitude;
  const C i{0.0, 1.0};
  switch (kind) {
    case GateKind::Id: return {2, {1, 0, 0, 1}};
    case GateKind::X: return {2, {0, 1, 1, 0}};
    case GateKind::Y: return {2, {0, -i, i, 0}};
    case GateKind::Z: return {2, {1, 0, 0, -1}};
    case GateKind::H: return {2, {kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2}};
    case GateKind::Xor: return {4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0}};
    case GateKind::Swap: return {4, {1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1}};
    default: break;
  }
  throw DomainError(std::string("no fixed local matrix for ") + to_string(kind));
}

inline std::size_t arity(GateKind kind, std::size_t num_qubits) {
  switch (kind) {
    case GateKind::Xor:
    case GateKind::Swap: return 2;
    case GateKind::PhaseFlipOracle:
    case GateKind::Diffusion: return num_qubits;
    default: return 1;
  }
}

inline void check_targets(GateKind kind, std::size_t num_qubits, const std::vector<std::size_t>& targets) {
  const std::size_t want = arity(kind, num_qubits);
  if (targets.size() != want) {
    throw TargetError(std::string(to_string(kind)) + " expects " + std::to_string(want) + " target(s), got " +
                      std::to_string(targets.size()));
  }
  std::uint64_t seen = 0;
  for (std::size_t t : targets) {
    if (t >= num_qubits) throw TargetError("target qubit " + std::to_string(t) + " out of range");
    if (seen & (std::uint64_t{1} << t)) throw TargetError("repeated target qubit " + std::to_string(t));
    seen |= std::uint64_t{1} << t;
  }
}

}  // namespace detail

/// Unitary of a fixed gate kind: 2x2 for one-qubit kinds, 4x4 for XOR/SWAP,
/// 2^num_qubits square for Diffusion.
inline GateMatrix gate_matrix(GateKind kind, std::size_t num_qubits = 1) {
  if (kind == GateKind::Diffusion) {
    StateVector::check_qubits(num_qubits);
    const std::size_t n = std::size_t{1} << num_qubits;
    GateMatrix m{n, std::vector<Amplitude>(n * n, 2.0 / static_cast<double>(n))};
    for (std::size_t k = 0; k < n; ++k) m.entries[k * n + k] -= 1.0;
    return m;
  }
  return detail::local_matrix(kind);
}

inline GateMatrix oracle_matrix(const PhaseOracle& oracle) {
  const std::size_t n = oracle.size();
  GateMatrix m{n, std::vector<Amplitude>(n * n)};
  for (std::size_t k = 0; k < n; ++k) m.entries[k * n + k] = oracle.is_marked(k) ? -1.0 : 1.0;
  return m;
}

/// Inversion about the mean, 2|s><s| - I with |s> the uniform superposition.
inline StateVector apply_diffusion(const StateVector& s) {
  Amplitude mean = 0.0;
  for (const auto& a : s.amplitudes()) mean += a;
  mean /= static_cast<double>(s.dimension());
  std::vector<Amplitude> amps(s.dimension());
  for (std::size_t k = 0; k < amps.size(); ++k) amps[k] = 2.0 * mean - s[k];
  return with_amplitudes(s, std::move(amps));
}

/// Applies `kind` to the listed target qubits (identity elsewhere). Oracles carry
/// a marked set and go through PhaseOracle::apply instead.
inline StateVector apply_gate(const StateVector& s, GateKind kind, const std::vector<std::size_t>& targets) {
  if (kind == GateKind::PhaseFlipOracle) {
    throw TargetError("PhaseFlipOracle needs a marked set; use PhaseOracle::apply");
  }
  detail::check_targets(kind, s.num_qubits(), targets);
  if (kind == GateKind::Diffusion) return apply_diffusion(s);
  if (kind == GateKind::Id) return s;

  const GateMatrix u = detail::local_matrix(kind);
  std::vector<Amplitude> amps = s.amplitudes();
  const std::size_t n = amps.size();

  if (u.dim == 2) {
    const std::size_t bit = std::size_t{1} << targets[0];
    for (std::size_t k = 0; k < n; ++k) {
      if (k & bit) continue;
      const Amplitude a0 = amps[k], a1 = amps[k | bit];
      amps[k] = u(0, 0) * a0 + u(0, 1) * a1;
      amps[k | bit] = u(1, 0) * a0 + u(1, 1) * a1;
    }
  } else {
    const std::size_t hi = std::size_t{1} << targets[0];
    const std::size_t lo = std::size_t{1} << targets[1];
    for (std::size_t k = 0; k < n; ++k) {
      if (k & (hi | lo)) continue;
      const std::size_t idx[4] = {k, k | lo, k | hi, k | hi | lo};
      Amplitude in[4], out[4];
      for (int r = 0; r < 4; ++r) in[r] = amps[idx[r]];
      for (int r = 0; r < 4; ++r) {
        out[r] = 0.0;
        for (int c = 0; c < 4; ++c) out[r] += u(r, c) * in[c];
      }
      for (int r = 0; r < 4; ++r) amps[idx[r]] = out[r];
    }
  }
  return with_amplitudes(s, std::move(amps));
}

/// Born-rule probability of one basis outcome.
inline double probability(const StateVector& s, std::size_t basis_index) {
  if (basis_index >= s.dimension()) {
    throw DomainError("basis index " + std::to_string(basis_index) + " out of range");
  }
  return std::norm(s[basis_index]);
}

struct Measurement {
  std::size_t index;
  StateVector collapsed;
};

/// Samples a basis index from the Born distribution with a seeded mt19937_64 and
/// returns it with the collapsed basis state.
inline Measurement measure_all(const StateVector& s, std::uint64_t seed) {
  Rng rng(seed);
  const double u = uniform01(rng) * s.norm_squared();
  double acc = 0.0;
  std::size_t chosen = s.dimension();
  std::size_t last_nonzero = 0;
  for (std::size_t k = 0; k < s.dimension(); ++k) {
    const double p = std::norm(s[k]);
    if (p > 0.0) last_nonzero = k;
    acc += p;
    if (u < acc) {
      chosen = k;
      break;
    }
  }
  if (chosen == s.dimension()) chosen = last_nonzero;  // rounding at the upper end
  return {chosen, StateVector::basis(s.num_qubits(), chosen)};
}

}  // namespace qnn::qsim
