#pragma once

// Bell-diagonal two-qubit states and the label algebra used by every
// protocol in the library.
//
// Bell states are labelled by two bits (phase, amplitude):
//   00 = Phi+, 01 = Psi+, 10 = Phi-, 11 = Psi-
// so an amplitude flip (X) maps Phi+ to Psi+ and a phase flip (Z) maps
// Phi+ to Phi-. Arrays indexed by BellLabel use index = 2*phase + amplitude.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

namespace ebcap {

inline constexpr double kNormTolerance = 1e-9;

struct BellLabel {
  std::uint8_t phase = 0;
  std::uint8_t amplitude = 0;

  constexpr BellLabel() = default;
  constexpr BellLabel(unsigned ph, unsigned amp)
      : phase(static_cast<std::uint8_t>(ph & 1u)),
        amplitude(static_cast<std::uint8_t>(amp & 1u)) {}

  static constexpr BellLabel from_index(unsigned index) {
    return BellLabel{(index >> 1) & 1u, index & 1u};
  }
  constexpr unsigned index() const { return 2u * phase + amplitude; }

  friend constexpr BellLabel operator^(BellLabel a, BellLabel b) {
    return BellLabel{unsigned(a.phase ^ b.phase),
                     unsigned(a.amplitude ^ b.amplitude)};
  }
  friend constexpr bool operator==(BellLabel, BellLabel) = default;
};

inline constexpr BellLabel kPhiPlus{0, 0};
inline constexpr BellLabel kPsiPlus{0, 1};
inline constexpr BellLabel kPhiMinus{1, 0};
inline constexpr BellLabel kPsiMinus{1, 1};

inline std::string to_string(BellLabel l) {
  static constexpr const char* names[4] = {"Phi+", "Psi+", "Phi-", "Psi-"};
  return names[l.index()];
}

/// Shannon entropy in bits of a probability vector. 0 log 0 is taken as 0.
/// Throws std::invalid_argument on a negative entry or when the entries do not
/// sum to 1 within kNormTolerance.
inline double shannon_entropy(std::span<const double> dist) {
  double total = 0.0;
  for (double q : dist) {
    if (!(q >= 0.0)) {
      throw std::invalid_argument("shannon_entropy: negative or NaN component");
    }
    total += q;
  }
  if (std::abs(total - 1.0) > kNormTolerance) {
    throw std::invalid_argument("shannon_entropy: distribution not normalized");
  }
  double h = 0.0;
  for (double q : dist) {
    if (q > 0.0) h -= q * std::log2(q);
  }
  return h;
}

/// Probability 4-vector over Bell states, indexed by BellLabel.
class BellDiagonal {
 public:
  using Weights = std::array<double, 4>;

  BellDiagonal() : p_{1.0, 0.0, 0.0, 0.0} {}

  /// Accepts weights normalized within kNormTolerance and renormalizes them
  /// exactly; anything worse is rejected.
  explicit BellDiagonal(const Weights& w) : p_(w) {
    double total = 0.0;
    for (double q : p_) {
      if (!(q >= 0.0) || q > 1.0 + kNormTolerance) {
        throw std::invalid_argument("BellDiagonal: component outside [0,1]");
      }
      total += q;
    }
    if (std::abs(total - 1.0) > kNormTolerance) {
      throw std::invalid_argument("BellDiagonal: components do not sum to 1");
    }
    for (double& q : p_) q /= total;
  }

  /// Normalizes arbitrary nonnegative weights with a positive sum.
  static BellDiagonal from_unnormalized(const Weights& w) {
    double total = w[0] + w[1] + w[2] + w[3];
    if (!(total > 0.0)) {
      throw std::invalid_argument("BellDiagonal: zero total weight");
    }
    return BellDiagonal(Weights{w[0] / total, w[1] / total, w[2] / total,
                                w[3] / total});
  }

  static BellDiagonal point_mass(BellLabel l) {
    Weights w{};
    w[l.index()] = 1.0;
    return BellDiagonal(w);
  }

  /// Reorders components without renormalizing, so permutations compose
  /// exactly.
  BellDiagonal permuted(const std::array<unsigned, 4>& from) const {
    BellDiagonal out;
    for (unsigned i = 0; i < 4; ++i) out.p_[i] = p_[from[i]];
    return out;
  }

  double operator[](BellLabel l) const { return p_[l.index()]; }
  double operator[](unsigned index) const { return p_[index]; }
  const Weights& weights() const { return p_; }
  std::span<const double, 4> span() const { return p_; }

  double entropy() const { return shannon_entropy(p_); }

  friend bool operator==(const BellDiagonal&, const BellDiagonal&) = default;

 private:
  Weights p_;
};

/// The p-depolarizing qubit channel: passes the qubit untouched with
/// probability p, otherwise replaces it with a maximally mixed qubit.
class DepolarizingChannel {
 public:
  explicit DepolarizingChannel(double p) : p_(p) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("DepolarizingChannel: p outside [0,1]");
    }
  }

  static DepolarizingChannel from_fidelity(double fidelity) {
    return DepolarizingChannel((4.0 * fidelity - 1.0) / 3.0);
  }

  double p() const { return p_; }
  /// Weight of the identity Pauli, (3p+1)/4.
  double fidelity() const { return (3.0 * p_ + 1.0) / 4.0; }
  /// Weight of each of X, Y, Z, (1-p)/4.
  double error_weight() const { return (1.0 - p_) / 4.0; }

 private:
  double p_;
};

inline double fidelity_from_p(double p) { return (3.0 * p + 1.0) / 4.0; }
inline double p_from_fidelity(double f) { return (4.0 * f - 1.0) / 3.0; }

inline BellDiagonal werner_from_fidelity(double fidelity) {
  if (!(fidelity >= 0.0 && fidelity <= 1.0)) {
    throw std::invalid_argument("werner_from_fidelity: F outside [0,1]");
  }
  double g = (1.0 - fidelity) / 3.0;
  return BellDiagonal({fidelity, g, g, g});
}

/// Sends the second half of a Bell-diagonal pair through the channel:
/// output[l] = sum_m kernel[l ^ m] * state[m] with kernel = (F, G, G, G).
inline BellDiagonal depolarize_pair(const BellDiagonal& state,
                                    const DepolarizingChannel& channel) {
  const double f = channel.fidelity();
  const double g = channel.error_weight();
  BellDiagonal::Weights out{};
  for (unsigned l = 0; l < 4; ++l) {
    for (unsigned m = 0; m < 4; ++m) {
      out[l] += ((l ^ m) == 0 ? f : g) * state[m];
    }
  }
  return BellDiagonal::from_unnormalized(out);
}

/// 1 - H(state), clamped at zero: the parties decline to hash when the
/// asymptotic yield would be negative.
inline double hashing_yield(const BellDiagonal& state) {
  double y = 1.0 - state.entropy();
  return y > 0.0 ? y : 0.0;
}

/// Bilateral XOR (CNOT on both halves) acting on the labels of a
/// (source, target) pair. Amplitude bits flow source -> target and phase bits
/// flow target -> source.
inline constexpr std::pair<BellLabel, BellLabel> bxor(BellLabel source,
                                                      BellLabel target) {
  return {BellLabel{unsigned(source.phase ^ target.phase), source.amplitude},
          BellLabel{target.phase, unsigned(target.amplitude ^ source.amplitude)}};
}

/// Exchanges the Phi- and Psi- weights (the relabeling used by the modified
/// recurrence and modified Cat protocols).
inline BellDiagonal modified_swap(const BellDiagonal& state) {
  return state.permuted({0, 1, 3, 2});
}

}  // namespace ebcap
