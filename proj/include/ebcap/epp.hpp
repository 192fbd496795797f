#pragma once

// Entanglement purification over Bell-label strings.
//
// A group of m pairs is described by a probability distribution over 2m-bit
// strings; pair i occupies bits 2i (amplitude) and 2i+1 (phase), so
// (s >> 2i) & 3 is the BellLabel index of pair i. Bilateral XOR gates permute
// the strings, measurements post-select on single bits.

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ebcap/bell.hpp"
#include "ebcap/capacity.hpp"
#include "ebcap/pauli.hpp"

namespace ebcap {

inline constexpr int kMaxPairs = 8;

enum class Basis { X, Z };

/// X passes iff the phase bit is 0, Z passes iff the amplitude bit is 0.
inline bool passes(BellLabel l, Basis b) {
  return b == Basis::X ? l.phase == 0 : l.amplitude == 0;
}

struct Measurement {
  int pair = 0;
  Basis basis = Basis::Z;
  friend bool operator==(const Measurement&, const Measurement&) = default;
};

struct BxorGate {
  int source = 0;
  int target = 0;
  friend bool operator==(const BxorGate&, const BxorGate&) = default;
};

/// Pair indices are 0-based here; the text format is 1-based.
struct GateNetwork {
  std::string name;
  int num_pairs = 0;
  std::vector<BxorGate> gates;
  std::vector<Measurement> measurements;
  std::vector<int> kept;

  friend bool operator==(const GateNetwork&, const GateNetwork&) = default;
};

inline std::optional<std::string> validate_network(const GateNetwork& net) {
  if (net.num_pairs < 1 || net.num_pairs > kMaxPairs) {
    return "pair count must be in [1, " + std::to_string(kMaxPairs) + "]";
  }
  auto in_range = [&](int i) { return i >= 0 && i < net.num_pairs; };
  for (const auto& g : net.gates) {
    if (!in_range(g.source) || !in_range(g.target)) return "gate pair index out of range";
    if (g.source == g.target) return "gate source and target must differ";
  }
  std::vector<int> role(static_cast<std::size_t>(net.num_pairs), 0);
  for (const auto& m : net.measurements) {
    if (!in_range(m.pair)) return "measured pair out of range";
    if (role[static_cast<std::size_t>(m.pair)]++) {
      return "pair " + std::to_string(m.pair + 1) + " measured more than once";
    }
  }
  for (int k : net.kept) {
    if (!in_range(k)) return "kept pair out of range";
    if (role[static_cast<std::size_t>(k)]++) {
      return "pair " + std::to_string(k + 1) + " is both kept and measured, or kept twice";
    }
  }
  for (int i = 0; i < net.num_pairs; ++i) {
    if (role[static_cast<std::size_t>(i)] == 0) {
      return "pair " + std::to_string(i + 1) + " is neither measured nor kept";
    }
  }
  return std::nullopt;
}

class PairEnsembleDistribution {
 public:
  explicit PairEnsembleDistribution(int num_pairs, std::vector<double> probs)
      : m_(num_pairs), p_(std::move(probs)) {
    if (num_pairs < 0 || num_pairs > kMaxPairs) {
      throw std::invalid_argument("PairEnsembleDistribution: bad pair count");
    }
    if (p_.size() != size_for(num_pairs)) {
      throw std::invalid_argument("PairEnsembleDistribution: expected 4^m entries");
    }
    double total = 0.0;
    for (double q : p_) {
      if (!(q >= 0.0)) throw std::invalid_argument("PairEnsembleDistribution: negative entry");
      total += q;
    }
    if (std::abs(total - 1.0) > kNormTolerance) {
      throw std::invalid_argument("PairEnsembleDistribution: not normalized");
    }
    for (double& q : p_) q /= total;
  }

  static std::size_t size_for(int num_pairs) {
    return std::size_t{1} << (2 * num_pairs);
  }

  static PairEnsembleDistribution product(const std::vector<BellDiagonal>& pairs) {
    const int m = static_cast<int>(pairs.size());
    std::vector<double> p(size_for(m), 1.0);
    for (std::size_t s = 0; s < p.size(); ++s) {
      for (int i = 0; i < m; ++i) {
        p[s] *= pairs[static_cast<std::size_t>(i)][static_cast<unsigned>((s >> (2 * i)) & 3u)];
      }
    }
    return PairEnsembleDistribution(m, std::move(p));
  }

  static PairEnsembleDistribution werner_power(double fidelity, int num_pairs) {
    return product(std::vector<BellDiagonal>(static_cast<std::size_t>(num_pairs),
                                             werner_from_fidelity(fidelity)));
  }

  static PairEnsembleDistribution uniform(int num_pairs) {
    return PairEnsembleDistribution(
        num_pairs, std::vector<double>(size_for(num_pairs),
                                       1.0 / static_cast<double>(size_for(num_pairs))));
  }

  int num_pairs() const { return m_; }
  const std::vector<double>& probabilities() const { return p_; }
  double operator[](std::size_t s) const { return p_[s]; }

  double entropy() const { return shannon_entropy(p_); }

 private:
  int m_;
  std::vector<double> p_;
};

inline BellLabel pair_label(std::uint32_t s, int pair) {
  return BellLabel::from_index((s >> (2 * pair)) & 3u);
}

inline std::uint32_t with_pair_label(std::uint32_t s, int pair, BellLabel l) {
  s &= ~(std::uint32_t{3} << (2 * pair));
  return s | (std::uint32_t{l.index()} << (2 * pair));
}

/// Image of one label string under the network's gate list.
inline std::uint32_t apply_gates(std::uint32_t s, const std::vector<BxorGate>& gates) {
  for (const auto& g : gates) {
    const auto [src, tgt] = bxor(pair_label(s, g.source), pair_label(s, g.target));
    s = with_pair_label(s, g.source, src);
    s = with_pair_label(s, g.target, tgt);
  }
  return s;
}

/// The gate list as a permutation table over all 4^m strings.
inline std::vector<std::uint32_t> network_permutation(const GateNetwork& net) {
  std::vector<std::uint32_t> perm(PairEnsembleDistribution::size_for(net.num_pairs));
  for (std::uint32_t s = 0; s < perm.size(); ++s) perm[s] = apply_gates(s, net.gates);
  return perm;
}

inline bool passes_measurements(std::uint32_t s, const GateNetwork& net) {
  for (const auto& m : net.measurements) {
    if (!passes(pair_label(s, m.pair), m.basis)) return false;
  }
  return true;
}

/// Index of the kept pairs' labels, kept[j] going to slot j.
inline std::uint32_t kept_index(std::uint32_t s, const GateNetwork& net) {
  std::uint32_t out = 0;
  for (std::size_t j = 0; j < net.kept.size(); ++j) {
    out |= std::uint32_t{pair_label(s, net.kept[j]).index()} << (2 * j);
  }
  return out;
}

struct NetworkResult {
  double p_pass = 0.0;
  /// Distribution over the kept pairs given that every measurement passed;
  /// empty when p_pass is zero.
  std::optional<PairEnsembleDistribution> post;
};

inline NetworkResult apply_network(const PairEnsembleDistribution& dist, const GateNetwork& net) {
  if (auto diag = validate_network(net)) {
    throw std::invalid_argument("apply_network: " + *diag);
  }
  if (dist.num_pairs() != net.num_pairs) {
    throw std::invalid_argument("apply_network: distribution and network pair counts differ");
  }
  const int kept = static_cast<int>(net.kept.size());
  std::vector<double> q(PairEnsembleDistribution::size_for(kept), 0.0);
  double pass = 0.0;
  const auto& p = dist.probabilities();
  for (std::uint32_t s = 0; s < p.size(); ++s) {
    if (p[s] == 0.0) continue;
    const std::uint32_t t = apply_gates(s, net.gates);
    if (!passes_measurements(t, net)) continue;
    pass += p[s];
    q[kept_index(t, net)] += p[s];
  }
  NetworkResult result;
  result.p_pass = pass;
  if (pass > 0.0) {
    for (double& v : q) v /= pass;
    result.post.emplace(kept, std::move(q));
  }
  return result;
}

/// Ebits per input pair when the surviving pairs are hashed:
/// p_pass * max(0, kept - H(post)) / m.
inline double network_hashing_yield(const PairEnsembleDistribution& dist, const GateNetwork& net) {
  const auto r = apply_network(dist, net);
  if (!r.post) return 0.0;
  const double bits = static_cast<double>(net.kept.size()) - r.post->entropy();
  return bits > 0.0 ? r.p_pass * bits / net.num_pairs : 0.0;
}

// ---------------------------------------------------------------------------
// Network text format

inline GateNetwork parse_network_file(std::string_view text) {
  GateNetwork net;
  bool have_pairs = false;
  bool have_keep = false;
  int line_no = 0;
  std::size_t pos = 0;
  auto pair_index = [&](const std::string& tok) {
    const int v = detail::parse_int(tok, line_no);
    if (!have_pairs) throw ParseError(line_no, "'pairs' must come first");
    if (v < 1 || v > net.num_pairs) throw ParseError(line_no, "pair index out of range");
    return v - 1;
  };
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    const auto line =
        text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    const auto tok = detail::tokens(line);
    if (tok.empty()) continue;
    const std::string& key = tok[0];
    if (key == "name") {
      if (tok.size() != 2) throw ParseError(line_no, "expected 'name <word>'");
      net.name = tok[1];
    } else if (key == "pairs") {
      if (have_pairs) throw ParseError(line_no, "duplicate 'pairs' line");
      if (tok.size() != 2) throw ParseError(line_no, "expected 'pairs <m>'");
      net.num_pairs = detail::parse_int(tok[1], line_no);
      if (net.num_pairs < 1 || net.num_pairs > kMaxPairs) {
        throw ParseError(line_no, "pair count must be in [1, " + std::to_string(kMaxPairs) + "]");
      }
      have_pairs = true;
    } else if (key == "bxor") {
      if (tok.size() != 3) throw ParseError(line_no, "expected 'bxor <src> <dst>'");
      net.gates.push_back({pair_index(tok[1]), pair_index(tok[2])});
      if (net.gates.back().source == net.gates.back().target) {
        throw ParseError(line_no, "gate source and target must differ");
      }
    } else if (key == "measure") {
      if (tok.size() != 3 || (tok[2] != "X" && tok[2] != "Z")) {
        throw ParseError(line_no, "expected 'measure <pair> <X|Z>'");
      }
      net.measurements.push_back({pair_index(tok[1]), tok[2] == "X" ? Basis::X : Basis::Z});
    } else if (key == "keep") {
      if (tok.size() < 2) throw ParseError(line_no, "expected 'keep <pair> ...'");
      if (have_keep) throw ParseError(line_no, "duplicate 'keep' line");
      for (std::size_t i = 1; i < tok.size(); ++i) net.kept.push_back(pair_index(tok[i]));
      have_keep = true;
    } else {
      throw ParseError(line_no, "unknown keyword '" + key + "'");
    }
  }
  if (!have_pairs) throw ParseError(0, "missing 'pairs' line");
  if (auto diag = validate_network(net)) throw ParseError(0, "invalid network: " + *diag);
  return net;
}

inline std::string render_network(const GateNetwork& net) {
  std::ostringstream out;
  if (!net.name.empty()) out << "name " << net.name << '\n';
  out << "pairs " << net.num_pairs << '\n';
  for (const auto& g : net.gates) out << "bxor " << g.source + 1 << ' ' << g.target + 1 << '\n';
  for (const auto& m : net.measurements) {
    out << "measure " << m.pair + 1 << ' ' << (m.basis == Basis::X ? 'X' : 'Z') << '\n';
  }
  out << "keep";
  for (int k : net.kept) out << ' ' << k + 1;
  out << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Presets

/// Two pairs, XOR 1 -> 2, target measured in Z.
inline GateNetwork recurrence_network() {
  return {"recurrence", 2, {{0, 1}}, {{1, Basis::Z}}, {0}};
}

/// Four pairs in, two out. Pair 4 collects the amplitude parity of pairs
/// 1, 2, 4 and is read in Z; pair 3 collects the phase parity of pairs
/// 1, 2, 3 and is read in X.
inline GateNetwork leung_shor_network() {
  return {"leung-shor",
          4,
          {{0, 3}, {1, 3}, {2, 0}, {2, 1}},
          {{2, Basis::X}, {3, Basis::Z}},
          {0, 1}};
}

// ---------------------------------------------------------------------------
// Recurrence methods

struct StepResult {
  BellDiagonal state;
  double p_pass = 0.0;
};

/// One round of the recurrence method: XOR source onto target, read the
/// target in Z, keep the source when both sides agree.
///   p00' = (p00^2 + p10^2)/N   p01' = (p01^2 + p11^2)/N
///   p10' = 2 p00 p10 / N       p11' = 2 p01 p11 / N
/// with N the pass probability. This is the map recurrence_network() induces.
inline StepResult recurrence_step(const BellDiagonal& state) {
  const auto& w = state.weights();
  const double p00 = w[0], p01 = w[1], p10 = w[2], p11 = w[3];
  const double pass = p00 * p00 + p01 * p01 + p10 * p10 + p11 * p11 + 2.0 * p00 * p10 +
                      2.0 * p01 * p11;
  if (!(pass > 0.0)) throw std::domain_error("recurrence_step: zero pass probability");
  return {BellDiagonal::from_unnormalized(
              {p00 * p00 + p10 * p10, p01 * p01 + p11 * p11, 2.0 * p00 * p10, 2.0 * p01 * p11}),
          pass};
}

/// Recurrence round followed by the Phi-/Psi- exchange:
///   p10' = 2 p01 p11 / N       p11' = 2 p00 p10 / N
inline StepResult modified_recurrence_step(const BellDiagonal& state) {
  auto r = recurrence_step(state);
  r.state = modified_swap(r.state);
  return r;
}

/// Ebits per channel use of the 4 -> 2 network followed by hashing of the
/// two surviving pairs (four channel uses per group).
inline double leung_shor_yield(double fidelity, const GateNetwork& net = leung_shor_network()) {
  return network_hashing_yield(PairEnsembleDistribution::werner_power(fidelity, net.num_pairs),
                               net);
}

inline double leung_shor_yield(const DepolarizingChannel& channel,
                               const GateNetwork& net = leung_shor_network()) {
  return leung_shor_yield(channel.fidelity(), net);
}

/// k rounds of modified recurrence and then hashing. The first round is free
/// of forward communication; each later round costs 1/C channel uses per
/// pair to send Alice's measurement bit.
inline double multi_round_recurrence_eb(const DepolarizingChannel& channel, int rounds) {
  if (rounds < 1) throw std::invalid_argument("multi_round_recurrence_eb: rounds must be >= 1");
  const double capacity = classical_capacity_depolarizing(channel.p());
  BellDiagonal state = werner_from_fidelity(channel.fidelity());
  double rate = 1.0;
  for (int j = 1; j <= rounds; ++j) {
    const auto step = modified_recurrence_step(state);
    if (j == 1) {
      rate *= step.p_pass / 2.0;
    } else {
      if (!(capacity > 0.0)) return 0.0;
      rate *= step.p_pass / (2.0 + 1.0 / capacity);
    }
    state = step.state;
  }
  return rate * hashing_yield(state);
}

struct RoundsChoice {
  int rounds = 1;
  double yield = 0.0;
};

/// Best round count in 1..max_rounds; ties keep the smaller count.
inline RoundsChoice best_recurrence_rounds(const DepolarizingChannel& channel, int max_rounds) {
  if (max_rounds < 1) throw std::invalid_argument("best_recurrence_rounds: max_rounds must be >= 1");
  RoundsChoice best{1, multi_round_recurrence_eb(channel, 1)};
  for (int k = 2; k <= max_rounds; ++k) {
    const double y = multi_round_recurrence_eb(channel, k);
    if (y > best.yield) best = {k, y};
  }
  return best;
}

}  // namespace ebcap
