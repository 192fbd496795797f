#pragma once

// Adaptive stabilizer-code protocols for sharing ebits over the depolarizing
// channel with classical feedback.
//
// Alice encodes half of a Phi+ pair into an [n,1] code and sends the n qubits
// one at a time. Bob measures generator g_i as soon as its support has
// arrived; if any of the first k outcomes is -1 the block is abandoned and a
// new one started. Blocks that pass the prefix are sorted by the remaining
// syndrome bits and each class is hashed separately.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ebcap/bell.hpp"
#include "ebcap/parallel.hpp"
#include "ebcap/pauli.hpp"

namespace ebcap {

inline constexpr int kDefaultEnumerationBudget = 12;

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integer tally of all 4^n Pauli patterns by (syndrome, logical class,
/// number of non-identity qubits). The tally is channel independent; a
/// SyndromeTable for any p is a weighted sum over it.
class PatternCensus {
 public:
  PatternCensus(const StabilizerCode& code, int max_qubits = kDefaultEnumerationBudget,
                unsigned workers = default_workers())
      : n_(code.n), m_(code.num_generators()) {
    if (auto diag = validate_code(code)) {
      throw std::invalid_argument("enumerate_code: invalid code: " + *diag);
    }
    if (n_ > max_qubits) {
      throw BudgetExceeded("exhaustive enumeration of 4^" + std::to_string(n_) +
                           " patterns exceeds the budget of n <= " +
                           std::to_string(max_qubits) +
                           "; use Monte Carlo mode (code --trials N) instead");
    }
    counts_.assign(num_cells() * static_cast<std::size_t>(n_ + 1), 0);

    // Single-qubit contributions: syndrome and class are linear in the error.
    struct Contribution {
      Syndrome syn;
      unsigned cls;
    };
    std::vector<std::array<Contribution, 4>> single(static_cast<std::size_t>(n_));
    for (int q = 0; q < n_; ++q) {
      for (unsigned d = 0; d < 4; ++d) {
        // d: 0 = I, 1 = X, 2 = Z, 3 = Y
        const std::uint64_t bit = std::uint64_t{1} << q;
        PauliString e(n_, (d == 1 || d == 3) ? bit : 0, (d == 2 || d == 3) ? bit : 0);
        single[static_cast<std::size_t>(q)][d] = {syndrome(e, code),
                                                  logical_class(e, code).index()};
      }
    }

    // Fix the first `split` qubits per task; tasks tally privately and are
    // merged with integer addition, so the census is worker-count independent.
    const int split = std::min(n_, 3);
    const std::size_t tasks = std::size_t{1} << (2 * split);
    std::vector<std::vector<std::uint64_t>> partial(tasks);
    parallel_for(
        tasks,
        [&](std::size_t task) {
          auto& local = partial[task];
          local.assign(counts_.size(), 0);
          Syndrome syn = 0;
          unsigned cls = 0;
          int errors = 0;
          for (int q = 0; q < split; ++q) {
            const unsigned d = (task >> (2 * q)) & 3u;
            syn ^= single[static_cast<std::size_t>(q)][d].syn;
            cls ^= single[static_cast<std::size_t>(q)][d].cls;
            errors += d != 0;
          }
          descend(single, split, syn, cls, errors, local);
        },
        workers);
    for (const auto& local : partial) {
      for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += local[i];
    }
  }

  int num_qubits() const { return n_; }
  int num_generators() const { return m_; }
  std::size_t num_cells() const { return (std::size_t{1} << m_) * 4; }

  std::uint64_t count(Syndrome s, unsigned cls, int errors) const {
    return counts_[(static_cast<std::size_t>(s) * 4 + cls) * static_cast<std::size_t>(n_ + 1) +
                   static_cast<std::size_t>(errors)];
  }

 private:
  template <typename Single>
  void descend(const Single& single, int q, Syndrome syn, unsigned cls, int errors,
               std::vector<std::uint64_t>& local) const {
    if (q == n_) {
      ++local[(static_cast<std::size_t>(syn) * 4 + cls) * static_cast<std::size_t>(n_ + 1) +
              static_cast<std::size_t>(errors)];
      return;
    }
    const auto& s = single[static_cast<std::size_t>(q)];
    for (unsigned d = 0; d < 4; ++d) {
      descend(single, q + 1, syn ^ s[d].syn, cls ^ s[d].cls, errors + (d != 0), local);
    }
  }

  int n_;
  int m_;
  std::vector<std::uint64_t> counts_;
};

/// Joint probability over (syndrome, logical class) for one channel.
class SyndromeTable {
 public:
  SyndromeTable(const PatternCensus& census, const DepolarizingChannel& channel)
      : m_(census.num_generators()), p_(channel.p()), entries_(census.num_cells(), 0.0) {
    const int n = census.num_qubits();
    const double w_id = channel.fidelity();
    const double w_err = channel.error_weight();
    // weight[e] = w_id^(n-e) * w_err^e
    std::vector<double> weight(static_cast<std::size_t>(n + 1));
    for (int e = 0; e <= n; ++e) {
      double w = 1.0;
      for (int i = 0; i < n - e; ++i) w *= w_id;
      for (int i = 0; i < e; ++i) w *= w_err;
      weight[static_cast<std::size_t>(e)] = w;
    }
    for (std::size_t cell = 0; cell < entries_.size(); ++cell) {
      double acc = 0.0;
      for (int e = 0; e <= n; ++e) {
        acc += static_cast<double>(census.count(cell / 4, static_cast<unsigned>(cell % 4), e)) *
               weight[static_cast<std::size_t>(e)];
      }
      entries_[cell] = acc;
    }
  }

  /// Table from explicit (syndrome, class) weights, e.g. sampled frequencies.
  SyndromeTable(int num_generators, double p, std::vector<double> entries)
      : m_(num_generators), p_(p), entries_(std::move(entries)) {
    if (num_generators < 0 || num_generators > 30 ||
        entries_.size() != (std::size_t{1} << num_generators) * 4) {
      throw std::invalid_argument("SyndromeTable: expected 2^m * 4 entries");
    }
  }

  int num_generators() const { return m_; }
  std::size_t num_syndromes() const { return std::size_t{1} << m_; }
  double p() const { return p_; }

  double at(Syndrome s, BellLabel cls) const {
    return entries_[static_cast<std::size_t>(s) * 4 + cls.index()];
  }
  std::span<const double, 4> row(Syndrome s) const {
    return std::span<const double, 4>(entries_.data() + static_cast<std::size_t>(s) * 4, 4);
  }
  double row_total(Syndrome s) const {
    auto r = row(s);
    return r[0] + r[1] + r[2] + r[3];
  }
  double total() const {
    double t = 0.0;
    for (double v : entries_) t += v;
    return t;
  }

  /// P(first k syndrome bits are all zero).
  double prefix_probability(int k) const {
    const Syndrome mask = k >= 64 ? ~Syndrome{0} : ((Syndrome{1} << k) - 1);
    double acc = 0.0;
    for (Syndrome s = 0; s < num_syndromes(); ++s) {
      if ((s & mask) == 0) acc += row_total(s);
    }
    return acc;
  }

 private:
  int m_;
  double p_;
  std::vector<double> entries_;
};

inline SyndromeTable enumerate_code(const StabilizerCode& code,
                                    const DepolarizingChannel& channel,
                                    int max_qubits = kDefaultEnumerationBudget) {
  return SyndromeTable(PatternCensus(code, max_qubits), channel);
}

/// p_i = P(s_1..s_i = 0) / P(s_1..s_{i-1} = 0); zero once the prefix
/// probability vanishes.
inline std::vector<double> conditional_pass_probs(const SyndromeTable& table, int k) {
  if (k < 0 || k > table.num_generators()) {
    throw std::invalid_argument("conditional_pass_probs: prefix out of range");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(k));
  double prev = table.prefix_probability(0);
  for (int i = 1; i <= k; ++i) {
    const double cur = table.prefix_probability(i);
    out.push_back(prev > 0.0 ? cur / prev : 0.0);
    prev = cur;
  }
  return out;
}

/// Expected channel uses per attempted block when aborting on the first -1
/// among the first k measurements:
///   E = sum_{i<=k} q_i * prod_{j<i} p_j * (1 - p_i) + n * prod_{j<=k} p_j
inline double expected_uses(std::span<const int> schedule, std::span<const double> pass_probs,
                            int k, int n) {
  if (k < 0 || static_cast<std::size_t>(k) > schedule.size() ||
      static_cast<std::size_t>(k) > pass_probs.size()) {
    throw std::invalid_argument("expected_uses: prefix longer than schedule");
  }
  int prev = 1;
  for (int q : schedule) {
    if (q < prev || q > n) {
      throw std::invalid_argument("expected_uses: schedule must be nondecreasing in [1, n]");
    }
    prev = q;
  }
  double e = 0.0;
  double survive = 1.0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
    e += schedule[i] * survive * (1.0 - pass_probs[i]);
    survive *= pass_probs[i];
  }
  return e + n * survive;
}

struct ResidualOutcome {
  Syndrome outcome = 0;      // syndrome bits after the prefix, shifted down
  double probability = 0.0;  // joint with passing the prefix
  BellDiagonal state;        // logical class distribution given the outcome
};

struct AdaptiveTrace {
  std::vector<double> pass_probs;
  std::vector<ResidualOutcome> outcomes;
  double expected_uses = 0.0;
  double success_prob = 0.0;

  /// Ebits per channel use: every residual class is hashed separately and
  /// classes with negative hashing yield are discarded.
  double yield() const {
    if (!(success_prob > 0.0) || !(expected_uses > 0.0)) return 0.0;
    double acc = 0.0;
    for (const auto& o : outcomes) acc += o.probability * hashing_yield(o.state);
    return acc / expected_uses;
  }
};

/// Evaluates the abort-on-prefix-k strategy from an enumerated table.
inline AdaptiveTrace adaptive_trace(const SyndromeTable& table, std::span<const int> schedule,
                                    int n, int k) {
  AdaptiveTrace trace;
  trace.pass_probs = conditional_pass_probs(table, k);
  trace.expected_uses = expected_uses(schedule, trace.pass_probs, k, n);
  trace.success_prob = 1.0;
  for (double v : trace.pass_probs) trace.success_prob *= v;
  if (!(trace.success_prob > 0.0)) return trace;
  // Dividing by the table total keeps outcome probabilities consistent with
  // the telescoped pass probabilities when the table is off 1 by rounding.
  const double table_total = table.total();
  const Syndrome mask = (Syndrome{1} << k) - 1;
  for (Syndrome s = 0; s < table.num_syndromes(); ++s) {
    if (s & mask) continue;
    const double total = table.row_total(s);
    if (!(total > 0.0)) continue;
    auto r = table.row(s);
    trace.outcomes.push_back({s >> k, total / table_total,
                              BellDiagonal::from_unnormalized({r[0], r[1], r[2], r[3]})});
  }
  return trace;
}

inline double adaptive_yield(const StabilizerCode& code, const DepolarizingChannel& channel,
                             int k) {
  const auto table = enumerate_code(code, channel);
  const auto schedule = uses_schedule(code);
  return adaptive_trace(table, schedule, code.n, k).yield();
}

struct Strategy {
  int prefix = 0;
  double yield = 0.0;
};

/// Yields within this relative distance are treated as equal; ties go to the
/// larger prefix.
inline constexpr double kStrategyTieTolerance = 1e-12;

/// Reuses one census across many channel parameters.
class AdaptiveEvaluator {
 public:
  explicit AdaptiveEvaluator(StabilizerCode code, int max_qubits = kDefaultEnumerationBudget)
      : code_(std::move(code)), census_(code_, max_qubits), schedule_(uses_schedule(code_)) {}

  const StabilizerCode& code() const { return code_; }
  const std::vector<int>& schedule() const { return schedule_; }

  SyndromeTable table(double p) const {
    return SyndromeTable(census_, DepolarizingChannel(p));
  }

  AdaptiveTrace trace(double p, int k) const {
    return adaptive_trace(table(p), schedule_, code_.n, k);
  }

  double yield(double p, int k) const { return trace(p, k).yield(); }

  Strategy best(double p, std::span<const int> prefixes) const {
    if (prefixes.empty()) throw std::invalid_argument("best_strategy: no candidate prefixes");
    const auto t = table(p);
    Strategy best{-1, -1.0};
    for (int k : prefixes) {
      if (k < 0 || k > code_.num_generators()) {
        throw std::invalid_argument("best_strategy: prefix out of range");
      }
      const double y = adaptive_trace(t, schedule_, code_.n, k).yield();
      const double scale = std::max(std::abs(y), std::abs(best.yield));
      const bool tie = std::abs(y - best.yield) <= kStrategyTieTolerance * scale;
      if (best.prefix < 0 || (tie ? k > best.prefix : y > best.yield)) best = {k, y};
    }
    return best;
  }

 private:
  StabilizerCode code_;
  PatternCensus census_;
  std::vector<int> schedule_;
};

inline Strategy best_strategy(const StabilizerCode& code, const DepolarizingChannel& channel,
                              std::span<const int> prefixes) {
  return AdaptiveEvaluator(code).best(channel.p(), prefixes);
}

/// n-bit Cat code via the closed-form recurrence on the state of the first
/// transmitted pair. `modified` swaps the Phi-/Psi- weights after every
/// measurement.
inline AdaptiveTrace cat_trace(int n, const DepolarizingChannel& channel, bool modified) {
  if (n < 2) throw std::invalid_argument("cat_trace: n must be at least 2");
  const double f = channel.fidelity();
  const double g = channel.error_weight();
  AdaptiveTrace trace;
  BellDiagonal m = werner_from_fidelity(f);
  double survive = 1.0;
  for (int i = 1; i < n; ++i) {
    const auto& w = m.weights();
    const BellDiagonal::Weights next{f * w[0] + g * w[2], g * w[1] + g * w[3],
                                     g * w[0] + f * w[2], g * w[1] + g * w[3]};
    const double pass = next[0] + next[1] + next[2] + next[3];
    trace.pass_probs.push_back(pass);
    survive *= pass;
    if (!(pass > 0.0)) break;
    m = BellDiagonal::from_unnormalized(next);
    if (modified) m = modified_swap(m);
  }
  trace.pass_probs.resize(static_cast<std::size_t>(n - 1), 0.0);
  std::vector<int> schedule;
  for (int q = 2; q <= n; ++q) schedule.push_back(q);
  trace.expected_uses = expected_uses(schedule, trace.pass_probs, n - 1, n);
  trace.success_prob = survive;
  if (survive > 0.0) trace.outcomes.push_back({0, survive, m});
  return trace;
}

inline double cat_yield(int n, const DepolarizingChannel& channel, bool modified) {
  return cat_trace(n, channel, modified).yield();
}

class NoThreshold : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Threshold {
  double p = 0.0;
  double fidelity = 0.0;
};

/// Locates where a yield curve turns positive: a coarse scan finds the last
/// zero followed by a positive value, then bisection narrows the bracket to
/// `tol`.
inline Threshold find_threshold(const std::function<double(double)>& yield, double p_lo,
                                double p_hi, double tol = 1e-5, double scan_step = 1e-3) {
  if (!(p_lo < p_hi) || !(tol > 0.0) || !(scan_step > 0.0)) {
    throw std::invalid_argument("find_threshold: invalid bracket or tolerance");
  }
  if (yield(p_lo) > 0.0 || !(yield(p_hi) > 0.0)) {
    throw NoThreshold("no threshold in range [" + std::to_string(p_lo) + ", " +
                      std::to_string(p_hi) + "]");
  }
  const auto steps = static_cast<long>(std::ceil((p_hi - p_lo) / scan_step));
  auto grid = [&](long i) { return std::min(p_hi, p_lo + static_cast<double>(i) * scan_step); };
  long last_zero = 0;
  for (long i = 1; i < steps; ++i) {
    if (!(yield(grid(i)) > 0.0)) last_zero = i;
  }
  double lo = grid(last_zero);
  double hi = grid(last_zero + 1);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (yield(mid) > 0.0 ? hi : lo) = mid;
  }
  const double p = 0.5 * (lo + hi);
  return {p, fidelity_from_p(p)};
}

}  // namespace ebcap
