#pragma once

// Independent checks for the analytic engines.
//
// statevector_bxor_table() derives the bilateral-XOR action from explicit
// four-qubit amplitude vectors and must not use bell.hpp. The Monte Carlo
// samplers draw from std::mt19937_64 seeded through std::seed_seq with
// (seed low word, seed high word, stream index); both are fully specified by
// the standard, so a fixed seed reproduces the same report on any platform.
// Trials are split into kMcStreams fixed chunks, one stream each, and merged
// as integer counts, so reports do not depend on the worker count.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ebcap/aqecc.hpp"
#include "ebcap/epp.hpp"
#include "ebcap/parallel.hpp"
#include "ebcap/pauli.hpp"

namespace ebcap::oracle {

// ---------------------------------------------------------------------------
// State-vector bilateral XOR

/// Labels in the table use 2*phase + amplitude:
/// 0 = Phi+, 1 = Psi+, 2 = Phi-, 3 = Psi-.
struct LabelPair {
  int source = 0;
  int target = 0;
  friend bool operator==(const LabelPair&, const LabelPair&) = default;
};

using BxorTable = std::array<LabelPair, 16>;  // index 4*source + target

namespace detail {

// Two-qubit Bell vectors scaled by sqrt(2), basis order |ab> = 2a + b.
inline std::array<int, 4> bell_vector(int label) {
  switch (label) {
    case 0: return {1, 0, 0, 1};    // |00> + |11>
    case 1: return {0, 1, 1, 0};    // |01> + |10>
    case 2: return {1, 0, 0, -1};   // |00> - |11>
    case 3: return {0, 1, -1, 0};   // |01> - |10>
    default: throw std::logic_error("bell_vector: bad label");
  }
}

// Qubit order in the 16-dim index: A1 (bit 3), B1 (bit 2), A2 (bit 1), B2 (bit 0).
// Amplitudes are scaled by 2 so everything stays in integers.
inline std::array<int, 16> pair_product(int first, int second) {
  const auto u = bell_vector(first);
  const auto v = bell_vector(second);
  std::array<int, 16> out{};
  for (int a1 = 0; a1 < 2; ++a1)
    for (int b1 = 0; b1 < 2; ++b1)
      for (int a2 = 0; a2 < 2; ++a2)
        for (int b2 = 0; b2 < 2; ++b2)
          out[(a1 << 3) | (b1 << 2) | (a2 << 1) | b2] = u[2 * a1 + b1] * v[2 * a2 + b2];
  return out;
}

inline std::array<int, 16> cnot(const std::array<int, 16>& in, int control_bit, int target_bit) {
  std::array<int, 16> out{};
  for (int i = 0; i < 16; ++i) {
    const int j = ((i >> control_bit) & 1) ? (i ^ (1 << target_bit)) : i;
    out[j] = in[i];
  }
  return out;
}

}  // namespace detail

inline BxorTable statevector_bxor_table() {
  BxorTable table{};
  for (int s = 0; s < 4; ++s) {
    for (int t = 0; t < 4; ++t) {
      // Alice: A1 controls A2. Bob: B1 controls B2.
      auto psi = detail::cnot(detail::cnot(detail::pair_product(s, t), 3, 1), 2, 0);
      int matches = 0;
      LabelPair found;
      for (int s2 = 0; s2 < 4; ++s2) {
        for (int t2 = 0; t2 < 4; ++t2) {
          const auto phi = detail::pair_product(s2, t2);
          int ip = 0;
          for (int i = 0; i < 16; ++i) ip += phi[i] * psi[i];
          if (ip == 4 || ip == -4) {  // |<phi|psi>| = 1 after unscaling by 4
            ++matches;
            found = {s2, t2};
          } else if (ip != 0) {
            throw std::logic_error("statevector_bxor_table: output is not a Bell product");
          }
        }
      }
      if (matches != 1) throw std::logic_error("statevector_bxor_table: ambiguous identification");
      table[static_cast<std::size_t>(4 * s + t)] = found;
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Monte Carlo

inline constexpr std::size_t kMcStreams = 64;
inline constexpr double kMinExpectedCount = 5.0;
inline constexpr double kDefaultSigmaGate = 4.0;

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

struct McCell {
  std::string label;
  std::uint64_t count = 0;
  std::uint64_t trials = 0;  // denominator of the empirical frequency
  double empirical = 0.0;
  double analytic = 0.0;
  double std_error = 0.0;  // binomial, from the analytic frequency
  double sigma = 0.0;      // |empirical - analytic| / std_error
};

struct McReport {
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<McCell> cells;
  double max_sigma_deviation = 0.0;

  bool within(double gate = kDefaultSigmaGate) const { return max_sigma_deviation <= gate; }
};

inline McCell make_cell(std::string label, std::uint64_t count, std::uint64_t trials,
                        double analytic) {
  McCell c;
  c.label = std::move(label);
  c.count = count;
  c.trials = trials;
  c.analytic = analytic;
  c.empirical = trials ? static_cast<double>(count) / static_cast<double>(trials) : 0.0;
  const double var = analytic * (1.0 - analytic);
  c.std_error = trials ? std::sqrt(std::max(var, 0.0) / static_cast<double>(trials)) : 0.0;
  const double diff = std::abs(c.empirical - analytic);
  if (c.std_error > 0.0) {
    c.sigma = diff / c.std_error;
  } else {
    c.sigma = diff <= 1e-15 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return c;
}

/// Compares categorical counts to analytic frequencies. Cells expected to
/// receive fewer than kMinExpectedCount hits are pooled into one cell so the
/// normal approximation behind the sigma gate stays valid.
inline void add_categorical(McReport& report, const std::vector<std::string>& labels,
                            const std::vector<std::uint64_t>& counts,
                            const std::vector<double>& analytic, std::uint64_t trials) {
  std::uint64_t rare_count = 0;
  double rare_prob = 0.0;
  bool any_rare = false;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (analytic[i] * static_cast<double>(trials) < kMinExpectedCount) {
      rare_count += counts[i];
      rare_prob += analytic[i];
      any_rare = true;
      continue;
    }
    report.cells.push_back(make_cell(labels[i], counts[i], trials, analytic[i]));
  }
  if (any_rare) {
    report.cells.push_back(make_cell("(pooled rare cells)", rare_count, trials,
                                     std::min(1.0, rare_prob)));
  }
}

inline void finish(McReport& report) {
  report.max_sigma_deviation = 0.0;
  for (const auto& c : report.cells) {
    report.max_sigma_deviation = std::max(report.max_sigma_deviation, c.sigma);
  }
}

inline std::uint64_t chunk_trials(std::uint64_t trials, std::size_t chunk) {
  return trials / kMcStreams + (chunk < trials % kMcStreams ? 1 : 0);
}

/// Samples i.i.d. depolarizing error patterns and tallies
/// (syndrome, class) counts; index = 4 * syndrome + class.
inline std::vector<std::uint64_t> sample_code_counts(const StabilizerCode& code,
                                                     const DepolarizingChannel& channel,
                                                     std::uint64_t trials, std::uint64_t seed,
                                                     unsigned workers = default_workers()) {
  if (auto diag = validate_code(code)) {
    throw std::invalid_argument("sample_code_counts: invalid code: " + *diag);
  }
  if (code.num_generators() > 24) {
    throw std::invalid_argument("sample_code_counts: at most 24 generators");
  }
  const std::size_t cells = (std::size_t{1} << code.num_generators()) * 4;
  const int n = code.n;
  std::vector<std::array<std::pair<Syndrome, unsigned>, 4>> single(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) {
    const std::uint64_t bit = std::uint64_t{1} << q;
    // d: 0 = I, 1 = X, 2 = Z, 3 = Y
    for (unsigned d = 0; d < 4; ++d) {
      PauliString e(n, (d == 1 || d == 3) ? bit : 0, (d == 2 || d == 3) ? bit : 0);
      single[static_cast<std::size_t>(q)][d] = {syndrome(e, code), logical_class(e, code).index()};
    }
  }
  const double w_id = channel.fidelity();
  const double w_err = channel.error_weight();
  std::vector<std::vector<std::uint64_t>> partial(kMcStreams);
  parallel_for(
      kMcStreams,
      [&](std::size_t chunk) {
        auto eng = make_stream(seed, chunk);
        auto& local = partial[chunk];
        local.assign(cells, 0);
        const std::uint64_t count = chunk_trials(trials, chunk);
        for (std::uint64_t t = 0; t < count; ++t) {
          Syndrome syn = 0;
          unsigned cls = 0;
          for (int q = 0; q < n; ++q) {
            const double u = uniform01(eng);
            unsigned d = 0;
            if (u >= w_id) d = u < w_id + w_err ? 1u : (u < w_id + 2.0 * w_err ? 2u : 3u);
            syn ^= single[static_cast<std::size_t>(q)][d].first;
            cls ^= single[static_cast<std::size_t>(q)][d].second;
          }
          ++local[static_cast<std::size_t>(syn) * 4 + cls];
        }
      },
      workers);
  std::vector<std::uint64_t> counts(cells, 0);
  for (const auto& local : partial) {
    for (std::size_t i = 0; i < cells; ++i) counts[i] += local[i];
  }
  return counts;
}

/// Empirical SyndromeTable from sampled counts; the Monte Carlo route for
/// codes beyond the enumeration budget.
inline SyndromeTable sampled_table(const StabilizerCode& code, const DepolarizingChannel& channel,
                                   std::uint64_t trials, std::uint64_t seed,
                                   unsigned workers = default_workers()) {
  const auto counts = sample_code_counts(code, channel, trials, seed, workers);
  std::vector<double> freq(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    freq[i] = static_cast<double>(counts[i]) / static_cast<double>(trials);
  }
  return SyndromeTable(code.num_generators(), channel.p(), std::move(freq));
}

inline std::string syndrome_label(Syndrome s, int bits, unsigned cls) {
  std::string out(static_cast<std::size_t>(bits), '0');
  for (int i = 0; i < bits; ++i) {
    if ((s >> i) & 1u) out[static_cast<std::size_t>(i)] = '1';
  }
  return out + "/" + to_string(BellLabel::from_index(cls));
}

/// Sampled (syndrome, class) frequencies against the enumerated table.
inline McReport mc_sample_code(const StabilizerCode& code, const DepolarizingChannel& channel,
                               std::uint64_t trials, std::uint64_t seed,
                               unsigned workers = default_workers()) {
  if (trials < 1) throw std::invalid_argument("mc_sample_code: trials must be >= 1");
  const auto table = enumerate_code(code, channel);
  const auto counts = sample_code_counts(code, channel, trials, seed, workers);
  std::vector<std::string> labels;
  std::vector<double> analytic;
  const int m = code.num_generators();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    labels.push_back(syndrome_label(i / 4, m, static_cast<unsigned>(i % 4)));
    analytic.push_back(table.at(i / 4, BellLabel::from_index(static_cast<unsigned>(i % 4))));
  }
  McReport report;
  report.trials = trials;
  report.seed = seed;
  add_categorical(report, labels, counts, analytic, trials);
  finish(report);
  return report;
}

/// Samples label strings, pushes them through the gates and applies the
/// measurement rules. Reports the pass rate and the kept-pair distribution
/// conditional on passing.
inline McReport mc_sample_network(const PairEnsembleDistribution& dist, const GateNetwork& net,
                                  std::uint64_t trials, std::uint64_t seed,
                                  unsigned workers = default_workers()) {
  if (trials < 1) throw std::invalid_argument("mc_sample_network: trials must be >= 1");
  const auto analytic = apply_network(dist, net);
  const auto& p = dist.probabilities();
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) cdf[i] = (acc += p[i]);
  const std::size_t kept_cells = PairEnsembleDistribution::size_for(static_cast<int>(net.kept.size()));

  struct Tally {
    std::uint64_t passed = 0;
    std::vector<std::uint64_t> kept;
  };
  std::vector<Tally> partial(kMcStreams);
  parallel_for(
      kMcStreams,
      [&](std::size_t chunk) {
        auto eng = make_stream(seed, chunk);
        auto& local = partial[chunk];
        local.kept.assign(kept_cells, 0);
        const std::uint64_t count = chunk_trials(trials, chunk);
        for (std::uint64_t t = 0; t < count; ++t) {
          const double u = uniform01(eng) * acc;
          auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
          if (it == cdf.end()) --it;
          const auto s = static_cast<std::uint32_t>(it - cdf.begin());
          const std::uint32_t out = apply_gates(s, net.gates);
          if (!passes_measurements(out, net)) continue;
          ++local.passed;
          ++local.kept[kept_index(out, net)];
        }
      },
      workers);
  std::uint64_t passed = 0;
  std::vector<std::uint64_t> kept(kept_cells, 0);
  for (const auto& t : partial) {
    passed += t.passed;
    for (std::size_t i = 0; i < kept_cells; ++i) kept[i] += t.kept[i];
  }

  McReport report;
  report.trials = trials;
  report.seed = seed;
  report.cells.push_back(make_cell("p_pass", passed, trials, analytic.p_pass));
  if (analytic.post && passed > 0) {
    std::vector<std::string> labels;
    std::vector<double> q;
    for (std::size_t i = 0; i < kept_cells; ++i) {
      std::string label = "kept";
      for (std::size_t j = 0; j < net.kept.size(); ++j) {
        label += ":" + to_string(BellLabel::from_index(static_cast<unsigned>((i >> (2 * j)) & 3u)));
      }
      labels.push_back(label);
      q.push_back((*analytic.post)[i]);
    }
    add_categorical(report, labels, kept, q, passed);
  }
  finish(report);
  return report;
}

}  // namespace ebcap::oracle
