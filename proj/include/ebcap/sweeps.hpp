#pragma once

// Grid sweeps shared by the command-line tool and the acceptance suite. Every
// curve is evaluated point by point in a worker pool and assembled in grid
// order.

#include <charconv>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ebcap/aqecc.hpp"
#include "ebcap/capacity.hpp"
#include "ebcap/curve_io.hpp"
#include "ebcap/epp.hpp"
#include "ebcap/parallel.hpp"

namespace ebcap {

inline std::string grid_string(const Grid& g) {
  return format_number(g.start) + ":" + format_number(g.stop) + ":" + format_number(g.step);
}

template <typename Fn>
YieldCurve sweep(std::string method, const Grid& grid, Fn&& yield_at) {
  const auto ps = grid.points();
  const auto ys = parallel_map<double>(ps.size(), [&](std::size_t i) { return yield_at(ps[i]); });
  YieldCurve c;
  c.method = std::move(method);
  c.metadata["grid"] = grid_string(grid);
  for (std::size_t i = 0; i < ps.size(); ++i) c.points.push_back({ps[i], ys[i], {}});
  return c;
}

inline std::string cat_method(int n, bool modified) {
  return (modified ? "modcat" : "cat") + std::to_string(n);
}

inline YieldCurve cat_curve(int n, bool modified, const Grid& grid) {
  if (n < 2) throw std::invalid_argument("cat: n must be at least 2");
  auto c = sweep(cat_method(n, modified), grid,
                 [&](double p) { return cat_yield(n, DepolarizingChannel(p), modified); });
  c.metadata["n"] = std::to_string(n);
  c.metadata["variant"] = modified ? "modified" : "plain";
  return c;
}

// ---------------------------------------------------------------------------
// Adaptive strategies

/// nullopt selects the best prefix in the candidate set.
struct StrategyChoice {
  std::optional<int> prefix;
};

inline StrategyChoice parse_strategy(const std::string& text) {
  if (text == "auto") return {};
  if (text.rfind("prefix=", 0) == 0) {
    const auto k = text.substr(7);
    int v = 0;
    const auto res = std::from_chars(k.data(), k.data() + k.size(), v);
    if (res.ec == std::errc{} && res.ptr == k.data() + k.size()) return {v};
  }
  throw std::invalid_argument("strategy must be 'auto' or 'prefix=K', got '" + text + "'");
}

inline const std::vector<int>& shor_candidates() {
  static const std::vector<int> k{4, 7, 8};
  return k;
}

/// `auto` records the winning prefix on every point.
inline YieldCurve strategy_curve(const AdaptiveEvaluator& ev, StrategyChoice choice,
                                 const std::vector<int>& candidates, const Grid& grid) {
  const auto& name = ev.code().name;
  const int m = ev.code().num_generators();
  if (choice.prefix && (*choice.prefix < 0 || *choice.prefix > m)) {
    throw std::invalid_argument("prefix must lie in 0.." + std::to_string(m) + " for " + name);
  }
  const auto ps = grid.points();
  const auto pts = parallel_map<CurvePoint>(ps.size(), [&](std::size_t i) {
    if (choice.prefix) return CurvePoint{ps[i], ev.yield(ps[i], *choice.prefix), {}};
    const auto s = ev.best(ps[i], candidates);
    return CurvePoint{ps[i], s.yield, name + ":k=" + std::to_string(s.prefix)};
  });
  YieldCurve c;
  c.method = name + (choice.prefix ? ":k=" + std::to_string(*choice.prefix) : ":auto");
  c.metadata["grid"] = grid_string(grid);
  c.metadata["code"] = name;
  if (!choice.prefix) {
    std::string ks;
    for (int k : candidates) ks += (ks.empty() ? "" : ",") + std::to_string(k);
    c.metadata["candidates"] = ks;
  }
  c.points = pts;
  return c;
}

inline std::vector<int> all_prefixes(const StabilizerCode& code) {
  std::vector<int> k(static_cast<std::size_t>(code.num_generators() + 1));
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = static_cast<int>(i);
  return k;
}

struct StrategySwitch {
  int from = 0;
  int to = 0;
  double p = 0.0;
};

/// Points where the argmax prefix changes, refined by bisection between
/// neighbouring grid points to within `tol`. A change caused only by the
/// tie rule (the previous winner still ties) is not a region boundary.
inline std::vector<StrategySwitch> strategy_switches(const AdaptiveEvaluator& ev,
                                                     const std::vector<int>& candidates,
                                                     const Grid& grid, double tol = 1e-7) {
  const auto ps = grid.points();
  const auto best = parallel_map<int>(
      ps.size(), [&](std::size_t i) { return ev.best(ps[i], candidates).prefix; });
  std::vector<StrategySwitch> out;
  for (std::size_t i = 1; i < ps.size(); ++i) {
    if (best[i] == best[i - 1]) continue;
    const double prev = ev.yield(ps[i], best[i - 1]);
    const double cur = ev.yield(ps[i], best[i]);
    if (std::abs(cur - prev) <= kStrategyTieTolerance * std::max(std::abs(cur), std::abs(prev))) {
      continue;
    }
    double lo = ps[i - 1];
    double hi = ps[i];
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      (ev.best(mid, candidates).prefix == best[i - 1] ? lo : hi) = mid;
    }
    out.push_back({best[i - 1], best[i], 0.5 * (lo + hi)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Two-way protocols

inline YieldCurve recurrence_curve(int max_rounds, const Grid& grid) {
  if (max_rounds < 1) throw std::invalid_argument("recurrence: rounds must be at least 1");
  const auto ps = grid.points();
  const auto pts = parallel_map<CurvePoint>(ps.size(), [&](std::size_t i) {
    const auto r = best_recurrence_rounds(DepolarizingChannel(ps[i]), max_rounds);
    return CurvePoint{ps[i], r.yield, "recurrence:rounds=" + std::to_string(r.rounds)};
  });
  YieldCurve c;
  c.method = "recurrence";
  c.metadata["grid"] = grid_string(grid);
  c.metadata["max_rounds"] = std::to_string(max_rounds);
  c.points = pts;
  return c;
}

inline YieldCurve leung_shor_curve(const Grid& grid, const GateNetwork& net = leung_shor_network()) {
  if (auto err = validate_network(net)) throw std::invalid_argument("network: " + *err);
  auto c = sweep("leung-shor", grid,
                 [&](double p) { return leung_shor_yield(DepolarizingChannel(p), net); });
  c.metadata["network"] = net.name;
  return c;
}

// ---------------------------------------------------------------------------
// Bounds

inline constexpr int kBuiltinCatMax = 8;
inline constexpr int kBuiltinRounds = 5;

/// Best curve per family, Leung-Shor first so envelope ties go to it.
inline std::vector<YieldCurve> builtin_family_curves(const Grid& grid) {
  std::vector<YieldCurve> cats;
  for (int n = 2; n <= kBuiltinCatMax; ++n) {
    cats.push_back(cat_curve(n, false, grid));
    cats.push_back(cat_curve(n, true, grid));
  }
  auto cat_best = envelope(cats);
  cat_best.method = "cat-best";
  cat_best.metadata["grid"] = grid_string(grid);
  const AdaptiveEvaluator shor(builtin_shor9());
  return {leung_shor_curve(grid), recurrence_curve(kBuiltinRounds, grid),
          strategy_curve(shor, {}, shor_candidates(), grid), std::move(cat_best)};
}

inline YieldCurve builtin_envelope(const Grid& grid) {
  auto env = envelope(builtin_family_curves(grid));
  env.metadata["grid"] = grid_string(grid);
  return env;
}

// ---------------------------------------------------------------------------
// Thresholds

struct ThresholdRow {
  int n = 0;  // 1 is the hashing-only entry
  std::string variant;
  std::optional<Threshold> threshold;
};

inline constexpr double kThresholdTolerance = 1e-8;

inline double werner_hashing_yield(double p) {
  return hashing_yield(werner_from_fidelity(fidelity_from_p(p)));
}

inline std::vector<ThresholdRow> cat_thresholds(const std::vector<int>& ns) {
  struct Job {
    int n;
    bool modified;
  };
  std::vector<Job> jobs;
  for (int n : ns) {
    if (n < 1) throw std::invalid_argument("threshold: n must be at least 1");
    if (n == 1) {
      jobs.push_back({1, false});
    } else {
      jobs.push_back({n, false});
      jobs.push_back({n, true});
    }
  }
  return parallel_map<ThresholdRow>(jobs.size(), [&](std::size_t i) {
    const auto [n, modified] = jobs[i];
    ThresholdRow row{n, n == 1 ? "hashing" : (modified ? "modified" : "plain"), std::nullopt};
    std::function<double(double)> fn = [n = n, modified = modified](double p) {
      return n == 1 ? werner_hashing_yield(p) : cat_yield(n, DepolarizingChannel(p), modified);
    };
    try {
      row.threshold = find_threshold(fn, 0.0, 1.0, kThresholdTolerance);
    } catch (const NoThreshold&) {
    }
    return row;
  });
}

inline std::string thresholds_csv(const std::vector<ThresholdRow>& rows) {
  std::string out = "n,variant,p,F\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + "," + r.variant + ",";
    out += r.threshold ? format_number(r.threshold->p) + "," + format_number(r.threshold->fidelity)
                       : std::string("absent,absent");
    out += '\n';
  }
  return out;
}

inline nlohmann::ordered_json thresholds_json(const std::vector<ThresholdRow>& rows) {
  nlohmann::ordered_json doc;
  doc["schema"] = "ebcap.thresholds/1";
  auto& arr = doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["n"] = r.n;
    j["variant"] = r.variant;
    if (r.threshold) {
      j["p"] = r.threshold->p;
      j["F"] = r.threshold->fidelity;
    } else {
      j["p"] = nullptr;
      j["F"] = nullptr;
    }
    arr.push_back(std::move(j));
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Figure data

struct FigureFile {
  std::string name;
  std::string contents;
};

inline std::vector<int> figure_threshold_ns() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}; }

/// One CSV per figure, in a fixed order with fixed filenames.
inline std::vector<FigureFile> figure_files(const Grid& grid) {
  std::vector<FigureFile> out;
  std::vector<YieldCurve> fig4;
  for (int n : {3, 4, 5}) {
    fig4.push_back(cat_curve(n, false, grid));
    fig4.push_back(cat_curve(n, true, grid));
  }
  out.push_back({"fig4_cat.csv", to_csv(fig4)});
  out.push_back({"fig5_cat4_vs_modcat4.csv", to_csv({fig4[2], fig4[3]})});

  const AdaptiveEvaluator shor(builtin_shor9());
  out.push_back({"fig6_shor9.csv",
                 to_csv({strategy_curve(shor, {}, shor_candidates(), grid), cat_curve(9, false, grid)})});

  const auto families = builtin_family_curves(grid);
  out.push_back({"fig7_recurrence.csv", to_csv({families[1]})});
  out.push_back({"fig8a_leung_shor.csv", to_csv({families[0]})});

  auto eb = families;
  eb.push_back(envelope(families));
  out.push_back({"fig8_eb_bounds.csv", to_csv(eb)});
  std::vector<YieldCurve> qb;
  for (const auto& c : eb) qb.push_back(qb_curve(c));
  out.push_back({"qb_bounds.csv", to_csv(qb)});

  out.push_back({"fig9_cat_threshold.csv", thresholds_csv(cat_thresholds(figure_threshold_ns()))});
  return out;
}

}  // namespace ebcap
