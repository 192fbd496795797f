#pragma once

// Capacity formulas for the depolarizing channel and yield-curve assembly.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ebcap/bell.hpp"

namespace ebcap {

/// C(E_p) = 1 - H((1+p)/2, (1-p)/2).
inline double classical_capacity_depolarizing(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("classical_capacity_depolarizing: p outside [0,1]");
  }
  const std::array<double, 2> d{(1.0 + p) / 2.0, (1.0 - p) / 2.0};
  return std::max(0.0, 1.0 - shannon_entropy(d));
}

/// Quantum capacity with feedback from an ebit rate and the classical
/// capacity: teleporting M qubits costs M/C extra channel uses, giving
/// C / (1 + C/eb). Zero when either argument is zero.
inline double qb_lower_bound(double eb, double capacity) {
  if (eb < 0.0 || capacity < 0.0) {
    throw std::invalid_argument("qb_lower_bound: negative argument");
  }
  if (eb == 0.0 || capacity == 0.0) return 0.0;
  return capacity / (1.0 + capacity / eb);
}

/// Inclusive grid start:stop:step. The last point is included when it lies
/// within step/2 of stop.
struct Grid {
  double start = 0.25;
  double stop = 1.0;
  double step = 0.0025;

  std::vector<double> points() const {
    if (!(step > 0.0)) throw std::invalid_argument("Grid: step must be positive");
    if (!(start >= 0.0 && stop <= 1.0 && start <= stop)) {
      throw std::invalid_argument("Grid: need 0 <= start <= stop <= 1");
    }
    const auto count = static_cast<long>(std::floor((stop - start) / step + 0.5)) + 1;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
      // Round away accumulated binary noise so grids compare exactly.
      double p = std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12;
      out.push_back(std::clamp(p, 0.0, 1.0));
    }
    return out;
  }
};

struct CurvePoint {
  double p = 0.0;
  double yield = 0.0;
  std::string winner;  // set by envelope()
};

struct YieldCurve {
  std::string method;
  std::map<std::string, std::string> metadata;
  std::vector<CurvePoint> points;

  double at(double p) const {
    for (const auto& pt : points) {
      if (std::abs(pt.p - p) <= 1e-12) return pt.yield;
    }
    throw std::out_of_range("YieldCurve: p not on grid");
  }
};

inline void check_curve(const YieldCurve& c) {
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    const auto& pt = c.points[i];
    if (i > 0 && !(pt.p > c.points[i - 1].p)) {
      throw std::invalid_argument("YieldCurve '" + c.method + "': p not strictly increasing");
    }
    if (!(pt.yield >= 0.0 && pt.yield <= 1.0)) {
      throw std::invalid_argument("YieldCurve '" + c.method + "': yield outside [0,1]");
    }
  }
}

/// Points on grids that agree within this distance are the same point.
inline constexpr double kGridTolerance = 1e-9;

inline YieldCurve qb_curve(const YieldCurve& eb) {
  YieldCurve out;
  out.method = "qb:" + eb.method;
  out.metadata = eb.metadata;
  out.points.reserve(eb.points.size());
  for (const auto& pt : eb.points) {
    out.points.push_back(
        {pt.p, qb_lower_bound(pt.yield, classical_capacity_depolarizing(pt.p)), pt.winner});
  }
  return out;
}

/// Pointwise maximum over curves sharing a grid. Each point records the
/// method that attains it; on ties the earlier curve keeps the point.
inline YieldCurve envelope(const std::vector<YieldCurve>& curves) {
  if (curves.empty()) throw std::invalid_argument("envelope: no curves");
  const auto& base = curves.front();
  for (const auto& c : curves) {
    if (c.points.size() != base.points.size()) {
      throw std::invalid_argument("envelope: grid mismatch (size)");
    }
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      if (std::abs(c.points[i].p - base.points[i].p) > kGridTolerance) {
        throw std::invalid_argument("envelope: grid mismatch at index " + std::to_string(i));
      }
    }
  }
  YieldCurve out;
  out.method = "envelope";
  for (std::size_t i = 0; i < base.points.size(); ++i) {
    CurvePoint best{base.points[i].p, -1.0, {}};
    for (const auto& c : curves) {
      const auto& pt = c.points[i];
      if (pt.yield > best.yield) {
        best.yield = pt.yield;
        best.winner = pt.winner.empty() ? c.method : pt.winner;
      }
    }
    out.points.push_back(best);
  }
  std::string sources;
  for (const auto& c : curves) sources += (sources.empty() ? "" : ",") + c.method;
  out.metadata["sources"] = sources;
  return out;
}

}  // namespace ebcap
