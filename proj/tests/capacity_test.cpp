#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <random>

#include "ebcap/capacity.hpp"

namespace ebcap {
namespace {

YieldCurve make_curve(const std::string& method, const std::vector<double>& ps,
                      const std::function<double(double)>& f) {
  YieldCurve c;
  c.method = method;
  for (double p : ps) c.points.push_back({p, f(p), {}});
  return c;
}

TEST(ClassicalCapacity, Examples) {
  EXPECT_DOUBLE_EQ(classical_capacity_depolarizing(1.0), 1.0);
  EXPECT_DOUBLE_EQ(classical_capacity_depolarizing(0.0), 0.0);
  EXPECT_NEAR(classical_capacity_depolarizing(0.5), 0.188722, 1e-5);
  EXPECT_THROW(classical_capacity_depolarizing(1.01), std::invalid_argument);
}

TEST(ClassicalCapacity, StrictlyIncreasing) {
  double prev = classical_capacity_depolarizing(0.0);
  for (int i = 1; i <= 1000; ++i) {
    const double c = classical_capacity_depolarizing(i / 1000.0);
    EXPECT_GT(c, prev) << i;
    prev = c;
  }
}

TEST(QbBound, Examples) {
  EXPECT_DOUBLE_EQ(qb_lower_bound(0.4, 0.4), 0.2);
  EXPECT_EQ(qb_lower_bound(0.0, 0.7), 0.0);
  EXPECT_EQ(qb_lower_bound(0.7, 0.0), 0.0);
  EXPECT_NEAR(qb_lower_bound(0.3, 0.5), 0.1875, 1e-15);
  EXPECT_THROW(qb_lower_bound(-0.1, 0.5), std::invalid_argument);
}

TEST(QbBound, MonotoneAndBelowBothArguments) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const double eb = u(rng);
    const double c = u(rng);
    const double b = qb_lower_bound(eb, c);
    EXPECT_LT(b, std::min(eb, c));
    EXPECT_GE(qb_lower_bound(eb + 0.01, c), b);
    EXPECT_GE(qb_lower_bound(eb, c + 0.01), b);
  }
}

TEST(Grid, DefaultAndEndpoints) {
  const auto pts = Grid{}.points();
  ASSERT_EQ(pts.size(), 301u);
  EXPECT_EQ(pts.front(), 0.25);
  EXPECT_EQ(pts.back(), 1.0);
  EXPECT_EQ(pts[4], 0.26);
  EXPECT_EQ((Grid{0.9, 1.0, 0.01}.points().size()), 11u);
  EXPECT_THROW((Grid{0.5, 0.4, 0.01}.points()), std::invalid_argument);
  EXPECT_THROW((Grid{0.0, 1.0, 0.0}.points()), std::invalid_argument);
}

TEST(QbCurve, Examples) {
  const auto ps = Grid{0.5, 1.0, 0.05}.points();
  const auto zero = qb_curve(make_curve("zero", ps, [](double) { return 0.0; }));
  for (const auto& pt : zero.points) EXPECT_EQ(pt.yield, 0.0);

  auto ls = make_curve("ls", ps, [](double p) { return p == 1.0 ? 0.5 : 0.2 * p; });
  ls.metadata["net"] = "leung-shor";
  const auto qb = qb_curve(ls);
  EXPECT_NEAR(qb.at(1.0), 1.0 / 3, 1e-15);
  EXPECT_EQ(qb.metadata.at("net"), "leung-shor");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    EXPECT_LT(qb.points[i].yield,
              std::min(ls.points[i].yield, classical_capacity_depolarizing(ps[i])));
  }
}

TEST(Envelope, Examples) {
  const auto ps = Grid{0.5, 1.0, 0.1}.points();
  const auto a = make_curve("a", ps, [](double p) { return p / 3; });
  const auto z = make_curve("z", ps, [](double) { return 0.0; });
  const auto single = envelope({a});
  for (std::size_t i = 0; i < ps.size(); ++i) EXPECT_EQ(single.points[i].yield, a.points[i].yield);
  const auto with_zero = envelope({z, a});
  for (std::size_t i = 0; i < ps.size(); ++i) {
    EXPECT_EQ(with_zero.points[i].yield, a.points[i].yield);
    if (ps[i] > 0.0) {
      EXPECT_EQ(with_zero.points[i].winner, "a");
    }
  }
}

TEST(Envelope, IdempotentAndOrderInvariant) {
  const auto ps = Grid{0.25, 1.0, 0.01}.points();
  const auto a = make_curve("a", ps, [](double p) { return std::max(0.0, p - 0.6); });
  const auto b = make_curve("b", ps, [](double p) { return 0.3 * p * p; });
  const auto c = make_curve("c", ps, [](double p) { return p > 0.8 ? 0.1 : 0.0; });
  const auto abc = envelope({a, b, c});
  const auto cba = envelope({c, b, a});
  const auto again = envelope({abc, abc});
  for (std::size_t i = 0; i < ps.size(); ++i) {
    EXPECT_EQ(abc.points[i].yield, cba.points[i].yield);
    EXPECT_EQ(again.points[i].yield, abc.points[i].yield);
    EXPECT_EQ(again.points[i].winner, abc.points[i].winner);
  }
}

TEST(Envelope, GridMismatchRejected) {
  const auto a = make_curve("a", Grid{0.5, 1.0, 0.1}.points(), [](double) { return 0.1; });
  const auto b = make_curve("b", Grid{0.5, 1.0, 0.05}.points(), [](double) { return 0.1; });
  auto shifted = a;
  shifted.points[2].p += 1e-3;
  EXPECT_THROW(envelope({a, b}), std::invalid_argument);
  EXPECT_THROW(envelope({a, shifted}), std::invalid_argument);
  EXPECT_THROW(envelope({}), std::invalid_argument);
}

TEST(YieldCurve, CheckCurve) {
  YieldCurve c{"bad", {}, {{0.5, 0.1, {}}, {0.5, 0.2, {}}}};
  EXPECT_THROW(check_curve(c), std::invalid_argument);
  c.points = {{0.5, 1.5, {}}};
  EXPECT_THROW(check_curve(c), std::invalid_argument);
}

}  // namespace
}  // namespace ebcap
