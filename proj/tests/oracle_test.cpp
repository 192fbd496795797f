#include <gtest/gtest.h>

#include <set>

#include "ebcap/oracle.hpp"

namespace ebcap::oracle {
namespace {

TEST(StateVector, Examples) {
  const auto t = statevector_bxor_table();
  EXPECT_EQ(t[0], (LabelPair{0, 0}));
  EXPECT_EQ(t[4 * 3 + 2], (LabelPair{1, 3}));  // (Psi-, Phi-) -> (Psi+, Psi-)
  std::set<int> outputs;
  for (const auto& lp : t) outputs.insert(4 * lp.source + lp.target);
  EXPECT_EQ(outputs.size(), 16u);
}

TEST(McCode, NoiselessIsExact) {
  const auto r = mc_sample_code(builtin_shor9(), DepolarizingChannel(1.0), 10000, 1);
  EXPECT_EQ(r.max_sigma_deviation, 0.0);
  const auto counts = sample_code_counts(builtin_shor9(), DepolarizingChannel(1.0), 10000, 1);
  EXPECT_EQ(counts[0], 10000u);
}

TEST(McCode, ShorWithinGate) {
  const auto r = mc_sample_code(builtin_shor9(), DepolarizingChannel(0.8), 1000000, 7);
  EXPECT_TRUE(r.within()) << r.max_sigma_deviation;
}

TEST(McCode, DeterministicAcrossRunsAndWorkers) {
  const auto a = sample_code_counts(builtin_cat(5), DepolarizingChannel(0.7), 50000, 42, 1);
  const auto b = sample_code_counts(builtin_cat(5), DepolarizingChannel(0.7), 50000, 42, 3);
  const auto c = sample_code_counts(builtin_cat(5), DepolarizingChannel(0.7), 50000, 42, 1);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  const auto d = sample_code_counts(builtin_cat(5), DepolarizingChannel(0.7), 50000, 43, 1);
  EXPECT_NE(a, d);
}

TEST(McCode, SampledTableFeedsAdaptiveYield) {
  const auto code = builtin_cat(4);
  const DepolarizingChannel ch(0.9);
  const auto sampled = sampled_table(code, ch, 400000, 5);
  const auto exact = enumerate_code(code, ch);
  const auto q = uses_schedule(code);
  const double ys = adaptive_trace(sampled, q, code.n, 3).yield();
  const double ye = adaptive_trace(exact, q, code.n, 3).yield();
  EXPECT_NEAR(ys, ye, 5e-3);
}

TEST(McNetwork, PointMassPassesExactly) {
  const auto r = mc_sample_network(PairEnsembleDistribution::werner_power(1.0, 4),
                                   leung_shor_network(), 10000, 3);
  EXPECT_EQ(r.cells[0].label, "p_pass");
  EXPECT_EQ(r.cells[0].empirical, 1.0);
  EXPECT_EQ(r.max_sigma_deviation, 0.0);
}

TEST(McNetwork, LeungShorWithinGate) {
  const auto r = mc_sample_network(PairEnsembleDistribution::werner_power(0.9, 4),
                                   leung_shor_network(), 1000000, 7);
  EXPECT_TRUE(r.within()) << r.max_sigma_deviation;
}

TEST(McNetwork, UniformInputKeepsUniformMarginal) {
  const auto r = mc_sample_network(PairEnsembleDistribution::uniform(4), leung_shor_network(),
                                   200000, 9);
  ASSERT_EQ(r.cells.size(), 17u);
  for (std::size_t i = 1; i < r.cells.size(); ++i) EXPECT_DOUBLE_EQ(r.cells[i].analytic, 1.0 / 16);
  EXPECT_TRUE(r.within()) << r.max_sigma_deviation;
}

TEST(McReport, RareCellsArePooled) {
  McReport r;
  add_categorical(r, {"a", "b", "c"}, {98, 1, 1}, {0.98, 0.01, 0.01}, 100);
  ASSERT_EQ(r.cells.size(), 2u);
  EXPECT_EQ(r.cells[1].label, "(pooled rare cells)");
  EXPECT_EQ(r.cells[1].count, 2u);
}

TEST(McReport, RejectsZeroTrials) {
  EXPECT_THROW(mc_sample_code(builtin_cat(3), DepolarizingChannel(0.9), 0, 1), std::invalid_argument);
}

}  // namespace
}  // namespace ebcap::oracle
