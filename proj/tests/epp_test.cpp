#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <random>
#include <set>

#include "ebcap/epp.hpp"
#include "oracles.hpp"

namespace ebcap {
namespace {

BellDiagonal random_state(std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  return BellDiagonal::from_unnormalized({e(rng), e(rng), e(rng), e(rng)});
}

void expect_state(const BellDiagonal& s, std::array<double, 4> want, double tol) {
  for (unsigned i = 0; i < 4; ++i) EXPECT_NEAR(s[i], want[i], tol) << "component " << i;
}

TEST(Network, PresetsValidate) {
  EXPECT_EQ(validate_network(recurrence_network()), std::nullopt);
  EXPECT_EQ(validate_network(leung_shor_network()), std::nullopt);
}

TEST(Network, ValidationDiagnostics) {
  auto net = recurrence_network();
  net.kept = {1};
  EXPECT_TRUE(validate_network(net));  // measured and kept overlap
  net = recurrence_network();
  net.gates = {{0, 0}};
  EXPECT_TRUE(validate_network(net));
  net = recurrence_network();
  net.gates = {{0, 5}};
  EXPECT_TRUE(validate_network(net));
  net = recurrence_network();
  net.kept.clear();
  EXPECT_TRUE(validate_network(net));  // pair 1 neither kept nor measured
}

TEST(Network, PointMassPassesEverything) {
  for (const auto& net : {recurrence_network(), leung_shor_network()}) {
    const auto r = apply_network(PairEnsembleDistribution::werner_power(1.0, net.num_pairs), net);
    EXPECT_EQ(r.p_pass, 1.0);
    ASSERT_TRUE(r.post);
    EXPECT_EQ((*r.post)[0], 1.0);
  }
}

TEST(Network, GatesArePermutations) {
  for (const auto& net : {recurrence_network(), leung_shor_network()}) {
    const auto perm = network_permutation(net);
    std::set<std::uint32_t> image(perm.begin(), perm.end());
    EXPECT_EQ(image.size(), perm.size());
  }
  // Uniform input stays uniform: every kept outcome equally likely.
  const auto net = leung_shor_network();
  const auto r = apply_network(PairEnsembleDistribution::uniform(4), net);
  EXPECT_NEAR(r.p_pass, 0.25, 1e-15);
  for (double q : r.post->probabilities()) EXPECT_NEAR(q, 1.0 / 16, 1e-15);
}

TEST(Network, ZeroPassIsFlagged) {
  // Measure the Psi- point mass in Z: amplitude bit 1 never passes.
  GateNetwork net{"fail", 1, {}, {{0, Basis::Z}}, {}};
  const auto r = apply_network(PairEnsembleDistribution::product({BellDiagonal::point_mass(kPsiMinus)}), net);
  EXPECT_EQ(r.p_pass, 0.0);
  EXPECT_FALSE(r.post);
}

TEST(Recurrence, Examples) {
  const auto pure = recurrence_step(BellDiagonal::point_mass(kPhiPlus));
  EXPECT_EQ(pure.p_pass, 1.0);
  EXPECT_EQ(pure.state, BellDiagonal::point_mass(kPhiPlus));

  const auto w = recurrence_step(werner_from_fidelity(0.75));
  EXPECT_NEAR(w.p_pass, 13.0 / 18, 1e-15);
  expect_state(w.state, {41.0 / 52, 1.0 / 52, 9.0 / 52, 1.0 / 52}, 1e-15);

  const auto m = modified_recurrence_step(werner_from_fidelity(0.75));
  EXPECT_NEAR(m.p_pass, 13.0 / 18, 1e-15);
  expect_state(m.state, {41.0 / 52, 1.0 / 52, 1.0 / 52, 9.0 / 52}, 1e-15);
}

TEST(Recurrence, ModifiedStepIsPrintedRelation) {
  // p10' = 2 p01 p11 / N, p11' = 2 p00 p10 / N.
  const BellDiagonal s({0.6, 0.2, 0.15, 0.05});
  const double n = 0.36 + 0.04 + 0.0225 + 0.0025 + 2 * 0.6 * 0.15 + 2 * 0.2 * 0.05;
  const auto m = modified_recurrence_step(s);
  EXPECT_NEAR(m.p_pass, n, 1e-15);
  expect_state(m.state, {(0.36 + 0.0225) / n, (0.04 + 0.0025) / n, 2 * 0.2 * 0.05 / n,
                         2 * 0.6 * 0.15 / n},
               1e-15);
}

TEST(Recurrence, NetworkEngineReproducesStep) {
  std::mt19937_64 rng(21);
  const auto net = recurrence_network();
  for (int t = 0; t < 50; ++t) {
    const auto s = random_state(rng);
    const auto r = apply_network(PairEnsembleDistribution::product({s, s}), net);
    const auto step = recurrence_step(s);
    EXPECT_NEAR(r.p_pass, step.p_pass, 1e-12);
    const BellDiagonal post({(*r.post)[0], (*r.post)[1], (*r.post)[2], (*r.post)[3]});
    expect_state(post, step.state.weights(), 1e-12);
  }
}

TEST(Recurrence, ModifiedConvergesFaster) {
  for (double f = 0.76; f < 1.0; f += 0.01) {
    auto plain = werner_from_fidelity(f);
    auto mod = plain;
    for (int r = 0; r < 2; ++r) {
      plain = recurrence_step(plain).state;
      mod = modified_recurrence_step(mod).state;
    }
    EXPECT_GE(mod[kPhiPlus], plain[kPhiPlus] - 1e-15) << "F=" << f;
  }
}

TEST(LeungShor, Examples) {
  EXPECT_EQ(leung_shor_yield(1.0), 0.5);
  EXPECT_EQ(leung_shor_yield(0.25), 0.0);
  EXPECT_NEAR(leung_shor_yield(0.9), 0.25314609808868616, 1e-12);
}

TEST(LeungShor, MatchesDirectSum) {
  for (double f : {0.6, 0.75, 0.85, 0.9, 0.97}) {
    const auto ref = oracle_ref::leung_shor(f);
    const auto r = apply_network(PairEnsembleDistribution::werner_power(f, 4), leung_shor_network());
    EXPECT_NEAR(r.p_pass, ref.p_pass, 1e-14);
    for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR((*r.post)[i], ref.kept[i] / ref.p_pass, 1e-13);
    EXPECT_NEAR(leung_shor_yield(f), ref.yield, 1e-13) << "F=" << f;
  }
}

TEST(MultiRound, Examples) {
  EXPECT_DOUBLE_EQ(multi_round_recurrence_eb(DepolarizingChannel(1.0), 1), 0.5);
  EXPECT_THROW(multi_round_recurrence_eb(DepolarizingChannel(0.9), 0), std::invalid_argument);
  EXPECT_EQ(multi_round_recurrence_eb(DepolarizingChannel(0.0), 2), 0.0);
}

TEST(MultiRound, HandComputedTwoRounds) {
  const DepolarizingChannel ch(0.9);
  const auto s1 = modified_recurrence_step(werner_from_fidelity(ch.fidelity()));
  const auto s2 = modified_recurrence_step(s1.state);
  const double c = 1.0 - shannon_entropy(std::array<double, 2>{0.95, 0.05});
  const double want = s1.p_pass / 2 * s2.p_pass / (2 + 1 / c) * hashing_yield(s2.state);
  EXPECT_NEAR(multi_round_recurrence_eb(ch, 2), want, 1e-15);
}

TEST(BestRounds, Examples) {
  const auto high = best_recurrence_rounds(DepolarizingChannel(0.99), 5);
  EXPECT_EQ(high.rounds, 1);
  const auto one = best_recurrence_rounds(DepolarizingChannel(1.0), 5);
  EXPECT_EQ(one.rounds, 1);
  EXPECT_DOUBLE_EQ(one.yield, 0.5);
  EXPECT_THROW(best_recurrence_rounds(DepolarizingChannel(0.9), 0), std::invalid_argument);
}

TEST(BestRounds, MonotoneInCapAndDominatesOneRound) {
  for (double p = 0.6; p <= 1.0; p += 0.02) {
    const DepolarizingChannel ch(std::min(p, 1.0));
    double prev = 0.0;
    for (int cap = 1; cap <= 6; ++cap) {
      const double y = best_recurrence_rounds(ch, cap).yield;
      EXPECT_GE(y, prev);
      EXPECT_GE(y, multi_round_recurrence_eb(ch, 1));
      prev = y;
    }
  }
}

TEST(NetworkFile, RoundTripAndErrors) {
  for (const auto& net : {recurrence_network(), leung_shor_network()}) {
    EXPECT_EQ(parse_network_file(render_network(net)), net);
  }
  const auto parsed = parse_network_file(
      "# four in, two out\n"
      "name leung-shor\n"
      "pairs 4\n"
      "bxor 1 4\nbxor 2 4\nbxor 3 1\nbxor 3 2\n"
      "measure 3 X\nmeasure 4 Z\n"
      "keep 1 2\n");
  EXPECT_EQ(parsed, leung_shor_network());
  EXPECT_THROW(parse_network_file("pairs 2\nbxor 1 3\nmeasure 2 Z\nkeep 1\n"), ParseError);
  EXPECT_THROW(parse_network_file("pairs 2\nbxor 1 2\nmeasure 2 Y\nkeep 1\n"), ParseError);
}

TEST(NetworkFile, ShippedFilesMatchPresets) {
  auto load = [](const std::string& name) {
    std::ifstream in(std::string(EBCAP_DATA_DIR) + "/" + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_network_file(ss.str());
  };
  EXPECT_EQ(load("leung-shor.net"), leung_shor_network());
  EXPECT_EQ(load("recurrence.net"), recurrence_network());
}

}  // namespace
}  // namespace ebcap
