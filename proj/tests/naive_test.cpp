#include <gtest/gtest.h>

#include <cmath>

#include "qss/error.hpp"
#include "qss/formulas.hpp"
#include "qss/protocol.hpp"
#include "qss/rng.hpp"

namespace qss {
namespace {

RunConfig naive(std::uint64_t photons, std::uint64_t seed) {
  RunConfig cfg;
  cfg.n_photons = photons;
  cfg.seed = seed;
  return cfg;
}

TEST(VerifyCombinedKey, AcceptsMatchingKeys) {
  Rng rng(1);
  const BitString kb = BitString::random(1000, rng);
  const BitString kc = BitString::random(1000, rng);
  const KeyVerification v = verify_combined_key(kb ^ kc, {kb, kc}, 0.2, rng);
  EXPECT_TRUE(v.accepted);
  EXPECT_EQ(v.mismatches, 0u);
  EXPECT_EQ(v.sampled, v.positions.size());
  EXPECT_TRUE(std::is_sorted(v.positions.begin(), v.positions.end()));
  EXPECT_NEAR(static_cast<double>(v.sampled), 200.0, 5 * std::sqrt(160.0));
}

TEST(VerifyCombinedKey, DetectsCorruption) {
  Rng rng(2);
  const BitString kb = BitString::random(1000, rng);
  const BitString kc = BitString::random(1000, rng);
  BitString dealer = kb ^ kc;
  for (std::size_t i = 0; i < dealer.size(); i += 2) dealer.set(i, dealer[i] ^ 1);
  const KeyVerification v = verify_combined_key(dealer, {kb, kc}, 0.5, rng, 0.11);
  EXPECT_FALSE(v.accepted);
  EXPECT_NEAR(v.error_rate, 0.5, 0.1);
}

TEST(VerifyCombinedKey, RejectsBadInput) {
  Rng rng(3);
  EXPECT_THROW(verify_combined_key(BitString(4), {}, 0.1, rng), std::invalid_argument);
  EXPECT_THROW(verify_combined_key(BitString(4), {BitString(3)}, 0.1, rng), std::invalid_argument);
}

TEST(Naive, IdealRunAccepts) {
  const RunReport r = run_naive_qss(naive(20000, 4));
  EXPECT_EQ(r.protocol, "naive");
  EXPECT_TRUE(r.decision.accepted) << r.decision.reason;
  EXPECT_EQ(r.consistency.mismatches, 0u);
  EXPECT_GT(r.consistency.comparable, 0u);
  EXPECT_EQ(r.dealer_key, r.agents[0].key ^ r.agents[1].key);
  EXPECT_EQ(r.agents[0].key, r.agents[0].dealer_key);
}

TEST(Naive, PooledEfficiencyIsOneEighthBeforeSampling) {
  RunConfig cfg = naive(100000, 5);
  const RunReport r = run_naive_qss(cfg);
  const double expected = kNaiveQssEfficiency * (1.0 - cfg.check2_fraction);
  // |K_A| ~ Binomial-ish around n/2 (1 - delta2), denominator 4n.
  const double sigma = std::sqrt(cfg.n_photons * 0.5) / (4.0 * cfg.n_photons);
  EXPECT_NEAR(r.eta_nominal, expected, 4 * sigma);
  EXPECT_LT(r.eta_full, r.eta_nominal);
  EXPECT_EQ(r.efficiency.qubits, 2 * cfg.n_photons);
}

TEST(Naive, AttackOnOneSessionAborts) {
  RunConfig cfg = naive(20000, 6);
  cfg.attack = AttackStrategy::random_basis({0});
  const RunReport r = run_naive_qss(cfg);
  EXPECT_FALSE(r.decision.accepted);
  EXPECT_NEAR(r.consistency.error_rate(), 0.25, 0.03);
  EXPECT_GT(r.attack.intercept_count(), 0u);
}

TEST(Naive, NoisyChannelUsesThreshold) {
  RunConfig cfg = naive(20000, 7);
  const ChannelLeg leg{1.0, {0.01, 0.0, 0.0}, std::nullopt};
  cfg.links = {{leg, leg}, {leg, leg}};
  const RunReport r = run_naive_qss(cfg);
  EXPECT_GT(r.consistency.mismatches, 0u);
  EXPECT_TRUE(r.decision.accepted) << r.decision.reason;
}

TEST(Naive, RequiresTwoAgents) {
  RunConfig cfg = naive(100, 1);
  cfg.n_agents = 3;
  try {
    run_naive_qss(cfg);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "agents");
  }
}

TEST(Naive, LossIsCountedAndDeterministic) {
  RunConfig cfg = naive(5000, 8);
  const ChannelLeg leg{0.8, {}, std::nullopt};
  cfg.links = {{leg, leg}, {leg, leg}};
  cfg.record_transcript = true;
  const RunReport a = run_naive_qss(cfg);
  EXPECT_GT(a.void_rounds, 0u);
  EXPECT_EQ(a, run_naive_qss(cfg));
  EXPECT_EQ(a.transcript.size(), cfg.n_photons);
}

}  // namespace
}  // namespace qss
