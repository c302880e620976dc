#include <algorithm>
#include <stdexcept>
#include <string>

#include "qss/error.hpp"
#include "qss/protocol.hpp"
#include "qss/rng.hpp"

namespace qss {
namespace {

BitString drop_positions(const BitString& key, const std::vector<std::size_t>& sorted_positions) {
  BitString out;
  out.reserve(key.size() - sorted_positions.size());
  auto next = sorted_positions.begin();
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (next != sorted_positions.end() && *next == i) {
      ++next;
      continue;
    }
    out.push_back(key[i]);
  }
  return out;
}

}  // namespace

KeyVerification verify_combined_key(const BitString& dealer_key,
                                    const std::vector<BitString>& agent_keys,
                                    double sample_fraction, Rng& rng, double max_error) {
  if (agent_keys.empty()) throw std::invalid_argument("verify_combined_key: no agent keys");
  BitString combined(dealer_key.size());
  for (const auto& k : agent_keys) {
    if (k.size() != dealer_key.size()) {
      throw std::invalid_argument("verify_combined_key: key length mismatch (" +
                                  std::to_string(k.size()) + " vs " +
                                  std::to_string(dealer_key.size()) + ")");
    }
    combined ^= k;
  }
  KeyVerification v;
  for (std::size_t i = 0; i < dealer_key.size(); ++i) {
    if (!rng.bernoulli(sample_fraction)) continue;
    v.positions.push_back(i);
    ++v.sampled;
    v.mismatches += (combined[i] != dealer_key[i]);
  }
  v.error_rate = v.sampled == 0 ? 0.0 : static_cast<double>(v.mismatches) / static_cast<double>(v.sampled);
  v.accepted = v.error_rate <= max_error;
  return v;
}

RunReport run_naive_qss(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.n_agents != 2) {
    throw ConfigError("agents", "the naive QKD baseline is defined for exactly 2 agents");
  }

  Rng rng(cfg.seed);
  Eavesdropper eve(cfg.attack);
  Tap* tap = cfg.attack.active() ? &eve : nullptr;

  RunReport report;
  report.protocol = "naive";
  report.seed = cfg.seed;
  report.n_photons = cfg.n_photons;
  report.agents.resize(cfg.n_agents);
  if (cfg.record_transcript) {
    report.transcript.resize(cfg.n_photons);
    for (std::uint64_t r = 0; r < cfg.n_photons; ++r) {
      report.transcript[r].round = r;
      report.transcript[r].agents.resize(cfg.n_agents);
    }
  }

  std::vector<char> lost_in_round(cfg.n_photons, 0);

  // One BB84 session per agent: uniform preparation, uniform measurement
  // basis, matched-basis rounds kept after the agent announces its basis.
  for (std::size_t i = 0; i < cfg.n_agents; ++i) {
    ChannelLeg leg = cfg.link(i).forward;
    if (cfg.attack.taps(i, Direction::Forward)) leg.tap = LegId{i, Direction::Forward};
    AgentReport& out = report.agents[i];

    for (std::uint64_t r = 0; r < cfg.n_photons; ++r) {
      const PrepRecord prep = random_prep(rng);
      const auto arrived = transmit(leg, prepare(prep), rng, tap, TapContext{r, {}, prep});
      const Basis basis = random_basis(rng);
      Bit outcome = 0;
      if (!arrived) lost_in_round[r] = 1;
      if (arrived) {
        outcome = measure(*arrived, basis, rng).outcome;
        ++out.check1.announced;
        if (basis == prep.basis) {
          out.key.push_back(outcome);
          out.dealer_key.push_back(prep.bit);
        }
      }
      if (cfg.record_transcript) {
        AgentRound& a = report.transcript[r].agents[i];
        a.prep = prep;
        a.event = AgentCheck{basis, outcome};
        a.lost = !arrived;
        report.transcript[r].void_round = report.transcript[r].void_round || a.lost;
      }
    }
    out.efficiency = {out.key.size(), cfg.n_photons, out.check1.announced};
  }

  const std::size_t common =
      std::min(report.agents[0].dealer_key.size(), report.agents[1].dealer_key.size());
  for (auto& a : report.agents) {
    a.key = a.key.prefix(common);
    a.dealer_key = a.dealer_key.prefix(common);
  }
  const BitString dealer_combined = report.agents[0].dealer_key ^ report.agents[1].dealer_key;

  // An ideal channel tolerates no mismatch at all.
  const double threshold = cfg.noisy() ? cfg.abort_threshold : 0.0;
  const KeyVerification v = verify_combined_key(
      dealer_combined, {report.agents[0].key, report.agents[1].key}, cfg.check2_fraction, rng,
      threshold);
  report.consistency = {v.sampled, v.sampled, v.mismatches};
  if (!v.accepted) {
    report.decision = Decision::abort("combined-key comparison error rate " +
                                      format_number(v.error_rate) + " exceeds " +
                                      format_number(threshold));
  }

  for (auto& a : report.agents) {
    a.key = drop_positions(a.key, v.positions);
    a.dealer_key = drop_positions(a.dealer_key, v.positions);
  }
  report.dealer_key = drop_positions(dealer_combined, v.positions);
  report.void_rounds =
      static_cast<std::uint64_t>(std::count(lost_in_round.begin(), lost_in_round.end(), 1));

  std::uint64_t basis_bits = 0;
  for (const auto& a : report.agents) {
    report.efficiency.qubits += a.efficiency.qubits;
    basis_bits += a.efficiency.classical_bits;
  }
  report.efficiency.secret_bits = report.dealer_key.size();
  // Each sampled position costs one announced bit from each agent.
  report.efficiency.classical_bits = basis_bits + 2 * v.sampled;

  const auto& e = report.efficiency;
  report.eta_nominal =
      static_cast<double>(e.secret_bits) / static_cast<double>(e.qubits + basis_bits);
  report.eta_full =
      static_cast<double>(e.secret_bits) / static_cast<double>(e.qubits + e.classical_bits);
  report.attack = eve.take_ledger();
  return report;
}

}  // namespace qss
