#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qss/adversary.hpp"
#include "qss/bitstring.hpp"
#include "qss/channel.hpp"
#include "qss/qubit.hpp"

namespace qss {

class Rng;

inline constexpr double kDefaultAbortThreshold = 0.11;

// Both legs between the dealer and one agent (or, for secret splitting,
// between one sender and the dealer).
struct LinkConfig {
  ChannelLeg forward;
  ChannelLeg back;

  friend bool operator==(const LinkConfig&, const LinkConfig&) = default;
};

struct RunConfig {
  std::size_t n_agents = 2;
  std::uint64_t n_photons = 10000;
  double check1_fraction = 0.1;  // agents' sampling check
  double check2_fraction = 0.1;  // dealer's post-hoc check
  double abort_threshold = kDefaultAbortThreshold;
  // Empty means ideal channels everywhere; otherwise one entry per agent.
  std::vector<LinkConfig> links;
  AttackStrategy attack;
  std::uint64_t seed = 0;
  bool record_transcript = false;

  LinkConfig link(std::size_t agent) const;
  bool noisy() const;
  // Throws ConfigError naming the offending field.
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct AgentCheck {
  Basis basis = Basis::Z;
  Bit outcome = 0;

  friend bool operator==(const AgentCheck&, const AgentCheck&) = default;
};

// One agent's part of one round.
struct AgentRound {
  PrepRecord prep;
  std::variant<AgentCheck, EncodeOp> event = EncodeOp::I;
  std::optional<Bit> dealer_outcome;  // set when the dealer measured a returned photon
  bool lost = false;

  bool checked() const { return std::holds_alternative<AgentCheck>(event); }

  friend bool operator==(const AgentRound&, const AgentRound&) = default;
};

struct RoundTranscript {
  std::uint64_t round = 0;
  std::vector<AgentRound> agents;
  bool void_round = false;  // some photon of the round was lost
  bool check2 = false;      // selected by the dealer for the second check

  friend bool operator==(const RoundTranscript&, const RoundTranscript&) = default;
};

struct CheckTally {
  std::uint64_t announced = 0;   // announcements made
  std::uint64_t comparable = 0;  // announcements that can be scored
  std::uint64_t mismatches = 0;

  double error_rate() const {
    return comparable == 0 ? 0.0 : static_cast<double>(mismatches) / static_cast<double>(comparable);
  }

  friend bool operator==(const CheckTally&, const CheckTally&) = default;
};

// Resource counts entering eta = b_s / (q_t + b_t).
struct EfficiencyCounts {
  std::uint64_t secret_bits = 0;     // b_s
  std::uint64_t qubits = 0;          // q_t
  std::uint64_t classical_bits = 0;  // b_t

  friend bool operator==(const EfficiencyCounts&, const EfficiencyCounts&) = default;
};

struct Decision {
  bool accepted = true;
  std::string reason;

  static Decision accept() { return {}; }
  static Decision abort(std::string why) { return {false, std::move(why)}; }

  friend bool operator==(const Decision&, const Decision&) = default;
};

struct AgentReport {
  BitString key;         // K_i: the agent's own operation bits
  BitString dealer_key;  // the dealer's decoding of K_i
  CheckTally check1;
  CheckTally check2;
  EfficiencyCounts efficiency;

  friend bool operator==(const AgentReport&, const AgentReport&) = default;
};

struct RunReport {
  std::string protocol;  // "keygen" or "naive"
  std::uint64_t seed = 0;
  std::uint64_t n_photons = 0;
  std::uint64_t void_rounds = 0;
  std::vector<AgentReport> agents;
  // K_A, the XOR of the dealer's per-agent keys over their common length.
  BitString dealer_key;
  // Naive baseline only: the dealer's subset comparison of K'_A against K_A.
  CheckTally consistency;
  Decision decision;
  EfficiencyCounts efficiency;
  // Check announcements excluded from b_t (key rounds announce nothing).
  double eta_nominal = 0.0;
  // Every classical bit counted.
  double eta_full = 0.0;
  AttackLedger attack;
  std::vector<RoundTranscript> transcript;  // empty unless requested

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

// Dealer-side decode of a returned photon measured in its preparation basis.
EncodeOp decode_round(const PrepRecord& prep, Bit outcome);

// Multi-party key generation with bidirectional single photons: the dealer
// sends each agent an independent random protocol state every round, agents
// either sample it (first check) or encode I/U and send it back, the dealer
// measures in the preparation basis and decodes. A second, dealer-chosen
// sample of decoded rounds has the agents announce their operations.
RunReport run_keygen(const RunConfig& cfg);

// Baseline: one BB84 session per agent (two agents), combined key
// K_A = K_B xor K_C, verified on a random subset of K'_A.
RunReport run_naive_qss(const RunConfig& cfg);

struct KeyVerification {
  double error_rate = 0.0;
  std::uint64_t sampled = 0;
  std::uint64_t mismatches = 0;
  std::vector<std::size_t> positions;  // sampled positions, ascending
  bool accepted = true;
};

// XORs the agent keys, compares a Bernoulli(sample_fraction) subset against
// dealer_key, accepts iff the mismatch rate <= max_error. All keys must have
// the same length (std::invalid_argument otherwise).
KeyVerification verify_combined_key(const BitString& dealer_key,
                                    const std::vector<BitString>& agent_keys,
                                    double sample_fraction, Rng& rng,
                                    double max_error = 0.0);

}  // namespace qss
