#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "qss/adversary.hpp"
#include "qss/bitstring.hpp"
#include "qss/protocol.hpp"
#include "qss/qubit.hpp"

namespace qss {

class Rng;

enum class SplitMode : std::uint8_t { PingPong, Block };

inline constexpr std::size_t kBob = 0;
inline constexpr std::size_t kCharlie = 1;

// Splitting a secret S into a pad L (to Bob) and G = L xor S (to Charlie).
// The senders prepare the photons; forward legs run sender -> Alice, return
// legs carry Alice's encoding back.
struct SplitConfig {
  BitString secret;
  SplitMode mode = SplitMode::PingPong;
  double control_prob = 0.1;     // ping-pong: p_s
  double check_fraction = 0.1;   // block: sampled fraction of each block
  double redundancy_rate = 0.1;  // r
  double abort_threshold = kDefaultAbortThreshold;
  std::size_t check_window = 20;   // ping-pong: comparable control events between abort checks
  std::uint64_t photon_budget = 0;  // ping-pong: per sender; 0 picks one automatically
  std::uint64_t block_size = 0;     // block: per sender; 0 picks one automatically
  std::vector<LinkConfig> links;    // empty or {Bob, Charlie}
  AttackStrategy attack;
  std::uint64_t seed = 0;

  LinkConfig link(std::size_t sender) const;
  // Expected photons needed to carry |S| message bits.
  std::uint64_t required_photons() const;
  std::uint64_t effective_budget() const;
  std::uint64_t effective_block_size() const;
  void validate() const;

  friend bool operator==(const SplitConfig&, const SplitConfig&) = default;
};

enum class PhotonMode : std::uint8_t { Lost, Control, Message, Redundancy, Idle };

struct PhotonRecord {
  std::uint64_t index = 0;
  PrepRecord prep;
  PhotonMode mode = PhotonMode::Idle;
  std::optional<Basis> alice_basis;  // control / check sample
  std::optional<Bit> alice_outcome;
  std::optional<EncodeOp> op;        // Alice's encoding
  std::optional<Bit> decoded;        // sender's decoding; absent if lost on return

  friend bool operator==(const PhotonRecord&, const PhotonRecord&) = default;
};

// Everything that crosses the public classical channel.
enum class AnnouncementKind : std::uint8_t {
  LostPhoton,           // a party reports a photon that never arrived
  ControlRequest,       // Alice asks the sender about a sampled photon
  SenderState,          // the sender publishes that photon's basis and bit
  RedundancyPositions,  // Alice lists the positions carrying redundancy
};

struct Announcement {
  AnnouncementKind kind = AnnouncementKind::LostPhoton;
  std::size_t sender = 0;
  std::uint64_t photon = 0;
  std::optional<PrepRecord> state;     // SenderState only
  std::vector<std::uint64_t> positions;  // RedundancyPositions only

  friend bool operator==(const Announcement&, const Announcement&) = default;
};

struct DetectionStats {
  bool detected = false;  // some scored control comparison mismatched
  std::uint64_t message_bits_before_detection = 0;
  std::uint64_t control_events_before_detection = 0;

  friend bool operator==(const DetectionStats&, const DetectionStats&) = default;
};

struct SenderReport {
  BitString expected;  // what Alice meant to deliver (L or G)
  BitString share;     // what the sender decoded, redundancy removed
  CheckTally control;
  std::uint64_t photons_sent = 0;
  std::uint64_t encode_ops = 0;
  std::uint64_t message_bits_delivered = 0;
  DetectionStats detection;
  std::vector<PhotonRecord> photons;

  friend bool operator==(const SenderReport&, const SenderReport&) = default;
};

struct SplitReport {
  SplitMode mode = SplitMode::PingPong;
  std::uint64_t seed = 0;
  BitString secret;
  std::vector<SenderReport> senders;  // {Bob, Charlie}
  BitString recovered;                // L xor G as decoded; empty if a share is incomplete
  Decision decision;
  std::vector<Announcement> classical_log;
  AttackLedger attack;

  const BitString& bob_share() const { return senders.at(kBob).share; }
  const BitString& charlie_share() const { return senders.at(kCharlie).share; }
  std::uint64_t encode_ops() const;

  friend bool operator==(const SplitReport&, const SplitReport&) = default;
};

struct Shares {
  BitString pad;     // L
  BitString cipher;  // G = L xor S
};

// Fresh uniformly random pad L and G = L xor S.
Shares make_shares(const BitString& secret, Rng& rng);

// S = L xor G. Throws std::invalid_argument on a length mismatch.
BitString recombine(const BitString& pad, const BitString& cipher);

// Photon-by-photon variant: every arriving photon is sampled (control mode)
// with probability p_s, otherwise it carries the next share bit back.
SplitReport run_split_pingpong(const SplitConfig& cfg);

// Two-phase block variant: whole blocks are sent and checked first; the
// shares are encoded only once the check passes.
SplitReport run_split_block(const SplitConfig& cfg);

// Dispatches on cfg.mode.
SplitReport run_split(const SplitConfig& cfg);

std::string_view to_string(SplitMode mode);
SplitMode split_mode_from_string(std::string_view s);
std::string_view to_string(PhotonMode mode);
PhotonMode photon_mode_from_string(std::string_view s);
std::string_view to_string(AnnouncementKind kind);
AnnouncementKind announcement_kind_from_string(std::string_view s);

}  // namespace qss
