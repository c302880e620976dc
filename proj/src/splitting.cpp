#include "qss/splitting.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qss/error.hpp"
#include "qss/rng.hpp"

namespace qss {
namespace {

std::uint64_t photons_for(std::size_t bits, double sampled_fraction, double redundancy) {
  return static_cast<std::uint64_t>(
      std::ceil(static_cast<double>(bits) / ((1.0 - sampled_fraction) * (1.0 - redundancy))));
}

std::uint64_t with_margin(std::uint64_t n) {
  return static_cast<std::uint64_t>(std::ceil(1.5 * static_cast<double>(n))) + 64;
}

LinkConfig tapped_link(const SplitConfig& cfg, std::size_t sender) {
  LinkConfig link = cfg.link(sender);
  if (cfg.attack.taps(sender, Direction::Forward)) link.forward.tap = LegId{sender, Direction::Forward};
  if (cfg.attack.taps(sender, Direction::Return)) link.back.tap = LegId{sender, Direction::Return};
  return link;
}

const char* sender_name(std::size_t sender) { return sender == kBob ? "Bob" : "Charlie"; }

// Per-sender state shared by both variants.
struct Stream {
  std::size_t sender;
  const BitString* message;
  LinkConfig link;
  Rng rng;
  SenderReport* out;
  std::vector<Bit> redundancy_flags;  // per delivered message-mode photon
  std::vector<std::uint64_t> redundancy_positions;
  std::size_t next_bit = 0;

  bool done() const { return next_bit >= message->size(); }
};

// Alice measures a sampled photon in a random basis and the sender publishes
// its preparation; only matched-basis cases are scored.
void score_sample(Stream& s, PhotonRecord& rec, const Qubit& arrived, std::vector<Announcement>& log) {
  const Basis basis = random_basis(s.rng);
  const Bit outcome = measure(arrived, basis, s.rng).outcome;
  rec.alice_basis = basis;
  rec.alice_outcome = outcome;
  log.push_back({AnnouncementKind::ControlRequest, s.sender, rec.index, std::nullopt, {}});
  log.push_back({AnnouncementKind::SenderState, s.sender, rec.index, rec.prep, {}});

  CheckTally& tally = s.out->control;
  ++tally.announced;
  if (basis != rec.prep.basis) return;
  ++tally.comparable;
  if (outcome != rec.prep.bit) {
    ++tally.mismatches;
    DetectionStats& d = s.out->detection;
    if (!d.detected) {
      d.detected = true;
      d.message_bits_before_detection = s.out->message_bits_delivered;
      d.control_events_before_detection = tally.announced - 1;
    }
  }
}

// Alice applies `op` and returns the photon; the sender decodes it in the
// preparation basis. Returns false if the photon was lost on the way back.
bool encode_and_return(Stream& s, Tap* tap, PhotonRecord& rec, const Qubit& arrived, EncodeOp op,
                       bool redundancy, std::vector<Announcement>& log) {
  rec.mode = redundancy ? PhotonMode::Redundancy : PhotonMode::Message;
  rec.op = op;
  ++s.out->encode_ops;
  const PrepRecord carried{rec.prep.basis, static_cast<Bit>(rec.prep.bit ^ op_bit(op))};
  const auto back = transmit(s.link.back, apply(op, arrived), s.rng, tap,
                             TapContext{rec.index, {}, carried});
  if (!back) {
    log.push_back({AnnouncementKind::LostPhoton, s.sender, rec.index, std::nullopt, {}});
    return false;
  }
  const Bit outcome = measure(*back, rec.prep.basis, s.rng).outcome;
  rec.decoded = op_bit(decode_round(rec.prep, outcome));
  s.redundancy_flags.push_back(redundancy ? 1 : 0);
  if (redundancy) {
    s.redundancy_positions.push_back(rec.index);
  } else {
    ++s.next_bit;
    ++s.out->message_bits_delivered;
  }
  s.out->share.push_back(*rec.decoded);
  return true;
}

// Alice publishes the redundancy positions; the sender drops those bits.
void finish_stream(Stream& s, std::vector<Announcement>& log) {
  log.push_back({AnnouncementKind::RedundancyPositions, s.sender, 0, std::nullopt,
                 s.redundancy_positions});
  BitString kept;
  kept.reserve(s.message->size());
  for (std::size_t i = 0; i < s.out->share.size(); ++i) {
    if (!s.redundancy_flags[i]) kept.push_back(s.out->share[i]);
  }
  s.out->share = std::move(kept);
}

std::optional<std::string> check_failure(const Stream& s, double threshold) {
  const CheckTally& t = s.out->control;
  if (t.comparable == 0 || t.error_rate() <= threshold) return std::nullopt;
  return std::string(sender_name(s.sender)) + " control error rate " +
         format_number(t.error_rate()) + " exceeds eps_max " + format_number(threshold);
}

struct Setup {
  SplitReport report;
  std::vector<Stream> streams;
  Shares shares;
};

Setup begin(const SplitConfig& cfg) {
  cfg.validate();
  Setup st;
  Rng pad_rng(Rng::derive_seed(cfg.seed, 0));
  st.shares = make_shares(cfg.secret, pad_rng);
  st.report.mode = cfg.mode;
  st.report.seed = cfg.seed;
  st.report.secret = cfg.secret;
  st.report.senders.resize(2);
  st.report.senders[kBob].expected = st.shares.pad;
  st.report.senders[kCharlie].expected = st.shares.cipher;
  for (std::size_t s = 0; s < 2; ++s) {
    st.streams.push_back({s, &st.report.senders[s].expected, tapped_link(cfg, s),
                          Rng(Rng::derive_seed(cfg.seed, s + 1)), &st.report.senders[s], {}, {}, 0});
  }
  return st;
}

void complete(Setup& st) {
  auto& r = st.report;
  const std::size_t n = r.secret.size();
  if (r.bob_share().size() == n && r.charlie_share().size() == n) {
    r.recovered = recombine(r.bob_share(), r.charlie_share());
  }
}

}  // namespace

LinkConfig SplitConfig::link(std::size_t sender) const {
  return links.empty() ? LinkConfig{} : links.at(sender);
}

std::uint64_t SplitConfig::required_photons() const {
  const double sampled = mode == SplitMode::PingPong ? control_prob : check_fraction;
  return photons_for(secret.size(), sampled, redundancy_rate);
}

std::uint64_t SplitConfig::effective_budget() const {
  return photon_budget != 0 ? photon_budget : with_margin(required_photons());
}

std::uint64_t SplitConfig::effective_block_size() const {
  return block_size != 0 ? block_size : with_margin(required_photons());
}

void SplitConfig::validate() const {
  if (secret.empty()) throw ConfigError("secret", "the secret must contain at least one bit");
  if (!(control_prob > 0.0 && control_prob < 1.0)) {
    throw ConfigError("ps", "control probability must satisfy 0 < p_s < 1 (got " +
                                format_number(control_prob) + ")");
  }
  if (!(check_fraction > 0.0 && check_fraction <= 0.5)) {
    throw ConfigError("delta1", "check fraction must satisfy 0 < δ ≤ 1/2 (got " +
                                    format_number(check_fraction) + ")");
  }
  if (!(redundancy_rate >= 0.0 && redundancy_rate < 1.0)) {
    throw ConfigError("redundancy", "redundancy rate must satisfy 0 <= r < 1 (got " +
                                        format_number(redundancy_rate) + ")");
  }
  require_probability("eps_max", abort_threshold);
  if (check_window < 1) throw ConfigError("window", "must be at least 1");
  if (mode == SplitMode::PingPong && photon_budget != 0 && photon_budget < required_photons()) {
    throw ConfigError("budget", "insufficient photons for " + std::to_string(secret.size()) +
                                    " message bits: need at least " +
                                    std::to_string(required_photons()));
  }
  if (mode == SplitMode::Block && block_size != 0 && block_size < required_photons()) {
    throw ConfigError("block_size", "block too small for " + std::to_string(secret.size()) +
                                        " message bits: need |block| >= |S|/((1-δ)(1-r)) = " +
                                        std::to_string(required_photons()));
  }
  if (!links.empty() && links.size() != 2) {
    throw ConfigError("links", "expected 2 entries (Bob, Charlie), got " + std::to_string(links.size()));
  }
  for (std::size_t i = 0; i < links.size(); ++i) {
    links[i].forward.validate("links[" + std::to_string(i) + "].forward");
    links[i].back.validate("links[" + std::to_string(i) + "].return");
  }
  attack.validate(2);
}

std::uint64_t SplitReport::encode_ops() const {
  std::uint64_t n = 0;
  for (const auto& s : senders) n += s.encode_ops;
  return n;
}

Shares make_shares(const BitString& secret, Rng& rng) {
  BitString pad = BitString::random(secret.size(), rng);
  BitString cipher = pad ^ secret;
  return {std::move(pad), std::move(cipher)};
}

BitString recombine(const BitString& pad, const BitString& cipher) { return pad ^ cipher; }

SplitReport run_split_pingpong(const SplitConfig& cfg) {
  if (cfg.mode != SplitMode::PingPong) throw std::invalid_argument("run_split_pingpong: mode must be PingPong");
  Setup st = begin(cfg);
  auto& log = st.report.classical_log;
  Eavesdropper eve(cfg.attack);
  Tap* tap = cfg.attack.active() ? &eve : nullptr;
  const std::uint64_t budget = cfg.effective_budget();

  // The two sender streams are interleaved photon by photon so an abort on
  // either stops both.
  bool running = true;
  while (running && st.report.decision.accepted) {
    running = false;
    for (Stream& s : st.streams) {
      if (s.done() || !st.report.decision.accepted) continue;
      if (s.out->photons_sent >= budget) {
        st.report.decision = Decision::abort(std::string(sender_name(s.sender)) +
                                             " photon budget exhausted before the share was delivered");
        break;
      }
      running = true;
      PhotonRecord rec;
      rec.index = s.out->photons_sent++;
      rec.prep = random_prep(s.rng);
      const auto arrived = transmit(s.link.forward, prepare(rec.prep), s.rng, tap,
                                    TapContext{rec.index, {}, rec.prep});
      if (!arrived) {
        rec.mode = PhotonMode::Lost;
        log.push_back({AnnouncementKind::LostPhoton, s.sender, rec.index, std::nullopt, {}});
      } else if (s.rng.bernoulli(cfg.control_prob)) {
        rec.mode = PhotonMode::Control;
        score_sample(s, rec, *arrived, log);
        const auto& t = s.out->control;
        if (t.comparable > 0 && t.comparable % cfg.check_window == 0 && rec.alice_basis == rec.prep.basis) {
          if (auto why = check_failure(s, cfg.abort_threshold)) st.report.decision = Decision::abort(*why);
        }
      } else {
        const bool redundancy = s.rng.bernoulli(cfg.redundancy_rate);
        const EncodeOp op = redundancy ? random_op(s.rng) : op_from_bit((*s.message)[s.next_bit]);
        encode_and_return(s, tap, rec, *arrived, op, redundancy, log);
      }
      s.out->photons.push_back(std::move(rec));
    }
  }

  for (Stream& s : st.streams) {
    if (st.report.decision.accepted) {
      if (auto why = check_failure(s, cfg.abort_threshold)) st.report.decision = Decision::abort(*why);
    }
  }
  for (Stream& s : st.streams) finish_stream(s, log);
  complete(st);
  st.report.attack = eve.take_ledger();
  return std::move(st.report);
}

SplitReport run_split_block(const SplitConfig& cfg) {
  if (cfg.mode != SplitMode::Block) throw std::invalid_argument("run_split_block: mode must be Block");
  Setup st = begin(cfg);
  auto& log = st.report.classical_log;
  Eavesdropper eve(cfg.attack);
  Tap* tap = cfg.attack.active() ? &eve : nullptr;
  const std::uint64_t block = cfg.effective_block_size();

  // Phase 1: both blocks travel to Alice, who stores them and samples a
  // fraction for the eavesdropping check.
  std::vector<std::vector<std::optional<Qubit>>> stored(2);
  for (Stream& s : st.streams) {
    auto& held = stored[s.sender];
    held.reserve(block);
    s.out->photons.reserve(block);
    for (std::uint64_t k = 0; k < block; ++k) {
      PhotonRecord rec;
      rec.index = k;
      rec.prep = random_prep(s.rng);
      held.push_back(transmit(s.link.forward, prepare(rec.prep), s.rng, tap, TapContext{k, {}, rec.prep}));
      if (!held.back()) {
        rec.mode = PhotonMode::Lost;
        log.push_back({AnnouncementKind::LostPhoton, s.sender, k, std::nullopt, {}});
      }
      s.out->photons.push_back(rec);
    }
    s.out->photons_sent = block;
  }
  for (Stream& s : st.streams) {
    for (std::uint64_t k = 0; k < block; ++k) {
      PhotonRecord& rec = s.out->photons[k];
      if (rec.mode == PhotonMode::Lost || !s.rng.bernoulli(cfg.check_fraction)) continue;
      rec.mode = PhotonMode::Control;
      score_sample(s, rec, *stored[s.sender][k], log);
    }
  }
  for (Stream& s : st.streams) {
    if (auto why = check_failure(s, cfg.abort_threshold)) {
      st.report.decision = Decision::abort("phase-1 check failed: " + *why);
      break;
    }
  }

  // Phase 2 only if the channel was found clean: encode and return.
  if (st.report.decision.accepted) {
    for (Stream& s : st.streams) {
      for (std::uint64_t k = 0; k < block; ++k) {
        PhotonRecord& rec = s.out->photons[k];
        if (rec.mode != PhotonMode::Idle) continue;
        // Photons left over after the last share bit carry redundancy.
        const bool redundancy = s.done() || s.rng.bernoulli(cfg.redundancy_rate);
        const EncodeOp op = redundancy ? random_op(s.rng) : op_from_bit((*s.message)[s.next_bit]);
        const bool delivered = encode_and_return(s, tap, rec, *stored[s.sender][k], op, redundancy, log);
        if (!delivered && !redundancy && st.report.decision.accepted) {
          st.report.decision = Decision::abort(std::string(sender_name(s.sender)) +
                                               " share bit lost on the return leg");
        }
      }
      if (!s.done() && st.report.decision.accepted) {
        st.report.decision = Decision::abort(std::string(sender_name(s.sender)) +
                                             " block exhausted before the share was encoded");
      }
    }
    for (Stream& s : st.streams) finish_stream(s, log);
  }
  complete(st);
  st.report.attack = eve.take_ledger();
  return std::move(st.report);
}

SplitReport run_split(const SplitConfig& cfg) {
  return cfg.mode == SplitMode::PingPong ? run_split_pingpong(cfg) : run_split_block(cfg);
}

std::string_view to_string(SplitMode mode) { return mode == SplitMode::PingPong ? "pingpong" : "block"; }

SplitMode split_mode_from_string(std::string_view s) {
  if (s == "pingpong") return SplitMode::PingPong;
  if (s == "block") return SplitMode::Block;
  throw std::invalid_argument("unknown split mode '" + std::string(s) + "' (expected pingpong or block)");
}

std::string_view to_string(PhotonMode mode) {
  switch (mode) {
    case PhotonMode::Lost: return "lost";
    case PhotonMode::Control: return "control";
    case PhotonMode::Message: return "message";
    case PhotonMode::Redundancy: return "redundancy";
    case PhotonMode::Idle: return "idle";
  }
  return "idle";
}

PhotonMode photon_mode_from_string(std::string_view s) {
  for (PhotonMode m : {PhotonMode::Lost, PhotonMode::Control, PhotonMode::Message,
                       PhotonMode::Redundancy, PhotonMode::Idle}) {
    if (to_string(m) == s) return m;
  }
  throw std::invalid_argument("unknown photon mode '" + std::string(s) + "'");
}

std::string_view to_string(AnnouncementKind kind) {
  switch (kind) {
    case AnnouncementKind::LostPhoton: return "lost";
    case AnnouncementKind::ControlRequest: return "control-request";
    case AnnouncementKind::SenderState: return "sender-state";
    case AnnouncementKind::RedundancyPositions: return "redundancy-positions";
  }
  return "lost";
}

AnnouncementKind announcement_kind_from_string(std::string_view s) {
  for (AnnouncementKind k : {AnnouncementKind::LostPhoton, AnnouncementKind::ControlRequest,
                             AnnouncementKind::SenderState, AnnouncementKind::RedundancyPositions}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown announcement kind '" + std::string(s) + "'");
}

}  // namespace qss
