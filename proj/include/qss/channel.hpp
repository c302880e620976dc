#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "qss/qubit.hpp"

namespace qss {

class Rng;

// Independent per-traversal noise, applied in the order flip, phase, depol.
struct NoiseModel {
  double flip_prob = 0.0;   // sigma_x
  double phase_prob = 0.0;  // sigma_z
  double depol_prob = 0.0;  // replace with a uniformly random protocol state

  bool noiseless() const { return flip_prob == 0.0 && phase_prob == 0.0 && depol_prob == 0.0; }
  void validate(const std::string& field) const;

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

// Forward is the first traversal of a photon (away from whoever prepared it),
// Return is the trip back.
enum class Direction : std::uint8_t { Forward, Return };

struct LegId {
  std::size_t party = 0;
  Direction direction = Direction::Forward;

  friend bool operator==(const LegId&, const LegId&) = default;
};

struct ChannelLeg {
  double survival_prob = 1.0;
  NoiseModel noise;
  // Set when an adversary is attached to this leg.
  std::optional<LegId> tap;

  bool ideal() const { return survival_prob == 1.0 && noise.noiseless(); }
  void validate(const std::string& field) const;

  friend bool operator==(const ChannelLeg&, const ChannelLeg&) = default;
};

// What an adversary sees about the photon it intercepts. `reference` is the
// protocol state the photon nominally carries on this leg (the preparation
// basis and the bit in that basis); it is simulator bookkeeping used to score
// the adversary's guesses, not information the adversary acts on.
struct TapContext {
  std::uint64_t round = 0;
  LegId leg;
  PrepRecord reference;
};

class Tap {
 public:
  virtual ~Tap() = default;
  virtual Qubit intercept(const Qubit& q, const TapContext& ctx, Rng& rng) = 0;
};

Qubit apply_noise(const NoiseModel& noise, const Qubit& q, Rng& rng);

// Sends q down one leg. Returns nullopt when the photon is lost. Order:
// loss sampling, adversary (if the leg is tapped and one is supplied), noise.
std::optional<Qubit> transmit(const ChannelLeg& leg, const Qubit& q, Rng& rng,
                              Tap* adversary = nullptr, TapContext ctx = {});

std::string_view to_string(Direction d);
Direction direction_from_string(std::string_view s);

}  // namespace qss
