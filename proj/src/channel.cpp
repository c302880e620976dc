#include "qss/channel.hpp"

#include <cmath>
#include <string>

#include "qss/error.hpp"
#include "qss/rng.hpp"

namespace qss {

void NoiseModel::validate(const std::string& field) const {
  require_probability(field + ".flip", flip_prob);
  require_probability(field + ".phase", phase_prob);
  require_probability(field + ".depol", depol_prob);
}

void ChannelLeg::validate(const std::string& field) const {
  require_probability(field + ".survival", survival_prob);
  noise.validate(field);
}

Qubit apply_noise(const NoiseModel& noise, const Qubit& q, Rng& rng) {
  Qubit out = q;
  if (noise.flip_prob > 0.0 && rng.bernoulli(noise.flip_prob)) out = apply_bit_flip(out);
  if (noise.phase_prob > 0.0 && rng.bernoulli(noise.phase_prob)) out = apply_phase_flip(out);
  if (noise.depol_prob > 0.0 && rng.bernoulli(noise.depol_prob)) out = prepare(random_prep(rng));
  return out;
}

std::optional<Qubit> transmit(const ChannelLeg& leg, const Qubit& q, Rng& rng, Tap* adversary,
                              TapContext ctx) {
  if (leg.survival_prob < 1.0 && !rng.bernoulli(leg.survival_prob)) return std::nullopt;
  Qubit out = q;
  if (adversary != nullptr && leg.tap) {
    ctx.leg = *leg.tap;
    out = adversary->intercept(out, ctx, rng);
  }
  if (!leg.noise.noiseless()) out = apply_noise(leg.noise, out, rng);
  return out;
}

std::string_view to_string(Direction d) { return d == Direction::Forward ? "forward" : "return"; }

Direction direction_from_string(std::string_view s) {
  if (s == "forward") return Direction::Forward;
  if (s == "return") return Direction::Return;
  throw std::invalid_argument("unknown direction '" + std::string(s) + "'");
}

}  // namespace qss
