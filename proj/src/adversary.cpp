#include "qss/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qss/error.hpp"
#include "qss/rng.hpp"

namespace qss {
namespace {

bool selects(LegSelection legs, Direction d) {
  switch (legs) {
    case LegSelection::Forward: return d == Direction::Forward;
    case LegSelection::Return: return d == Direction::Return;
    case LegSelection::Both: return true;
  }
  return false;
}

}  // namespace

AttackStrategy AttackStrategy::random_basis(std::vector<std::size_t> targets, LegSelection legs) {
  AttackStrategy s;
  s.kind = AttackKind::InterceptResendRandomBasis;
  s.targets = std::move(targets);
  s.legs = legs;
  return s;
}

AttackStrategy AttackStrategy::fixed_basis(Basis basis, std::vector<std::size_t> targets,
                                           LegSelection legs) {
  AttackStrategy s;
  s.kind = AttackKind::InterceptResendFixedBasis;
  s.basis = basis;
  s.targets = std::move(targets);
  s.legs = legs;
  return s;
}

AttackStrategy AttackStrategy::dishonest(std::size_t agent, LegSelection legs) {
  AttackStrategy s;
  s.kind = AttackKind::DishonestAgent;
  s.dishonest_agent = agent;
  s.legs = legs;
  return s;
}

bool AttackStrategy::taps(std::size_t party, Direction direction) const {
  if (!selects(legs, direction)) return false;
  switch (kind) {
    case AttackKind::None: return false;
    case AttackKind::InterceptResendRandomBasis:
    case AttackKind::InterceptResendFixedBasis:
      return std::find(targets.begin(), targets.end(), party) != targets.end();
    case AttackKind::DishonestAgent: return party != dishonest_agent;
  }
  return false;
}

void AttackStrategy::validate(std::size_t n_parties) const {
  switch (kind) {
    case AttackKind::None: return;
    case AttackKind::InterceptResendRandomBasis:
    case AttackKind::InterceptResendFixedBasis:
      if (targets.empty()) throw ConfigError("attack.targets", "at least one target is required");
      for (std::size_t t : targets) {
        if (t >= n_parties) {
          throw ConfigError("attack.targets", "target " + std::to_string(t) +
                                                  " is out of range for " +
                                                  std::to_string(n_parties) + " parties");
        }
      }
      return;
    case AttackKind::DishonestAgent:
      if (dishonest_agent >= n_parties) {
        throw ConfigError("attack.dishonest_agent",
                          "agent " + std::to_string(dishonest_agent) + " is out of range for " +
                              std::to_string(n_parties) + " parties");
      }
      if (!targets.empty()) {
        throw ConfigError("attack.targets",
                          "a dishonest agent taps every other agent's legs; targets must be empty");
      }
      return;
  }
}

bool AttackLedger::tapped(std::uint64_t round, const LegId& leg) const {
  return std::any_of(learned_bits.begin(), learned_bits.end(), [&](const InterceptRecord& r) {
    return r.round == round && r.leg == leg;
  });
}

double AttackLedger::guess_accuracy() const {
  if (learned_bits.empty()) return 0.0;
  const auto hits = std::count_if(learned_bits.begin(), learned_bits.end(),
                                  [](const InterceptRecord& r) { return r.correct(); });
  return static_cast<double>(hits) / static_cast<double>(learned_bits.size());
}

void AttackLedger::merge(const AttackLedger& other) {
  learned_bits.insert(learned_bits.end(), other.learned_bits.begin(), other.learned_bits.end());
}

InterceptResult intercept_resend(const Qubit& q, Basis basis, Rng& rng) {
  const Measurement m = measure(q, basis, rng);
  return {m.collapsed, m.outcome};
}

double information_bound(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::domain_error("information_bound: error rate must lie in [0, 1]");
  }
  auto term = [](double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; };
  return term(epsilon) + term(1.0 - epsilon);
}

Qubit Eavesdropper::intercept(const Qubit& q, const TapContext& ctx, Rng& rng) {
  const Basis basis = strategy_.kind == AttackKind::InterceptResendFixedBasis
                          ? strategy_.basis
                          : random_basis(rng);
  InterceptResult r = intercept_resend(q, basis, rng);
  ledger_.learned_bits.push_back({ctx.round, ctx.leg, basis, r.guessed, ctx.reference});
  return r.resent;
}

std::string_view to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::None: return "none";
    case AttackKind::InterceptResendRandomBasis: return "ir-random";
    case AttackKind::InterceptResendFixedBasis: return "ir-fixed";
    case AttackKind::DishonestAgent: return "dishonest";
  }
  return "none";
}

AttackKind attack_kind_from_string(std::string_view s) {
  if (s == "none") return AttackKind::None;
  if (s == "ir-random") return AttackKind::InterceptResendRandomBasis;
  if (s == "ir-fixed") return AttackKind::InterceptResendFixedBasis;
  if (s == "dishonest") return AttackKind::DishonestAgent;
  throw std::invalid_argument("unknown attack kind '" + std::string(s) +
                              "' (expected none, ir-random, ir-fixed or dishonest)");
}

std::string_view to_string(LegSelection legs) {
  switch (legs) {
    case LegSelection::Forward: return "forward";
    case LegSelection::Return: return "return";
    case LegSelection::Both: return "both";
  }
  return "forward";
}

LegSelection leg_selection_from_string(std::string_view s) {
  if (s == "forward") return LegSelection::Forward;
  if (s == "return") return LegSelection::Return;
  if (s == "both") return LegSelection::Both;
  throw std::invalid_argument("unknown leg selection '" + std::string(s) +
                              "' (expected forward, return or both)");
}

}  // namespace qss
