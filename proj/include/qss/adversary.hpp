#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "qss/channel.hpp"
#include "qss/qubit.hpp"

namespace qss {

enum class AttackKind : std::uint8_t {
  None,
  InterceptResendRandomBasis,
  InterceptResendFixedBasis,
  // An inside agent (Bob*) running random-basis intercept-resend on every
  // other agent's legs. `dishonest_agent` is his own index; his own legs are
  // never tapped.
  DishonestAgent,
};

enum class LegSelection : std::uint8_t { Forward, Return, Both };

struct AttackStrategy {
  AttackKind kind = AttackKind::None;
  Basis basis = Basis::Z;            // InterceptResendFixedBasis only
  std::vector<std::size_t> targets;  // intercept-resend kinds: parties whose legs are tapped
  std::size_t dishonest_agent = 0;   // DishonestAgent only
  LegSelection legs = LegSelection::Forward;

  static AttackStrategy none() { return {}; }
  static AttackStrategy random_basis(std::vector<std::size_t> targets,
                                     LegSelection legs = LegSelection::Forward);
  static AttackStrategy fixed_basis(Basis basis, std::vector<std::size_t> targets,
                                    LegSelection legs = LegSelection::Forward);
  static AttackStrategy dishonest(std::size_t agent, LegSelection legs = LegSelection::Forward);

  bool active() const { return kind != AttackKind::None; }
  bool taps(std::size_t party, Direction direction) const;
  void validate(std::size_t n_parties) const;

  friend bool operator==(const AttackStrategy&, const AttackStrategy&) = default;
};

struct InterceptRecord {
  std::uint64_t round = 0;
  LegId leg;
  Basis basis = Basis::Z;  // basis the adversary measured in
  Bit guessed = 0;
  PrepRecord reference;    // what the photon actually carried

  bool correct() const { return guessed == reference.bit; }

  friend bool operator==(const InterceptRecord&, const InterceptRecord&) = default;
};

// Everything an adversary learned during one run. One entry per intercepted
// photon, so intercept_count() is the number of eavesdropped bits.
struct AttackLedger {
  std::vector<InterceptRecord> learned_bits;

  std::size_t intercept_count() const { return learned_bits.size(); }
  bool tapped(std::uint64_t round, const LegId& leg) const;
  // Fraction of guesses that equal the carried bit; 0 when nothing was intercepted.
  double guess_accuracy() const;
  void merge(const AttackLedger& other);

  friend bool operator==(const AttackLedger&, const AttackLedger&) = default;
};

struct InterceptResult {
  Qubit resent;
  Bit guessed = 0;
};

// Measure in `basis`, keep the outcome as the guess, resend the collapsed state.
InterceptResult intercept_resend(const Qubit& q, Basis basis, Rng& rng);

// Binary Shannon entropy H(eps) in bits, with 0*log2(0) = 0. Upper bound on
// the information an eavesdropper gains per qubit while inducing error rate
// eps. Throws std::domain_error outside [0, 1].
double information_bound(double epsilon);

// Intercept-resend adversary driven by an AttackStrategy. Which legs it sits
// on is decided by the protocol (ChannelLeg::tap); this class only chooses the
// measurement basis and keeps the ledger.
class Eavesdropper final : public Tap {
 public:
  explicit Eavesdropper(AttackStrategy strategy) : strategy_(std::move(strategy)) {}

  Qubit intercept(const Qubit& q, const TapContext& ctx, Rng& rng) override;

  const AttackStrategy& strategy() const { return strategy_; }
  const AttackLedger& ledger() const { return ledger_; }
  AttackLedger take_ledger() { return std::move(ledger_); }

 private:
  AttackStrategy strategy_;
  AttackLedger ledger_;
};

std::string_view to_string(AttackKind kind);
AttackKind attack_kind_from_string(std::string_view s);
std::string_view to_string(LegSelection legs);
LegSelection leg_selection_from_string(std::string_view s);

}  // namespace qss
