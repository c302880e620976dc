#include "qss/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace qss {

RateEstimate estimate_error_rate(std::span<const RoundTranscript> transcripts, CheckKind check,
                                 std::optional<std::size_t> agent) {
  std::uint64_t comparable = 0;
  std::uint64_t mismatches = 0;
  for (const RoundTranscript& round : transcripts) {
    if (round.void_round) continue;
    if (check == CheckKind::Two && !round.check2) continue;
    for (std::size_t i = 0; i < round.agents.size(); ++i) {
      if (agent && *agent != i) continue;
      const AgentRound& a = round.agents[i];
      if (check == CheckKind::One) {
        const auto* c = std::get_if<AgentCheck>(&a.event);
        if (c == nullptr || c->basis != a.prep.basis) continue;
        ++comparable;
        mismatches += (c->outcome != a.prep.bit);
      } else {
        const auto* op = std::get_if<EncodeOp>(&a.event);
        if (op == nullptr || !a.dealer_outcome) continue;
        ++comparable;
        mismatches += (decode_round(a.prep, *a.dealer_outcome) != *op);
      }
    }
  }
  return wilson_estimate(mismatches, comparable);
}

double empirical_mutual_information(std::span<const std::pair<Bit, Bit>> samples) {
  if (samples.empty()) return 0.0;
  std::array<std::array<double, 2>, 2> joint{};
  for (const auto& [x, y] : samples) joint[x & 1U][y & 1U] += 1.0;
  const double n = static_cast<double>(samples.size());
  std::array<double, 2> px{}, py{};
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      joint[x][y] /= n;
      px[x] += joint[x][y];
      py[y] += joint[x][y];
    }
  }
  double mi = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      if (joint[x][y] > 0.0) mi += joint[x][y] * std::log2(joint[x][y] / (px[x] * py[y]));
    }
  }
  return std::max(0.0, mi);
}

double learned_bit_mutual_information(const AttackLedger& ledger) {
  std::vector<std::pair<Bit, Bit>> samples;
  samples.reserve(ledger.learned_bits.size());
  for (const auto& r : ledger.learned_bits) samples.emplace_back(r.reference.bit, r.guessed);
  return empirical_mutual_information(samples);
}

}  // namespace qss
