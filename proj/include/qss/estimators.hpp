#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>

#include "qss/adversary.hpp"
#include "qss/formulas.hpp"
#include "qss/protocol.hpp"

namespace qss {

enum class CheckKind { One, Two };

// Re-derives a check's error rate from round transcripts (void rounds
// skipped, first check scored on matched bases only) with a 95% Wilson
// interval. Restricted to one agent when `agent` is set. Throws
// std::invalid_argument if no comparable event exists.
RateEstimate estimate_error_rate(std::span<const RoundTranscript> transcripts, CheckKind check,
                                 std::optional<std::size_t> agent = std::nullopt);

// Plug-in mutual information, in bits, between the two components of each
// pair. Empty input gives 0.
double empirical_mutual_information(std::span<const std::pair<Bit, Bit>> samples);

// Mutual information between the bits an eavesdropper guessed and the bits
// the intercepted photons actually carried.
double learned_bit_mutual_information(const AttackLedger& ledger);

}  // namespace qss
