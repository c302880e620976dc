#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qss {

// Inputs of the total-efficiency figure of merit. Fractional values are
// allowed so per-qubit averages (e.g. half a secret bit per qubit) can be
// expressed directly.
struct EfficiencyRecord {
  double secret_bits = 0.0;     // b_s
  double qubits = 0.0;          // q_t
  double classical_bits = 0.0;  // b_t
};

// eta = b_s / (q_t + b_t). Throws std::domain_error on negative counts or a
// zero denominator.
double efficiency(const EfficiencyRecord& rec);

// eta = (1 - delta)^2 when a delta fraction of qubits goes to each of the two
// eavesdropping checks. Requires 0 < delta <= 1/2.
double efficiency_vs_delta(double delta);

struct SurvivalProbability {
  double value = 0.0;      // may underflow to 0 for extreme inputs
  double log_value = 0.0;  // natural log, always finite unless value is exactly 0
  double log10() const;
};

// Probability that an eavesdropper gets through n message bits without
// being caught, when each photon is a control photon with probability p_s
// and a control photon exposes the eavesdropper with probability epsilon:
//   ((1 - p_s) / (1 - (1 - epsilon) p_s))^n
// Evaluated in log space. Requires n >= 1, 0 < p_s <= 1, 0 <= epsilon <= 1.
SurvivalProbability detection_survival(std::uint64_t n, double p_s, double epsilon);

struct ComparisonRow {
  std::string protocol;
  double eta = 0.0;
  std::string note;
};

// Published total efficiencies alongside this protocol's (1 - delta)^2.
// delta = 0 gives the ideal limit of 1.
std::vector<ComparisonRow> comparison_table(double delta);

inline constexpr double kBb84Efficiency = 0.25;
inline constexpr double kHbb99Efficiency = 0.20;
inline constexpr double kKkiEfficiency = 0.20;
// One combined key bit costs a sifted bit from each of two BB84 sessions:
// 1 / (4 + 4) with both sessions' qubits and basis announcements pooled.
inline constexpr double kNaiveQssEfficiency = 0.125;

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

struct RateEstimate {
  double rate = 0.0;
  Interval ci;
  std::uint64_t mismatches = 0;
  std::uint64_t comparable = 0;
};

inline constexpr double kZ95 = 1.959963984540054;

// Point estimate and Wilson score interval. Throws std::invalid_argument when
// comparable == 0 or mismatches > comparable.
RateEstimate wilson_estimate(std::uint64_t mismatches, std::uint64_t comparable,
                             double z = kZ95);

}  // namespace qss
