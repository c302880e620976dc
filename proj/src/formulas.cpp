#include "qss/formulas.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qss {

double efficiency(const EfficiencyRecord& rec) {
  if (rec.secret_bits < 0.0 || rec.qubits < 0.0 || rec.classical_bits < 0.0) {
    throw std::domain_error("efficiency: counts must be non-negative");
  }
  const double denom = rec.qubits + rec.classical_bits;
  if (!(denom > 0.0)) throw std::domain_error("efficiency: q_t + b_t must be positive");
  return rec.secret_bits / denom;
}

double efficiency_vs_delta(double delta) {
  if (!(delta > 0.0 && delta <= 0.5)) {
    throw std::domain_error("efficiency_vs_delta: requires 0 < delta <= 1/2");
  }
  return (1.0 - delta) * (1.0 - delta);
}

double SurvivalProbability::log10() const { return log_value / std::log(10.0); }

SurvivalProbability detection_survival(std::uint64_t n, double p_s, double epsilon) {
  if (n < 1) throw std::domain_error("detection_survival: n must be >= 1");
  if (!(p_s > 0.0 && p_s <= 1.0)) throw std::domain_error("detection_survival: requires 0 < p_s <= 1");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::domain_error("detection_survival: requires 0 <= epsilon <= 1");
  }
  if (epsilon == 0.0) return {1.0, 0.0};
  // log1p keeps precision when p_s is small.
  const double log_ratio = std::log1p(-p_s) - std::log1p(-(1.0 - epsilon) * p_s);
  const double log_value = static_cast<double>(n) * log_ratio;
  return {std::exp(log_value), log_value};
}

std::vector<ComparisonRow> comparison_table(double delta) {
  if (!(delta >= 0.0 && delta <= 0.5)) {
    throw std::domain_error("comparison_table: requires 0 <= delta <= 1/2");
  }
  const double ours = delta == 0.0 ? 1.0 : efficiency_vs_delta(delta);
  return {
      {"BB84", kBb84Efficiency, "b_s=0.5, q_t=1, b_t=1"},
      {"HBB99", kHbb99Efficiency, "b_s=0.5, q_t=1, b_t=1.5"},
      {"KKI", kKkiEfficiency, "same accounting as HBB99"},
      {"naive-QKD-QSS", kNaiveQssEfficiency, "two BB84 sessions pooled"},
      {"bidirectional-QSS", ours, "(1-delta)^2"},
  };
}

RateEstimate wilson_estimate(std::uint64_t mismatches, std::uint64_t comparable, double z) {
  if (comparable == 0) throw std::invalid_argument("wilson_estimate: no comparable events");
  if (mismatches > comparable) {
    throw std::invalid_argument("wilson_estimate: mismatches exceed comparable events");
  }
  const double n = static_cast<double>(comparable);
  const double p = static_cast<double>(mismatches) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  // The interval touches 0 (or 1) exactly when no (or every) event mismatched.
  const double lower = mismatches == 0 ? 0.0 : std::max(0.0, centre - half);
  const double upper = mismatches == comparable ? 1.0 : std::min(1.0, centre + half);
  return {p, {lower, upper}, mismatches, comparable};
}

}  // namespace qss
