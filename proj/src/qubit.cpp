#include "qss/qubit.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qss/rng.hpp"

namespace qss {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Amplitudes of the basis eigenstate for `outcome` in `basis`.
std::pair<double, double> eigenvector(Basis basis, Bit outcome) {
  if (basis == Basis::Z) return outcome ? std::pair{0.0, 1.0} : std::pair{1.0, 0.0};
  return outcome ? std::pair{kInvSqrt2, -kInvSqrt2} : std::pair{kInvSqrt2, kInvSqrt2};
}

}  // namespace

Qubit::Qubit(Amplitude amp0, Amplitude amp1) : amp0_(amp0), amp1_(amp1) {
  const double n2 = norm_squared();
  if (!(n2 > 0.0) || !std::isfinite(n2)) {
    throw std::invalid_argument("qubit amplitudes must form a nonzero finite vector");
  }
  if (std::abs(n2 - 1.0) > tolerance::kNormalization) {
    const double n = std::sqrt(n2);
    amp0_ /= n;
    amp1_ /= n;
  }
}

bool operator==(const Qubit& a, const Qubit& b) { return equal_up_to_phase(a, b); }

Qubit operator*(Amplitude phase, const Qubit& q) {
  return Qubit(phase * q.amp0(), phase * q.amp1());
}

Qubit prepare(PrepRecord rec) {
  const auto [a0, a1] = eigenvector(rec.basis, rec.bit);
  return Qubit(a0, a1);
}

Qubit apply(EncodeOp op, const Qubit& q) {
  if (op == EncodeOp::I) return q;
  // U = [[0, 1], [-1, 0]]
  return Qubit(q.amp1(), -q.amp0());
}

Qubit apply_bit_flip(const Qubit& q) { return Qubit(q.amp1(), q.amp0()); }

Qubit apply_phase_flip(const Qubit& q) { return Qubit(q.amp0(), -q.amp1()); }

double outcome_probability(const Qubit& q, Basis basis, Bit outcome) {
  const auto [e0, e1] = eigenvector(basis, outcome);
  // Eigenvectors are real, so <e|q> = e0*a0 + e1*a1.
  return std::norm(e0 * q.amp0() + e1 * q.amp1());
}

Measurement measure(const Qubit& q, Basis basis, Rng& rng) {
  double p0 = outcome_probability(q, basis, 0);
  if (p0 > 1.0 - tolerance::kNormalization) p0 = 1.0;
  if (p0 < tolerance::kNormalization) p0 = 0.0;
  const Bit outcome = rng.uniform() < p0 ? 0 : 1;
  return {outcome, prepare({basis, outcome})};
}

bool equal_up_to_phase(const Qubit& a, const Qubit& b, double tol) {
  const Amplitude overlap = std::conj(a.amp0()) * b.amp0() + std::conj(a.amp1()) * b.amp1();
  return std::abs(std::abs(overlap) - 1.0) <= tol;
}

Basis random_basis(Rng& rng) { return rng.bit() ? Basis::X : Basis::Z; }

PrepRecord random_prep(Rng& rng) {
  const Basis basis = random_basis(rng);
  return {basis, rng.bit()};
}

EncodeOp random_op(Rng& rng) { return op_from_bit(rng.bit()); }

std::string_view to_string(Basis b) { return b == Basis::Z ? "Z" : "X"; }

std::string_view to_string(EncodeOp op) { return op == EncodeOp::I ? "I" : "U"; }

Basis basis_from_string(std::string_view s) {
  if (s == "Z" || s == "z") return Basis::Z;
  if (s == "X" || s == "x") return Basis::X;
  throw std::invalid_argument("unknown basis '" + std::string(s) + "' (expected Z or X)");
}

EncodeOp op_from_string(std::string_view s) {
  if (s == "I") return EncodeOp::I;
  if (s == "U") return EncodeOp::U;
  throw std::invalid_argument("unknown operation '" + std::string(s) + "' (expected I or U)");
}

}  // namespace qss
