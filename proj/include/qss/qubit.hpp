#pragma once

#include <complex>
#include <cstdint>
#include <string_view>

#include "qss/bitstring.hpp"

namespace qss {

class Rng;

using Amplitude = std::complex<double>;

namespace tolerance {
inline constexpr double kNormalization = 1e-12;
inline constexpr double kPhaseEquality = 1e-9;
}  // namespace tolerance

// Z is the rectilinear basis {|+z>, |-z>} = {|0>, |1>}; X is the diagonal
// basis {|+x>, |-x>}.
enum class Basis : std::uint8_t { Z, X };

// I encodes bit 0, U = i*sigma_y = |0><1| - |1><0| encodes bit 1.
enum class EncodeOp : std::uint8_t { I, U };

// How a photon was prepared. (Z,0)->|+z>, (Z,1)->|-z>, (X,0)->|+x>, (X,1)->|-x>.
struct PrepRecord {
  Basis basis = Basis::Z;
  Bit bit = 0;

  friend bool operator==(const PrepRecord&, const PrepRecord&) = default;
};

// Pure polarization state of one photon. The constructor renormalizes, so
// every Qubit value is a unit vector.
class Qubit {
 public:
  Qubit() = default;
  Qubit(Amplitude amp0, Amplitude amp1);

  Amplitude amp0() const { return amp0_; }
  Amplitude amp1() const { return amp1_; }
  double norm_squared() const { return std::norm(amp0_) + std::norm(amp1_); }

  // Equality is up to a global phase.
  friend bool operator==(const Qubit& a, const Qubit& b);

 private:
  Amplitude amp0_{1.0, 0.0};
  Amplitude amp1_{0.0, 0.0};
};

// Global phase multiplication, e.g. -1 * |-z>.
Qubit operator*(Amplitude phase, const Qubit& q);

Qubit prepare(PrepRecord rec);
Qubit apply(EncodeOp op, const Qubit& q);
Qubit apply_bit_flip(const Qubit& q);    // sigma_x
Qubit apply_phase_flip(const Qubit& q);  // sigma_z

struct Measurement {
  Bit outcome = 0;
  Qubit collapsed;
};

// Born-rule probability of `outcome` when measuring q in `basis`.
double outcome_probability(const Qubit& q, Basis basis, Bit outcome);

// Projective measurement. Consumes exactly one draw from rng.
Measurement measure(const Qubit& q, Basis basis, Rng& rng);

// |<a|b>| == 1 within tol.
bool equal_up_to_phase(const Qubit& a, const Qubit& b,
                       double tol = tolerance::kPhaseEquality);

constexpr Bit op_bit(EncodeOp op) { return op == EncodeOp::U ? 1 : 0; }
constexpr EncodeOp op_from_bit(Bit b) { return (b & 1U) ? EncodeOp::U : EncodeOp::I; }
constexpr Basis other_basis(Basis b) { return b == Basis::Z ? Basis::X : Basis::Z; }

Basis random_basis(Rng& rng);
PrepRecord random_prep(Rng& rng);
EncodeOp random_op(Rng& rng);

std::string_view to_string(Basis b);
std::string_view to_string(EncodeOp op);
Basis basis_from_string(std::string_view s);
EncodeOp op_from_string(std::string_view s);

}  // namespace qss
