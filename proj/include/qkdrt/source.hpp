#pragma once

// Device model: encoding phases, the side-channel parameter epsilon^U and
// the protocol's choice probabilities.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

#include "qkdrt/gmath.hpp"

namespace qkdrt {

inline constexpr double pi = 3.14159265358979323846;

enum class Setting : std::size_t { z0 = 0, z1 = 1, x0 = 2, x1 = 3 };
inline constexpr std::size_t num_settings = 4;
inline constexpr std::array<Setting, num_settings> all_settings = {
    Setting::z0, Setting::z1, Setting::x0, Setting::x1};

constexpr std::size_t index(Setting s) { return static_cast<std::size_t>(s); }
const char* to_string(Setting s);

enum class Protocol { bb84, three_state };
const char* to_string(Protocol p);
Protocol parse_protocol(const std::string& name);

/// True if `s` is emitted by `protocol`.
bool emits(Protocol protocol, Setting s);

enum class Basis { z, x };

/// XZ-plane Bloch coordinates. `pure` marks a normalized single-qubit state;
/// linear combinations produced while solving are flagged impure.
struct BlochVector {
  double x = 0.0;
  double z = 1.0;
  bool pure = true;

  double norm() const;
};

/// Bloch vector of cos(θ/2)|0_Z⟩ + sin(θ/2)|1_Z⟩.
BlochVector qubit_bloch(double theta);

/// Per-setting phase intervals [lo, hi] in radians.
struct PhaseRanges {
  std::array<double, num_settings> lo{};
  std::array<double, num_settings> hi{};

  double lower(Setting s) const { return lo[index(s)]; }
  double upper(Setting s) const { return hi[index(s)]; }

  /// Degenerate intervals at the given phases.
  static PhaseRanges point(const std::array<double, num_settings>& phases);
  /// [nominal − half_width, nominal + half_width] for every setting.
  static PhaseRanges around(const std::array<double, num_settings>& nominal, double half_width);

  /// Throws ErrorKind::domain if any lo > hi.
  void validate() const;
  /// Whether the ranges sit inside the sectors where the analytic corner
  /// rules hold: 0Z ⊂ [−π/6, π/6], 1Z ⊂ [5π/6, 7π/6], 0X ⊂ [π/3, 2π/3],
  /// 1X ⊂ [4π/3, 5π/3]. Only the settings the protocol uses are checked.
  bool in_analytic_sectors(Protocol protocol) const;
};

/// Imperfection parameters of the transmitter.
struct SourceSpec {
  double delta = 0.063;      // state-preparation flaw magnitude
  double cap_delta = 0.03;   // phase fluctuation half-width
  double epsilon_u = 0.0;    // side-channel bound fed to the phase-error estimate
  std::uint32_t correlation_length = 0;

  double kappa() const { return 1.0 + delta / pi; }
  /// θ̂ = (0, κπ, κπ/2, 3κπ/2).
  std::array<double, num_settings> nominal_phases() const;
  PhaseRanges ranges() const { return PhaseRanges::around(nominal_phases(), cap_delta); }
  void validate() const;
};

/// Alice's setting and Bob's basis probabilities.
///
/// Z settings share p_ZA evenly. In bb84 the X settings share p_XA evenly; in
/// the three-state protocol all of p_XA goes to 0X. The efficient-scheme limit
/// is p_ZA = p_ZB = 1.
class ProtocolProbs {
 public:
  ProtocolProbs() = default;
  ProtocolProbs(Protocol protocol, double p_za, double p_zb);

  /// Validates an explicit per-setting distribution: normalized, p_0Z = p_1Z,
  /// X settings split as described above.
  static ProtocolProbs from_settings(Protocol protocol,
                                     const std::array<double, num_settings>& p, double p_zb);
  static ProtocolProbs efficient(Protocol protocol) { return {protocol, 1.0, 1.0}; }

  Protocol protocol() const { return protocol_; }
  double p_za() const { return p_za_; }
  double p_xa() const { return 1.0 - p_za_; }
  double p_zb() const { return p_zb_; }
  double p_xb() const { return 1.0 - p_zb_; }
  double p(Setting s) const;
  bool efficient_limit() const { return p_za_ == 1.0 && p_zb_ == 1.0; }

  friend bool operator==(const ProtocolProbs&, const ProtocolProbs&) = default;

 private:
  Protocol protocol_ = Protocol::bb84;
  double p_za_ = 1.0;
  double p_zb_ = 1.0;
};

/// ε^U = 1 − (1 − ε′)^(l_c + 1).
UnitScalar epsilon_effective(UnitScalar eps_prime, std::uint32_t correlation_length);

/// Trojan-horse bound from the maximum back-reflected intensity: min(ν_max, 1).
UnitScalar tha_epsilon_bound(double nu_max);

/// 1 − (1 − ε_mode)(1 − ε_tha).
UnitScalar combine_side_channels(UnitScalar eps_mode, UnitScalar eps_tha);

/// Virtual-state probabilities normalized by p_ZA.
struct VirtualProbs {
  double x0 = 0.5;
  double x1 = 0.5;

  double operator[](int alpha) const { return alpha == 0 ? x0 : x1; }
};

/// Exact ½[1 ± cos((θ_0Z − θ_1Z)/2)].
VirtualProbs virtual_probs(double theta_z0, double theta_z1);

/// Worst case of virtual_probs over the 0Z/1Z ranges.
VirtualProbs virtual_prob_bounds(const PhaseRanges& ranges);

}  // namespace qkdrt
