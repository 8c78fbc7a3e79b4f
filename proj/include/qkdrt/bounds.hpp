#pragma once

// Phase-error bound assembly, per-tag bounds, the tag-averaging chain and
// the secret-key rate.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "qkdrt/coeffs.hpp"
#include "qkdrt/source.hpp"

namespace qkdrt {

/// [setting][γ] table, γ being Bob's X-basis outcome.
template <typename T>
using SettingTable = std::array<std::array<T, 2>, num_settings>;

/// Counts for the rounds carrying one tag w (or for all rounds).
struct TagCounts {
  std::uint64_t rounds = 0;
  SettingTable<std::uint64_t> x_clicks{};  // N_{j,γX}
  std::uint64_t sifted = 0;                // N_det^(Z)
  std::uint64_t sifted_errors = 0;

  TagCounts& operator+=(const TagCounts& other);
  friend bool operator==(const TagCounts&, const TagCounts&) = default;
};

enum class StatisticsMode { asymptotic, counts };

/// Observed data for one parameter point.
///
/// Asymptotic mode carries conditional probabilities P(γ | j, Bob chose X),
/// the Z-basis yield given both parties chose Z, and e_bit. Counts mode
/// carries one TagCounts per tag; the aggregate is their sum.
struct ObservedStatistics {
  StatisticsMode mode = StatisticsMode::asymptotic;
  ProtocolProbs probs;

  SettingTable<double> conditional{};
  double yield_z = 0.0;
  double e_bit = 0.0;

  std::vector<TagCounts> tags;

  TagCounts aggregate() const;
  /// N_{j,γX} / (N p_j p_XB) for the given block, clamped to [0, 1].
  SettingTable<double> estimate(const TagCounts& block) const;
  /// Joint Z-basis detection rate (the Y_Z of the key-rate formula).
  double joint_yield() const;
  double bit_error_rate() const;

  void validate() const;
};

/// Everything the bound needs apart from the data.
struct BoundParameters {
  CoefficientSet coeff_upper;
  VirtualProbs virtual_upper;
  UnitScalar epsilon_u;
};

/// G+(y_outer, sqrt(1 − ε^U)) with y_outer = Σ_{α≠γ} p̄_α^U · Σ_j c^U[α][j]·G±(q[j][γ]).
/// This is N_ph^U / (N p_ZA p_ZB).
UnitScalar phase_error_fraction(const SettingTable<double>& q, const BoundParameters& params);

/// Upper bound e_ph^U on the phase-error rate of the aggregate sifted key.
UnitScalar phase_error_bound(const ObservedStatistics& stats, const BoundParameters& params);

/// e_{ph,w}^U for each tag, using each tag's actual round count.
std::vector<double> per_tag_bounds(const ObservedStatistics& stats, const BoundParameters& params);

struct SecretFractionChain {
  double lhs = 0.0;  // Σ_w q_w h(e_w)
  double mid = 0.0;  // h(Σ_w q_w e_w)
  double rhs = 0.0;  // h(e_ph^U)
};

SecretFractionChain secret_fraction_check(const std::vector<double>& e_per_tag,
                                          const std::vector<double>& weights, double e_ph_u);

struct KeyRateReport {
  double y_z = 0.0;
  double e_bit = 0.0;
  double e_ph_u = 0.0;
  std::vector<double> e_ph_u_per_tag;
  std::vector<double> tag_weights;  // q_w = N_det,w / N_det
  double rate = 0.0;
  double f = 1.16;
};

/// R = max(0, Y_Z [1 − h(e_ph) − f h(e_bit)]); error rates above ½ count as ½.
KeyRateReport key_rate(double y_z, UnitScalar e_ph_u, UnitScalar e_bit, double f);

/// Bound parameters for a source and protocol: corner bounds over the source's
/// phase ranges and ε^U raised to the correlation length.
BoundParameters make_bound_parameters(Protocol protocol, const SourceSpec& source);

/// Full pipeline from observations to a report, including per-tag values
/// whenever counts carry more than one tag.
KeyRateReport evaluate(const ObservedStatistics& stats, const BoundParameters& params, double f);

}  // namespace qkdrt
