#pragma once

// Honest-channel simulation: exact expectations, seeded Monte Carlo runs of
// the tagged protocol, and the true virtual phase-error rate.

#include <cstdint>
#include <string>

#include "qkdrt/bounds.hpp"
#include "qkdrt/source.hpp"

namespace qkdrt {

inline constexpr const char* channel_model_id = "single-photon-threshold-v1";
inline constexpr const char* rng_id = "mt19937_64";

/// Lossy channel followed by two threshold detectors.
struct ChannelParams {
  double loss_db = 0.0;    // overall loss, detector efficiency included
  double p_d = 1e-8;       // dark-count probability per detector and gate
  double theta_mis = 0.0;  // misalignment rotation in the XZ plane
  double f = 1.16;         // error-correction efficiency

  double transmittance() const;
  void validate() const;
};

struct DetectionProbs {
  double p0 = 0.0;
  double p1 = 0.0;
  double p_fail = 1.0;

  double operator[](int gamma) const { return gamma == 0 ? p0 : p1; }
};

/// Outcome distribution for a state with Bloch vector `state` measured in
/// `basis`. A photon reaches detector γ with probability η·q_γ; each
/// detector also fires independently with probability p_d; double clicks are
/// assigned to either bit with probability ½.
DetectionProbs detection_probs(const BlochVector& state, Basis basis, const ChannelParams& ch);
DetectionProbs detection_probs(double theta, Basis basis, const ChannelParams& ch);

/// Expected statistics when Alice emits the nominal phases.
ObservedStatistics simulate_asymptotic(const SourceSpec& spec, const ProtocolProbs& probs,
                                       const ChannelParams& ch);

struct RunConfig {
  std::uint64_t rounds = 1'000'000;
  std::uint64_t seed = 1;
  std::uint32_t correlation_length = 0;
  ProtocolProbs probs{Protocol::bb84, 0.5, 0.5};

  void validate() const;
};

/// Runs `rounds` sequential rounds, tagging round k (0-based) with
/// k mod (l_c + 1). Deterministic in (seed, config).
ObservedStatistics simulate_finite(const RunConfig& cfg, const SourceSpec& spec,
                                   const ChannelParams& ch);

/// Phase-error rate the virtual X-basis protocol would actually see on this
/// channel with the nominal Z states.
UnitScalar true_virtual_error_rate(const SourceSpec& spec, const ChannelParams& ch);

}  // namespace qkdrt
