#include "qkdrt/simulator.hpp"

#include <cmath>
#include <random>

#include "qkdrt/coeffs.hpp"
#include "qkdrt/error.hpp"

namespace qkdrt {

double ChannelParams::transmittance() const { return std::pow(10.0, -loss_db / 10.0); }

void ChannelParams::validate() const {
  if (!(loss_db >= 0.0)) throw Error(ErrorKind::domain, "loss_db must be nonnegative");
  if (!(p_d >= 0.0 && p_d <= 1.0)) throw Error(ErrorKind::domain, "p_d must lie in [0, 1]");
  if (!(f >= 1.0)) throw Error(ErrorKind::domain, "f must be >= 1");
}

DetectionProbs detection_probs(const BlochVector& state, Basis basis, const ChannelParams& ch) {
  // Rotate by the misalignment angle inside the XZ plane.
  const double c = std::cos(ch.theta_mis);
  const double s = std::sin(ch.theta_mis);
  const double x = c * state.x + s * state.z;
  const double z = c * state.z - s * state.x;
  const double proj = basis == Basis::z ? z : x;
  const double q0 = 0.5 * (1.0 + proj);
  const double q1 = 0.5 * (1.0 - proj);

  const double eta = ch.transmittance();
  const double pd = ch.p_d;
  const double lost = 1.0 - eta;
  // Split as: photon hits 0, photon hits 1, photon lost; then dark counts.
  const double both = eta * pd + lost * pd * pd;
  const double dark_only = lost * pd * (1.0 - pd);
  DetectionProbs out;
  out.p0 = eta * q0 * (1.0 - pd) + dark_only + 0.5 * both;
  out.p1 = eta * q1 * (1.0 - pd) + dark_only + 0.5 * both;
  out.p_fail = lost * (1.0 - pd) * (1.0 - pd);
  return out;
}

DetectionProbs detection_probs(double theta, Basis basis, const ChannelParams& ch) {
  return detection_probs(qubit_bloch(theta), basis, ch);
}

ObservedStatistics simulate_asymptotic(const SourceSpec& spec, const ProtocolProbs& probs,
                                       const ChannelParams& ch) {
  ch.validate();
  const auto phases = spec.nominal_phases();
  ObservedStatistics stats;
  stats.mode = StatisticsMode::asymptotic;
  stats.probs = probs;
  for (Setting s : all_settings) {
    const DetectionProbs d = detection_probs(phases[index(s)], Basis::x, ch);
    stats.conditional[index(s)] = {d.p0, d.p1};
  }
  const DetectionProbs z0 = detection_probs(phases[index(Setting::z0)], Basis::z, ch);
  const DetectionProbs z1 = detection_probs(phases[index(Setting::z1)], Basis::z, ch);
  stats.yield_z = 0.5 * ((1.0 - z0.p_fail) + (1.0 - z1.p_fail));
  const double wrong = 0.5 * (z0.p1 + z1.p0);
  stats.e_bit = stats.yield_z > 0.0 ? wrong / stats.yield_z : 0.0;
  return stats;
}

void RunConfig::validate() const {
  if (rounds < std::uint64_t(correlation_length) + 1) {
    throw Error(ErrorKind::domain, "need at least l_c + 1 rounds");
  }
}

namespace {

// 53-bit uniform double in [0, 1).
double uniform(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

}  // namespace

ObservedStatistics simulate_finite(const RunConfig& cfg, const SourceSpec& spec,
                                   const ChannelParams& ch) {
  cfg.validate();
  ch.validate();
  const auto phases = spec.nominal_phases();
  const ProtocolProbs& probs = cfg.probs;

  std::array<double, num_settings> setting_cdf{};
  double acc = 0.0;
  for (Setting s : all_settings) {
    acc += probs.p(s);
    setting_cdf[index(s)] = acc;
  }
  for (std::size_t j = num_settings; j-- > 0;) {
    setting_cdf[j] = 1.0;
    if (probs.p(all_settings[j]) > 0.0) break;
  }
  // [setting][basis] -> (p0, p0 + p1)
  std::array<std::array<std::array<double, 2>, 2>, num_settings> outcome_cdf{};
  for (Setting s : all_settings) {
    for (Basis b : {Basis::z, Basis::x}) {
      const DetectionProbs d = detection_probs(phases[index(s)], b, ch);
      outcome_cdf[index(s)][b == Basis::z ? 0 : 1] = {d.p0, d.p0 + d.p1};
    }
  }

  ObservedStatistics stats;
  stats.mode = StatisticsMode::counts;
  stats.probs = probs;
  const std::uint64_t period = std::uint64_t(cfg.correlation_length) + 1;
  stats.tags.assign(period, TagCounts{});

  std::mt19937_64 rng(cfg.seed);
  std::uint64_t w = 0;
  for (std::uint64_t k = 0; k < cfg.rounds; ++k) {
    TagCounts& tag = stats.tags[w];
    if (++w == period) w = 0;
    ++tag.rounds;

    const double u_setting = uniform(rng);
    std::size_t j = 0;
    while (j + 1 < num_settings && u_setting >= setting_cdf[j]) ++j;
    const bool bob_z = uniform(rng) < probs.p_zb();
    const auto& cdf = outcome_cdf[j][bob_z ? 0 : 1];
    const double u_outcome = uniform(rng);
    int gamma = -1;
    if (u_outcome < cdf[0]) {
      gamma = 0;
    } else if (u_outcome < cdf[1]) {
      gamma = 1;
    }
    if (gamma < 0) continue;

    if (!bob_z) {
      ++tag.x_clicks[j][gamma];
    } else if (j == index(Setting::z0) || j == index(Setting::z1)) {
      ++tag.sifted;
      if (gamma != int(j)) ++tag.sifted_errors;
    }
  }
  return stats;
}

UnitScalar true_virtual_error_rate(const SourceSpec& spec, const ChannelParams& ch) {
  ch.validate();
  const auto phases = spec.nominal_phases();
  const double th0 = phases[index(Setting::z0)];
  const double th1 = phases[index(Setting::z1)];
  const VirtualProbs weights = virtual_probs(th0, th1);
  double mismatch = 0.0;
  double detected = 0.0;
  for (int alpha = 0; alpha < 2; ++alpha) {
    if (weights[alpha] == 0.0) continue;
    const DetectionProbs d = detection_probs(virtual_state(th0, th1, alpha), Basis::x, ch);
    mismatch += weights[alpha] * d[1 - alpha];
    detected += weights[alpha] * (d.p0 + d.p1);
  }
  if (!(detected > 0.0)) return UnitScalar(0.0);
  return UnitScalar::clamped(mismatch / detected);
}

}  // namespace qkdrt
