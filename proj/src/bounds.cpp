#include "qkdrt/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qkdrt/error.hpp"
#include "qkdrt/gmath.hpp"

namespace qkdrt {

TagCounts& TagCounts::operator+=(const TagCounts& other) {
  rounds += other.rounds;
  for (std::size_t j = 0; j < num_settings; ++j) {
    for (std::size_t g = 0; g < 2; ++g) x_clicks[j][g] += other.x_clicks[j][g];
  }
  sifted += other.sifted;
  sifted_errors += other.sifted_errors;
  return *this;
}

TagCounts ObservedStatistics::aggregate() const {
  TagCounts total;
  for (const TagCounts& t : tags) total += t;
  return total;
}

SettingTable<double> ObservedStatistics::estimate(const TagCounts& block) const {
  SettingTable<double> q{};
  for (Setting s : all_settings) {
    const double expected = double(block.rounds) * probs.p(s) * probs.p_xb();
    for (std::size_t g = 0; g < 2; ++g) {
      const auto n = block.x_clicks[index(s)][g];
      if (expected > 0.0) {
        q[index(s)][g] = std::clamp(double(n) / expected, 0.0, 1.0);
      } else if (n != 0) {
        throw Error(ErrorKind::inconsistent_protocol,
                    std::string("X-basis clicks recorded for setting ") + to_string(s) +
                        " which has zero probability");
      }
    }
  }
  return q;
}

double ObservedStatistics::joint_yield() const {
  if (mode == StatisticsMode::asymptotic) return probs.p_za() * probs.p_zb() * yield_z;
  const TagCounts t = aggregate();
  return t.rounds == 0 ? 0.0 : double(t.sifted) / double(t.rounds);
}

double ObservedStatistics::bit_error_rate() const {
  if (mode == StatisticsMode::asymptotic) return e_bit;
  const TagCounts t = aggregate();
  return t.sifted == 0 ? 0.0 : double(t.sifted_errors) / double(t.sifted);
}

void ObservedStatistics::validate() const {
  if (mode == StatisticsMode::asymptotic) {
    for (const auto& row : conditional) {
      for (double v : row) UnitScalar{v};
    }
    UnitScalar{yield_z};
    UnitScalar{e_bit};
    return;
  }
  if (tags.empty()) throw Error(ErrorKind::schema, "counts statistics need at least one tag block");
  for (const TagCounts& t : tags) {
    if (t.sifted_errors > t.sifted) {
      throw Error(ErrorKind::schema, "sifted errors exceed sifted key length");
    }
    std::uint64_t clicks = t.sifted;
    for (const auto& row : t.x_clicks) clicks += row[0] + row[1];
    if (clicks > t.rounds) throw Error(ErrorKind::schema, "more detections than rounds in a tag");
  }
}

namespace {

void check_protocol(const ObservedStatistics& stats, const BoundParameters& params) {
  if (stats.probs.protocol() != params.coeff_upper.protocol) {
    std::ostringstream msg;
    msg << "coefficients are for " << to_string(params.coeff_upper.protocol)
        << " but the statistics come from " << to_string(stats.probs.protocol());
    throw Error(ErrorKind::inconsistent_protocol, msg.str());
  }
  if (stats.mode != StatisticsMode::counts) return;
  for (int alpha = 0; alpha < 2; ++alpha) {
    for (Setting s : all_settings) {
      if (params.coeff_upper(alpha, s) != 0.0 &&
          (stats.probs.p(s) == 0.0 || stats.probs.p_xb() == 0.0)) {
        throw Error(ErrorKind::inconsistent_protocol,
                    std::string("bound uses setting ") + to_string(s) +
                        " but no X-basis data can exist for it");
      }
    }
  }
}

UnitScalar rate_from_fraction(UnitScalar fraction, double scale, double detected) {
  if (!(detected > 0.0)) throw Error(ErrorKind::empty_sifted_key, "sifted key is empty");
  return UnitScalar::clamped(scale * fraction.value() / detected);
}

}  // namespace

UnitScalar phase_error_fraction(const SettingTable<double>& q, const BoundParameters& params) {
  const UnitScalar z(std::sqrt(1.0 - params.epsilon_u.value()));
  double y_outer = 0.0;
  for (int alpha = 0; alpha < 2; ++alpha) {
    const int gamma = 1 - alpha;
    double inner = 0.0;
    for (Setting s : all_settings) {
      const double c = params.coeff_upper(alpha, s);
      if (c == 0.0) continue;
      const auto y = UnitScalar::clamped(q[index(s)][gamma]);
      inner += c > 0.0 ? c * g_plus(y, z) : c * g_minus(y, z);
    }
    y_outer += params.virtual_upper[alpha] * inner;
  }
  return g_plus(UnitScalar::clamped(y_outer), z);
}

UnitScalar phase_error_bound(const ObservedStatistics& stats, const BoundParameters& params) {
  check_protocol(stats, params);
  if (stats.mode == StatisticsMode::asymptotic) {
    return rate_from_fraction(phase_error_fraction(stats.conditional, params), 1.0,
                              stats.yield_z);
  }
  const TagCounts total = stats.aggregate();
  const double scale = double(total.rounds) * stats.probs.p_za() * stats.probs.p_zb();
  return rate_from_fraction(phase_error_fraction(stats.estimate(total), params), scale,
                            double(total.sifted));
}

std::vector<double> per_tag_bounds(const ObservedStatistics& stats,
                                   const BoundParameters& params) {
  check_protocol(stats, params);
  if (stats.mode == StatisticsMode::asymptotic) {
    return {phase_error_bound(stats, params).value()};
  }
  std::vector<double> out;
  out.reserve(stats.tags.size());
  for (const TagCounts& t : stats.tags) {
    const double scale = double(t.rounds) * stats.probs.p_za() * stats.probs.p_zb();
    out.push_back(
        rate_from_fraction(phase_error_fraction(stats.estimate(t), params), scale, double(t.sifted))
            .value());
  }
  return out;
}

SecretFractionChain secret_fraction_check(const std::vector<double>& e_per_tag,
                                          const std::vector<double>& weights, double e_ph_u) {
  if (e_per_tag.size() != weights.size()) {
    throw Error(ErrorKind::domain, "one weight per tag is required");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorKind::domain, "tag weights must sum to 1");
  SecretFractionChain chain;
  double mean = 0.0;
  for (std::size_t w = 0; w < weights.size(); ++w) {
    chain.lhs += weights[w] * binary_entropy(UnitScalar(e_per_tag[w])).value();
    mean += weights[w] * e_per_tag[w];
  }
  chain.mid = binary_entropy(UnitScalar::clamped(mean));
  chain.rhs = binary_entropy(UnitScalar(e_ph_u));
  return chain;
}

KeyRateReport key_rate(double y_z, UnitScalar e_ph_u, UnitScalar e_bit, double f) {
  if (!(f >= 1.0)) throw Error(ErrorKind::domain, "error-correction efficiency f must be >= 1");
  UnitScalar{y_z};
  const auto h = [](UnitScalar e) { return binary_entropy(UnitScalar(std::min(e.value(), 0.5))); };
  KeyRateReport r;
  r.y_z = y_z;
  r.e_ph_u = e_ph_u;
  r.e_bit = e_bit;
  r.f = f;
  r.rate = std::max(0.0, y_z * (1.0 - h(e_ph_u) - f * h(e_bit)));
  return r;
}

BoundParameters make_bound_parameters(Protocol protocol, const SourceSpec& source) {
  source.validate();
  const PhaseRanges ranges = source.ranges();
  return {coeff_bounds(protocol, ranges).upper, virtual_prob_bounds(ranges),
          epsilon_effective(UnitScalar(source.epsilon_u), source.correlation_length)};
}

KeyRateReport evaluate(const ObservedStatistics& stats, const BoundParameters& params, double f) {
  stats.validate();
  const UnitScalar e_ph = phase_error_bound(stats, params);
  KeyRateReport report =
      key_rate(stats.joint_yield(), e_ph, UnitScalar(stats.bit_error_rate()), f);
  if (stats.mode == StatisticsMode::counts && stats.tags.size() > 1) {
    report.e_ph_u_per_tag = per_tag_bounds(stats, params);
    const double sifted = double(stats.aggregate().sifted);
    for (const TagCounts& t : stats.tags) report.tag_weights.push_back(double(t.sifted) / sifted);
  }
  return report;
}

}  // namespace qkdrt
