#include "qkdrt/source.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qkdrt/error.hpp"

namespace qkdrt {

const char* to_string(Setting s) {
  switch (s) {
    case Setting::z0: return "0Z";
    case Setting::z1: return "1Z";
    case Setting::x0: return "0X";
    case Setting::x1: return "1X";
  }
  return "?";
}

const char* to_string(Protocol p) {
  return p == Protocol::bb84 ? "bb84" : "three-state";
}

Protocol parse_protocol(const std::string& name) {
  if (name == "bb84") return Protocol::bb84;
  if (name == "three-state" || name == "three_state" || name == "3-state") {
    return Protocol::three_state;
  }
  throw Error(ErrorKind::config, "unknown protocol '" + name + "'");
}

bool emits(Protocol protocol, Setting s) {
  return protocol == Protocol::bb84 || s != Setting::x1;
}

double BlochVector::norm() const { return std::hypot(x, z); }

BlochVector qubit_bloch(double theta) {
  return {std::sin(theta), std::cos(theta), true};
}

PhaseRanges PhaseRanges::point(const std::array<double, num_settings>& phases) {
  return {phases, phases};
}

PhaseRanges PhaseRanges::around(const std::array<double, num_settings>& nominal,
                                double half_width) {
  PhaseRanges r;
  for (std::size_t j = 0; j < num_settings; ++j) {
    r.lo[j] = nominal[j] - half_width;
    r.hi[j] = nominal[j] + half_width;
  }
  return r;
}

void PhaseRanges::validate() const {
  for (Setting s : all_settings) {
    if (!(lower(s) <= upper(s))) {
      std::ostringstream msg;
      msg << "phase range for " << to_string(s) << " has lo " << lower(s) << " > hi "
          << upper(s);
      throw Error(ErrorKind::domain, msg.str());
    }
  }
}

bool PhaseRanges::in_analytic_sectors(Protocol protocol) const {
  // Slack for edges computed in floating point.
  constexpr double slack = 1e-12;
  auto inside = [&](Setting s, double lo_edge, double hi_edge) {
    return lower(s) >= lo_edge - slack && upper(s) <= hi_edge + slack;
  };
  bool ok = inside(Setting::z0, -pi / 6, pi / 6) && inside(Setting::z1, 5 * pi / 6, 7 * pi / 6) &&
            inside(Setting::x0, pi / 3, 2 * pi / 3);
  if (protocol == Protocol::bb84) ok = ok && inside(Setting::x1, 4 * pi / 3, 5 * pi / 3);
  return ok;
}

std::array<double, num_settings> SourceSpec::nominal_phases() const {
  const double k = kappa();
  return {0.0, k * pi, k * pi / 2, k * 3 * pi / 2};
}

void SourceSpec::validate() const {
  if (!(delta >= 0.0)) throw Error(ErrorKind::domain, "delta must be nonnegative");
  if (!(cap_delta >= 0.0)) throw Error(ErrorKind::domain, "Delta must be nonnegative");
  UnitScalar{epsilon_u};
}

ProtocolProbs::ProtocolProbs(Protocol protocol, double p_za, double p_zb)
    : protocol_(protocol), p_za_(p_za), p_zb_(p_zb) {
  if (!(p_za > 0.0 && p_za <= 1.0)) throw Error(ErrorKind::domain, "p_ZA must lie in (0, 1]");
  if (!(p_zb > 0.0 && p_zb <= 1.0)) throw Error(ErrorKind::domain, "p_ZB must lie in (0, 1]");
}

ProtocolProbs ProtocolProbs::from_settings(Protocol protocol,
                                           const std::array<double, num_settings>& p,
                                           double p_zb) {
  constexpr double tol = 1e-12;
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw Error(ErrorKind::domain, "setting probabilities must be nonnegative");
    total += v;
  }
  if (std::abs(total - 1.0) > tol) {
    throw Error(ErrorKind::domain, "setting probabilities must sum to 1");
  }
  if (std::abs(p[index(Setting::z0)] - p[index(Setting::z1)]) > tol) {
    throw Error(ErrorKind::domain, "p_0Z must equal p_1Z");
  }
  if (protocol == Protocol::three_state && p[index(Setting::x1)] != 0.0) {
    throw Error(ErrorKind::inconsistent_protocol, "three-state protocol never emits 1X");
  }
  if (protocol == Protocol::bb84 &&
      std::abs(p[index(Setting::x0)] - p[index(Setting::x1)]) > tol) {
    throw Error(ErrorKind::domain, "bb84 X settings must be equiprobable");
  }
  return ProtocolProbs(protocol, p[index(Setting::z0)] + p[index(Setting::z1)], p_zb);
}

double ProtocolProbs::p(Setting s) const {
  switch (s) {
    case Setting::z0:
    case Setting::z1: return p_za_ / 2;
    case Setting::x0: return protocol_ == Protocol::bb84 ? p_xa() / 2 : p_xa();
    case Setting::x1: return protocol_ == Protocol::bb84 ? p_xa() / 2 : 0.0;
  }
  return 0.0;
}

UnitScalar epsilon_effective(UnitScalar eps_prime, std::uint32_t correlation_length) {
  const double survive = std::pow(1.0 - eps_prime.value(), double(correlation_length) + 1.0);
  return UnitScalar::clamped(1.0 - survive);
}

UnitScalar tha_epsilon_bound(double nu_max) {
  if (!(nu_max >= 0.0)) throw Error(ErrorKind::domain, "nu_max must be nonnegative");
  return UnitScalar(std::min(nu_max, 1.0));
}

UnitScalar combine_side_channels(UnitScalar eps_mode, UnitScalar eps_tha) {
  return UnitScalar::clamped(1.0 - (1.0 - eps_mode.value()) * (1.0 - eps_tha.value()));
}

VirtualProbs virtual_probs(double theta_z0, double theta_z1) {
  const double overlap = std::cos((theta_z0 - theta_z1) / 2);
  return {0.5 * (1.0 + overlap), 0.5 * (1.0 - overlap)};
}

namespace {

// max of cos(t) over t in [a, b]
double max_cos(double a, double b) {
  if (std::ceil(a / (2 * pi)) <= std::floor(b / (2 * pi))) return 1.0;
  return std::max(std::cos(a), std::cos(b));
}

}  // namespace

VirtualProbs virtual_prob_bounds(const PhaseRanges& ranges) {
  ranges.validate();
  // The half difference t = (θ_0Z − θ_1Z)/2 sweeps [t_lo, t_hi].
  const double t_lo = (ranges.lower(Setting::z0) - ranges.upper(Setting::z1)) / 2;
  const double t_hi = (ranges.upper(Setting::z0) - ranges.lower(Setting::z1)) / 2;
  // max of −cos(t) is max of cos(t + π).
  return {0.5 * (1.0 + max_cos(t_lo, t_hi)), 0.5 * (1.0 + max_cos(t_lo + pi, t_hi + pi))};
}

}  // namespace qkdrt
