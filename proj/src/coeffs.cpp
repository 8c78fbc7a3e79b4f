#include "qkdrt/coeffs.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "qkdrt/error.hpp"

namespace qkdrt {

namespace {

constexpr double singular_tol = 1e-12;

double checked_ratio(double num, double den, const char* what) {
  if (std::abs(den) < singular_tol) {
    throw Error(ErrorKind::singular_system, std::string("vanishing denominator in ") + what);
  }
  return num / den;
}

// Closed forms for the virtual state α = 1 expressed over (0Z, 1Z, r), where
// r is the fourth reference (1X in bb84, 0X in the three-state protocol).
std::array<double, 3> alpha1_row(double a, double b, double r) {
  using std::cos;
  using std::sin;
  const double sa = sin(a / 2 - r / 2);
  const double sb = sin(b / 2 - r / 2);
  const double c_z0 = checked_ratio(sa - sb, sin(b / 2 - a + r / 2) + 2 * sa - sb, "c[1][0Z]");
  const double c_z1 = checked_ratio(-sa + sb, sin(a / 2 - b + r / 2) - sa + 2 * sb, "c[1][1Z]");
  const double c_r = checked_ratio(cos(a - b) - 1,
                                   cos(a - b) - cos(a - r) - cos(b - r) +
                                       2 * cos(a / 2 + b / 2 - r) - 2 * cos(a / 2 - b / 2) + 1,
                                   "c[1][X]");
  return {c_z0, c_z1, c_r};
}

// Closed forms for the virtual state α = 0 over (0Z, 1Z, 0X).
std::array<double, 3> alpha0_row(double a, double b, double r) {
  using std::cos;
  using std::sin;
  const double sa = sin(a / 2 - r / 2);
  const double sb = sin(b / 2 - r / 2);
  const double c_z0 = checked_ratio(sa + sb, 2 * sa - sin(b / 2 - a + r / 2) + sb, "c[0][0Z]");
  const double c_z1 = checked_ratio(sa + sb, sa - sin(a / 2 - b + r / 2) + 2 * sb, "c[0][1Z]");
  const double c_r = checked_ratio(cos(a - b) - 1,
                                   cos(a - b) - cos(a - r) - cos(b - r) -
                                       2 * cos(a / 2 + b / 2 - r) + 2 * cos(a / 2 - b / 2) + 1,
                                   "c[0][0X]");
  return {c_z0, c_z1, c_r};
}

double det3(const std::array<std::array<double, 3>, 3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Setting fourth_reference(Protocol protocol, int alpha) {
  if (protocol == Protocol::three_state) return Setting::x0;
  return alpha == 1 ? Setting::x1 : Setting::x0;
}

}  // namespace

AffineTriple affine(const BlochVector& v, double weight) {
  return {weight, weight * v.x, weight * v.z};
}

Setting zeroed_setting(Protocol protocol, int alpha) {
  if (protocol == Protocol::three_state) return Setting::x1;
  return alpha == 1 ? Setting::x0 : Setting::x1;
}

BlochVector virtual_state(double theta_z0, double theta_z1, int alpha) {
  const double sign = alpha == 0 ? 1.0 : -1.0;
  double a = std::cos(theta_z0 / 2) + sign * std::cos(theta_z1 / 2);
  double b = std::sin(theta_z0 / 2) + sign * std::sin(theta_z1 / 2);
  const double n = std::hypot(a, b);
  if (n < singular_tol) {
    throw Error(ErrorKind::singular_system, "virtual state has zero weight");
  }
  a /= n;
  b /= n;
  return {2 * a * b, a * a - b * b, true};
}

CoefficientRow solve_generic(const AffineTriple& target,
                             const std::array<BlochVector, num_settings>& refs, Setting zeroed) {
  std::array<Setting, 3> cols{};
  std::size_t n = 0;
  for (Setting s : all_settings) {
    if (s != zeroed) cols[n++] = s;
  }
  std::array<std::array<double, 3>, 3> m{};
  for (std::size_t k = 0; k < 3; ++k) {
    const AffineTriple t = affine(refs[index(cols[k])]);
    m[0][k] = t.trace;
    m[1][k] = t.x;
    m[2][k] = t.z;
  }
  const double det = det3(m);
  if (std::abs(det) < singular_tol) {
    throw Error(ErrorKind::singular_system, "reference states are affinely dependent");
  }
  const std::array<double, 3> rhs = {target.trace, target.x, target.z};
  CoefficientRow row{};
  for (std::size_t k = 0; k < 3; ++k) {
    auto mk = m;
    for (std::size_t r = 0; r < 3; ++r) mk[r][k] = rhs[r];
    row[index(cols[k])] = det3(mk) / det;
  }
  return row;
}

CoefficientSet coeffs_generic(Protocol protocol, const std::array<double, num_settings>& phases) {
  std::array<BlochVector, num_settings> refs{};
  for (Setting s : all_settings) refs[index(s)] = qubit_bloch(phases[index(s)]);
  CoefficientSet out;
  out.protocol = protocol;
  for (int alpha = 0; alpha < 2; ++alpha) {
    const BlochVector vir = virtual_state(phases[0], phases[1], alpha);
    out.c[alpha] = solve_generic(affine(vir), refs, zeroed_setting(protocol, alpha));
  }
  return out;
}

CoefficientSet coeffs_bb84(double th_z0, double th_z1, double th_x0, double th_x1) {
  CoefficientSet out;
  out.protocol = Protocol::bb84;
  const auto r1 = alpha1_row(th_z0, th_z1, th_x1);
  const auto r0 = alpha0_row(th_z0, th_z1, th_x0);
  out(1, Setting::z0) = r1[0];
  out(1, Setting::z1) = r1[1];
  out(1, Setting::x1) = r1[2];
  out(0, Setting::z0) = r0[0];
  out(0, Setting::z1) = r0[1];
  out(0, Setting::x0) = r0[2];
  return out;
}

CoefficientSet coeffs_three_state(double th_z0, double th_z1, double th_x0) {
  CoefficientSet out;
  out.protocol = Protocol::three_state;
  const auto r1 = alpha1_row(th_z0, th_z1, th_x0);
  const auto r0 = alpha0_row(th_z0, th_z1, th_x0);
  out(1, Setting::z0) = r1[0];
  out(1, Setting::z1) = r1[1];
  out(1, Setting::x0) = r1[2];
  out(0, Setting::z0) = r0[0];
  out(0, Setting::z1) = r0[1];
  out(0, Setting::x0) = r0[2];
  return out;
}

CoefficientSet coeffs_exact(Protocol protocol, const std::array<double, num_settings>& phases) {
  if (protocol == Protocol::bb84) {
    return coeffs_bb84(phases[0], phases[1], phases[2], phases[3]);
  }
  return coeffs_three_state(phases[0], phases[1], phases[2]);
}

namespace {

enum Bound { L, U };

struct Corners {
  const PhaseRanges& r;
  double z0(Bound b) const { return b == L ? r.lower(Setting::z0) : r.upper(Setting::z0); }
  double z1(Bound b) const { return b == L ? r.lower(Setting::z1) : r.upper(Setting::z1); }
  double x(Setting s, Bound b) const { return b == L ? r.lower(s) : r.upper(s); }
};

// max over the 8 corners of one closed-form entry
template <typename Row>
double corner_max(const Corners& k, Setting ref, Row row, std::size_t entry) {
  double best = -std::numeric_limits<double>::infinity();
  for (Bound a : {L, U}) {
    for (Bound b : {L, U}) {
      for (Bound d : {L, U}) {
        best = std::max(best, row(k.z0(a), k.z1(b), k.x(ref, d))[entry]);
      }
    }
  }
  return best;
}

[[noreturn]] void sector_violation(Protocol protocol) {
  throw Error(ErrorKind::sector_violation,
              std::string("phase ranges leave the analytic sectors for ") + to_string(protocol));
}

// Shared α = 0 upper bounds (0Z, 1Z, 0X).
void alpha0_bounds(const Corners& k, CoefficientSet& out) {
  out(0, Setting::z0) = alpha0_row(k.z0(L), k.z1(L), k.x(Setting::x0, U))[0];
  out(0, Setting::z1) = alpha0_row(k.z0(U), k.z1(U), k.x(Setting::x0, L))[1];
  out(0, Setting::x0) = corner_max(k, Setting::x0, alpha0_row, 2);
}

}  // namespace

CoefficientBounds coeff_bounds_bb84(const PhaseRanges& ranges, BoundPolicy policy) {
  ranges.validate();
  if (!ranges.in_analytic_sectors(Protocol::bb84)) {
    if (policy == BoundPolicy::analytic_only) sector_violation(Protocol::bb84);
    return coeff_bounds_grid(Protocol::bb84, ranges);
  }
  const Corners k{ranges};
  CoefficientBounds out;
  out.upper.protocol = Protocol::bb84;
  CoefficientSet& c = out.upper;
  c(1, Setting::z0) = alpha1_row(k.z0(U), k.z1(U), k.x(Setting::x1, L))[0];
  c(1, Setting::z1) = alpha1_row(k.z0(L), k.z1(L), k.x(Setting::x1, U))[1];
  c(1, Setting::x1) = corner_max(k, Setting::x1, alpha1_row, 2);
  alpha0_bounds(k, c);
  return out;
}

CoefficientBounds coeff_bounds_three_state(const PhaseRanges& ranges, BoundPolicy policy) {
  ranges.validate();
  if (!ranges.in_analytic_sectors(Protocol::three_state)) {
    if (policy == BoundPolicy::analytic_only) sector_violation(Protocol::three_state);
    return coeff_bounds_grid(Protocol::three_state, ranges);
  }
  const Corners k{ranges};
  CoefficientBounds out;
  out.upper.protocol = Protocol::three_state;
  CoefficientSet& c = out.upper;
  c(1, Setting::z0) = alpha1_row(k.z0(U), k.z1(L), k.x(Setting::x0, L))[0];
  c(1, Setting::z1) = alpha1_row(k.z0(U), k.z1(L), k.x(Setting::x0, U))[1];
  // c[1][0X] peaks where θ_0X sits at the midpoint of θ_0Z^L and θ_1Z^U.
  const double mid = (k.z0(L) + k.z1(U)) / 2;
  double th_x0 = mid;
  if (k.x(Setting::x0, U) < mid) {
    th_x0 = k.x(Setting::x0, U);
  } else if (mid < k.x(Setting::x0, L)) {
    th_x0 = k.x(Setting::x0, L);
  }
  c(1, Setting::x0) = alpha1_row(k.z0(L), k.z1(U), th_x0)[2];
  alpha0_bounds(k, c);
  return out;
}

CoefficientBounds coeff_bounds(Protocol protocol, const PhaseRanges& ranges, BoundPolicy policy) {
  return protocol == Protocol::bb84 ? coeff_bounds_bb84(ranges, policy)
                                    : coeff_bounds_three_state(ranges, policy);
}

namespace {

constexpr int max_grid_points = 321;

double grid_max(const std::function<double(double, double, double)>& f,
                std::array<double, 3> lo, std::array<double, 3> hi, int n) {
  double best = -std::numeric_limits<double>::infinity();
  auto at = [&](int axis, int i) {
    return n == 1 ? lo[axis] : lo[axis] + (hi[axis] - lo[axis]) * i / (n - 1);
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) best = std::max(best, f(at(0, i), at(1, j), at(2, l)));
    }
  }
  return best;
}

}  // namespace

CoefficientBounds coeff_bounds_grid(Protocol protocol, const PhaseRanges& ranges, int points) {
  ranges.validate();
  CoefficientBounds out;
  out.analytic = false;
  out.upper.protocol = protocol;
  for (int alpha = 0; alpha < 2; ++alpha) {
    const Setting ref = fourth_reference(protocol, alpha);
    const std::array<double, 3> lo = {ranges.lower(Setting::z0), ranges.lower(Setting::z1),
                                      ranges.lower(ref)};
    const std::array<double, 3> hi = {ranges.upper(Setting::z0), ranges.upper(Setting::z1),
                                      ranges.upper(ref)};
    const std::array<Setting, 3> slots = {Setting::z0, Setting::z1, ref};
    for (std::size_t entry = 0; entry < 3; ++entry) {
      auto f = [&](double a, double b, double d) {
        return alpha == 1 ? alpha1_row(a, b, d)[entry] : alpha0_row(a, b, d)[entry];
      };
      int n = points;
      double prev = grid_max(f, lo, hi, n);
      bool converged = false;
      while (2 * n - 1 <= max_grid_points) {
        n = 2 * n - 1;
        const double cur = grid_max(f, lo, hi, n);
        const double change = std::abs(cur - prev);
        prev = cur;
        if (change < 1e-9) {
          converged = true;
          break;
        }
      }
      out.converged = out.converged && converged;
      out.upper(alpha, slots[entry]) = prev;
    }
  }
  return out;
}

}  // namespace qkdrt
