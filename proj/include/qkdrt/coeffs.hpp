#pragma once

// Decomposition of the X-basis virtual states over the reference states,
// closed-form and via a generic 3x3 solve, plus worst-case upper bounds over
// phase ranges.

#include <array>

#include "qkdrt/source.hpp"

namespace qkdrt {

/// (trace, Bloch-x, Bloch-z) of a real XZ-plane operator.
struct AffineTriple {
  double trace = 0.0;
  double x = 0.0;
  double z = 0.0;
};

AffineTriple affine(const BlochVector& v, double weight = 1.0);

using CoefficientRow = std::array<double, num_settings>;

/// c[α][j]: the α-th virtual state as a combination of the reference states.
struct CoefficientSet {
  Protocol protocol = Protocol::bb84;
  std::array<CoefficientRow, 2> c{};

  double operator()(int alpha, Setting j) const { return c[alpha][index(j)]; }
  double& operator()(int alpha, Setting j) { return c[alpha][index(j)]; }
};

/// Setting whose coefficient is fixed to zero for virtual state α: bb84 drops
/// 0X for α = 1 and 1X for α = 0; the three-state protocol always drops 1X.
Setting zeroed_setting(Protocol protocol, int alpha);

/// Normalized virtual state α built from the two Z reference phases.
/// Throws SingularSystem when the state vanishes (θ_0Z = θ_1Z, α = 1).
BlochVector virtual_state(double theta_z0, double theta_z1, int alpha);

/// Solves Σ_j c_j·affine(refs[j]) = target with c[zeroed] = 0.
/// Throws SingularSystem when the remaining three references are affinely
/// dependent.
CoefficientRow solve_generic(const AffineTriple& target,
                             const std::array<BlochVector, num_settings>& refs, Setting zeroed);

/// Generic-solver coefficients for exact phases (θ_0Z, θ_1Z, θ_0X, θ_1X).
CoefficientSet coeffs_generic(Protocol protocol, const std::array<double, num_settings>& phases);

/// Closed forms for the bb84 zeroing convention.
CoefficientSet coeffs_bb84(double th_z0, double th_z1, double th_x0, double th_x1);

/// Closed forms for the three-state protocol.
CoefficientSet coeffs_three_state(double th_z0, double th_z1, double th_x0);

CoefficientSet coeffs_exact(Protocol protocol, const std::array<double, num_settings>& phases);

enum class BoundPolicy {
  analytic_only,  // throw SectorViolation outside the analytic sectors
  grid_fallback,  // maximize on a refined grid outside the sectors
};

struct CoefficientBounds {
  CoefficientSet upper;
  bool analytic = true;
  // Only meaningful for the grid path: false when the refinement cap was hit
  // before successive maxima agreed to 1e-9.
  bool converged = true;
};

CoefficientBounds coeff_bounds_bb84(const PhaseRanges& ranges,
                                    BoundPolicy policy = BoundPolicy::grid_fallback);
CoefficientBounds coeff_bounds_three_state(const PhaseRanges& ranges,
                                           BoundPolicy policy = BoundPolicy::grid_fallback);
CoefficientBounds coeff_bounds(Protocol protocol, const PhaseRanges& ranges,
                               BoundPolicy policy = BoundPolicy::grid_fallback);

/// Grid maximization of the closed forms, starting at `points` per axis.
CoefficientBounds coeff_bounds_grid(Protocol protocol, const PhaseRanges& ranges,
                                    int points = 41);

}  // namespace qkdrt
