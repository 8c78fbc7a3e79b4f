#include <cmath>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "qkdrt/coeffs.hpp"
#include "qkdrt/error.hpp"

using namespace qkdrt;

namespace {

std::array<double, num_settings> ideal_phases() {
  return {0.0, oracle::pi, oracle::pi / 2, 3 * oracle::pi / 2};
}

/// Residual of |vir_α⟩⟨vir_α| − Σ_j c_j |ψ_j⟩⟨ψ_j| with plain 2x2 matrices.
double reconstruction_residual(const CoefficientSet& c, const std::array<double, 4>& th, int alpha) {
  oracle::Mat2 sum{};
  for (std::size_t j = 0; j < num_settings; ++j) {
    sum = oracle::add(sum, oracle::outer(oracle::phase_state(th[j]), c.c[alpha][j]));
  }
  return oracle::max_abs_diff(sum, oracle::outer(oracle::virtual_state(th[0], th[1], alpha)));
}

std::array<double, 4> random_in_sector(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double p = oracle::pi;
  return {u(rng) * p / 6, p + u(rng) * p / 6, p / 2 + u(rng) * p / 6, 3 * p / 2 + u(rng) * p / 6};
}

void check_dominates(Protocol protocol, const PhaseRanges& r, const CoefficientSet& ub, int n) {
  auto at = [&](Setting s, int i) {
    return r.lower(s) + (r.upper(s) - r.lower(s)) * i / (n - 1);
  };
  double worst = -1;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < (protocol == Protocol::bb84 ? n : 1); ++y) {
          const std::array<double, 4> th = {at(Setting::z0, a), at(Setting::z1, b), at(Setting::x0, x),
                                            at(Setting::x1, y)};
          const CoefficientSet c = coeffs_generic(protocol, th);
          for (int alpha = 0; alpha < 2; ++alpha)
            for (std::size_t j = 0; j < num_settings; ++j) {
              worst = std::max(worst, c.c[alpha][j] - ub.c[alpha][j]);
            }
        }
  CHECK(worst <= 1e-12);
}

}  // namespace

TEST_CASE("ideal phases give the textbook decompositions") {
  const CoefficientSet bb = coeffs_exact(Protocol::bb84, ideal_phases());
  const CoefficientRow bb1 = {0, 0, 0, 1}, bb0 = {0, 0, 1, 0};
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(bb.c[1][j] == doctest::Approx(bb1[j]).epsilon(1e-12));
    CHECK(bb.c[0][j] == doctest::Approx(bb0[j]).epsilon(1e-12));
  }
  const CoefficientSet ts = coeffs_exact(Protocol::three_state, ideal_phases());
  const CoefficientRow ts1 = {1, 1, -1, 0};
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(ts.c[1][j] == doctest::Approx(ts1[j]).epsilon(1e-12));
    CHECK(ts.c[0][j] == doctest::Approx(bb0[j]).epsilon(1e-12));
  }
}

TEST_CASE("closed forms agree with the generic solve and reconstruct the virtual states") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const auto th = random_in_sector(rng);
    for (Protocol p : {Protocol::bb84, Protocol::three_state}) {
      const CoefficientSet exact = coeffs_exact(p, th);
      const CoefficientSet generic = coeffs_generic(p, th);
      for (int alpha = 0; alpha < 2; ++alpha) {
        CHECK(exact.c[alpha][index(zeroed_setting(p, alpha))] == 0.0);
        for (std::size_t j = 0; j < 4; ++j) {
          REQUIRE(std::abs(exact.c[alpha][j] - generic.c[alpha][j]) < 1e-9);
        }
        REQUIRE(reconstruction_residual(exact, th, alpha) < 1e-10);
      }
    }
  }
}

TEST_CASE("virtual state matches the oracle") {
  for (double a : {0.0, 0.05}) {
    for (double b : {3.0, 3.2}) {
      for (int alpha = 0; alpha < 2; ++alpha) {
        const BlochVector v = virtual_state(a, b, alpha);
        const auto w = oracle::virtual_state(a, b, alpha);
        // Bloch z = |a0|² − |a1|², x = 2 Re(a0* a1)
        CHECK(v.z == doctest::Approx(std::norm(w[0]) - std::norm(w[1])).epsilon(1e-13));
        CHECK(v.x == doctest::Approx(2 * (std::conj(w[0]) * w[1]).real()).epsilon(1e-13));
        CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("degenerate geometry is reported as singular") {
  auto kind = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::io;
  };
  CHECK(kind([] { virtual_state(0.3, 0.3, 1); }) == ErrorKind::singular_system);
  CHECK(kind([] { coeffs_generic(Protocol::three_state, {0.0, oracle::pi, 0.0, 0.0}); }) ==
        ErrorKind::singular_system);
  CHECK(kind([] { coeffs_exact(Protocol::bb84, {0.0, 2 * oracle::pi, oracle::pi, 3 * oracle::pi}); }) ==
        ErrorKind::singular_system);
}

TEST_CASE("corner bounds dominate the exact coefficients") {
  for (double delta : {0.0, 0.063, 0.126}) {
    for (Protocol p : {Protocol::bb84, Protocol::three_state}) {
      SourceSpec spec;
      spec.delta = delta;
      const PhaseRanges r = spec.ranges();
      const CoefficientBounds b = coeff_bounds(p, r, BoundPolicy::analytic_only);
      CHECK(b.analytic);
      check_dominates(p, r, b.upper, 9);
    }
  }
}

TEST_CASE("point ranges reproduce the exact coefficients") {
  SourceSpec spec;
  const auto th = spec.nominal_phases();
  for (Protocol p : {Protocol::bb84, Protocol::three_state}) {
    const CoefficientSet exact = coeffs_exact(p, th);
    const CoefficientSet ub = coeff_bounds(p, PhaseRanges::point(th)).upper;
    for (int alpha = 0; alpha < 2; ++alpha)
      for (std::size_t j = 0; j < 4; ++j) {
        CHECK(ub.c[alpha][j] == doctest::Approx(exact.c[alpha][j]).epsilon(1e-12));
      }
  }
}

TEST_CASE("out-of-sector ranges") {
  SourceSpec spec;
  spec.delta = 0.7;
  spec.cap_delta = 0.05;
  const PhaseRanges r = spec.ranges();
  REQUIRE_FALSE(r.in_analytic_sectors(Protocol::bb84));
  try {
    coeff_bounds(Protocol::bb84, r, BoundPolicy::analytic_only);
    FAIL("expected a sector violation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::sector_violation);
  }
  const CoefficientBounds g = coeff_bounds(Protocol::bb84, r, BoundPolicy::grid_fallback);
  CHECK_FALSE(g.analytic);
  // The grid maximum is attained on the grid itself, so it dominates any
  // coarser grid of the same box.
  check_dominates(Protocol::bb84, r, g.upper, 5);
}
