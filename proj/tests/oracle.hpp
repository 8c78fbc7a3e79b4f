#pragma once

// Reference computations for tests. Deliberately independent of the library:
// plain 2x2 complex matrices and state vectors, no Bloch-vector shortcuts.

#include <array>
#include <cmath>
#include <complex>
#include <random>

namespace oracle {

using cplx = std::complex<double>;
using Vec2 = std::array<cplx, 2>;
using Mat2 = std::array<std::array<cplx, 2>, 2>;

constexpr double pi = 3.14159265358979323846;

inline Vec2 phase_state(double theta) { return {std::cos(theta / 2), std::sin(theta / 2)}; }

inline double norm(const Vec2& v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1])); }

inline Vec2 normalized(Vec2 v) {
  const double n = norm(v);
  return {v[0] / n, v[1] / n};
}

inline cplx inner(const Vec2& a, const Vec2& b) {
  return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
}

inline Mat2 outer(const Vec2& a, double weight = 1.0) {
  Mat2 m{};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m[r][c] = weight * a[r] * std::conj(a[c]);
  return m;
}

inline Mat2 add(const Mat2& a, const Mat2& b) {
  Mat2 m{};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m[r][c] = a[r][c] + b[r][c];
  return m;
}

inline double max_abs_diff(const Mat2& a, const Mat2& b) {
  double d = 0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) d = std::max(d, std::abs(a[r][c] - b[r][c]));
  return d;
}

/// ⟨v|M|v⟩ (real for Hermitian M).
inline double expect(const Mat2& m, const Vec2& v) {
  cplx s = 0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) s += std::conj(v[r]) * m[r][c] * v[c];
  return s.real();
}

/// X-basis virtual state α built from the Z-basis phases: (ψ0 ± ψ1), normalized.
inline Vec2 virtual_state(double th0, double th1, int alpha) {
  const Vec2 a = phase_state(th0);
  const Vec2 b = phase_state(th1);
  const double s = alpha == 0 ? 1.0 : -1.0;
  return normalized({a[0] + s * b[0], a[1] + s * b[1]});
}

/// Probability weight of virtual state α, ‖(ψ0 ± ψ1)/2‖².
inline double virtual_weight(double th0, double th1, int alpha) {
  const Vec2 a = phase_state(th0);
  const Vec2 b = phase_state(th1);
  const double s = alpha == 0 ? 1.0 : -1.0;
  const double n = norm({a[0] + s * b[0], a[1] + s * b[1]});
  return n * n / 4;
}

inline Vec2 random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return normalized({cplx(g(rng), g(rng)), cplx(g(rng), g(rng))});
}

/// U diag(λ0, λ1) U† with λ in [0, 1] and a random unitary U.
inline Mat2 random_effect(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Vec2 e0 = random_state(rng);
  const Vec2 e1 = {-std::conj(e0[1]), std::conj(e0[0])};
  return add(outer(e0, u(rng)), outer(e1, u(rng)));
}

/// Binary entropy straight from the definition.
inline double h(double x) {
  if (x <= 0 || x >= 1) return 0;
  return -x * std::log2(x) - (1 - x) * std::log2(1 - x);
}

}  // namespace oracle
