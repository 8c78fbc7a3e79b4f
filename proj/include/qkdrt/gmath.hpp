#pragma once

// Closed-form kernel: the G-function sandwich and binary entropy.

namespace qkdrt {

/// A dimensionless value in [0, 1]. Inputs within `tolerance` outside the
/// interval are clamped; anything further out throws ErrorKind::domain.
class UnitScalar {
 public:
  static constexpr double default_tolerance = 1e-9;

  UnitScalar() = default;
  explicit UnitScalar(double value, double tolerance = default_tolerance);

  /// Clamps unconditionally. For estimates that may legitimately overshoot.
  static UnitScalar clamped(double value);

  double value() const noexcept { return value_; }
  operator double() const noexcept { return value_; }

 private:
  double value_ = 0.0;
};

enum class Sign { plus, minus };

/// g±(y, z) = y + (1 − z²)(1 − 2y) ± 2z·sqrt((1 − z²) y (1 − y)).
double g_pm(UnitScalar y, UnitScalar z, Sign sign);

/// Upper sandwich: g+(y, z) for y < z², 1 otherwise.
UnitScalar g_plus(UnitScalar y, UnitScalar z);

/// Lower sandwich: g−(y, z) for y > 1 − z², 0 otherwise.
UnitScalar g_minus(UnitScalar y, UnitScalar z);

UnitScalar binary_entropy(UnitScalar x);

}  // namespace qkdrt
