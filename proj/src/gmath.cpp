#include "qkdrt/gmath.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qkdrt/error.hpp"

namespace qkdrt {

UnitScalar::UnitScalar(double value, double tolerance) {
  if (!(value >= -tolerance && value <= 1.0 + tolerance)) {
    std::ostringstream msg;
    msg << "value " << value << " outside [0, 1] beyond tolerance " << tolerance;
    throw Error(ErrorKind::domain, msg.str());
  }
  value_ = std::clamp(value, 0.0, 1.0);
}

UnitScalar UnitScalar::clamped(double value) {
  if (std::isnan(value)) throw Error(ErrorKind::domain, "NaN is not a unit scalar");
  return UnitScalar(std::clamp(value, 0.0, 1.0));
}

double g_pm(UnitScalar y, UnitScalar z, Sign sign) {
  const double yv = y.value();
  const double zv = z.value();
  const double w = 1.0 - zv * zv;
  const double cross = 2.0 * zv * std::sqrt(std::max(0.0, w * yv * (1.0 - yv)));
  const double base = yv + w * (1.0 - 2.0 * yv);
  return sign == Sign::plus ? base + cross : base - cross;
}

UnitScalar g_plus(UnitScalar y, UnitScalar z) {
  if (y.value() < z.value() * z.value()) {
    return UnitScalar::clamped(g_pm(y, z, Sign::plus));
  }
  return UnitScalar(1.0);
}

UnitScalar g_minus(UnitScalar y, UnitScalar z) {
  if (y.value() > 1.0 - z.value() * z.value()) {
    return UnitScalar::clamped(g_pm(y, z, Sign::minus));
  }
  return UnitScalar(0.0);
}

UnitScalar binary_entropy(UnitScalar x) {
  const double v = x.value();
  if (v <= 0.0 || v >= 1.0) return UnitScalar(0.0);
  return UnitScalar::clamped(-v * std::log2(v) - (1.0 - v) * std::log2(1.0 - v));
}

}  // namespace qkdrt
