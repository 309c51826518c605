#pragma once

#include <cmath>
#include <limits>

namespace mos {

/// The single +inf token used for extended-valued integrands and moduli.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool finite(double v) { return std::isfinite(v); }

/// Product with the measure-theoretic convention 0 * inf = 0.
inline double ext_mul(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b;
}

/// Sum that saturates at +inf instead of producing inf - inf = NaN.
inline double ext_add(double a, double b) {
  if (a == kInf || b == kInf) return kInf;
  return a + b;
}

}  // namespace mos
