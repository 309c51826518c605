#pragma once

#include <cmath>
#include <vector>

#include "mos/errors.hpp"
#include "mos/quadrature.hpp"

namespace mos {

/// Finite open interval (alpha, beta) with its quadrature policy and the
/// x-points where space data (exponents, weights) is declared singular.
struct Domain {
  double alpha = 0;
  double beta = 1;
  QuadratureConfig quad{};
  std::vector<double> singularities;

  Domain() = default;
  Domain(double a, double b) : alpha(a), beta(b) { validate(); }

  double length() const { return beta - alpha; }

  bool contains(double x) const { return x >= alpha && x <= beta; }

  void validate() const {
    if (!(std::isfinite(alpha) && std::isfinite(beta) && alpha < beta))
      throw ArgumentError("domain requires finite alpha < beta");
  }

  /// Singularities plus endpoints, ascending: the points quadrature must
  /// treat as cell boundaries.
  std::vector<double> split_points() const {
    std::vector<double> pts{alpha};
    for (double s : singularities)
      if (s > alpha && s < beta) pts.push_back(s);
    pts.push_back(beta);
    std::sort(pts.begin(), pts.end());
    return pts;
  }
};

}  // namespace mos
