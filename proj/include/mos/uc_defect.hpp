#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "mos/extended.hpp"
#include "mos/mo_function.hpp"

namespace mos {

/// Result of scanning for pairs that defeat the uniform-convexity
/// improvement: pairs u > v >= 0 with u - v > eps * u whose midpoint value
/// Phi(x, (u+v)/2) exceeds (1-c)/2 * (Phi(x,u) + Phi(x,v)).
///
/// P(x) is the largest such gap u - v at x (capped at the t-grid top); the
/// defect is the x-integral estimate of Phi(x, P(x)). A uniformly convex
/// function has defect 0 for small enough c at every eps; a defect that
/// stays huge for every c falsifies uniform convexity.
struct UCDefectResult {
  double defect = 0;
  double witness_x = 0;
  double witness_u = 0;
  double witness_v = 0;
  double pair_fraction = 0;  // fraction of x-samples with qualifying pairs
};

inline UCDefectResult uc_defect_estimate(const MOFunction& phi, double eps,
                                         double c, int x_points = 48,
                                         int t_points = 72,
                                         double t_min = 1e-4,
                                         double t_max = 1e6) {
  if (!(eps > 0 && eps < 2)) throw ArgumentError("uc defect: eps in (0,2)");
  if (!(c > 0 && c < 1)) throw ArgumentError("uc defect: c in (0,1)");
  const auto& dom = phi.domain();
  UCDefectResult res;
  const double lr = std::log(t_max / t_min);
  std::vector<double> grid(t_points), row(t_points);
  for (int i = 0; i < t_points; ++i)
    grid[i] = t_min * std::exp(lr * i / (t_points - 1));

  int hit_count = 0;
  double best_contrib = -1;
  for (int ix = 0; ix < x_points; ++ix) {
    const double x = dom.alpha + dom.length() * (ix + 0.5) / x_points;
    for (int i = 0; i < t_points; ++i) row[i] = phi.evaluate(x, grid[i]);
    double P = 0, pu = 0, pv = 0;
    for (int i = 1; i < t_points; ++i) {
      const double u = grid[i];
      if (row[i] == kInf) continue;
      // v = 0 pair: gap u, midpoint u/2
      if (row[i] > 0 &&
          phi.evaluate(x, u / 2) > 0.5 * (1 - c) * row[i] && u > P) {
        P = u;
        pu = u;
        pv = 0;
      }
      for (int j = 0; j < i; ++j) {
        const double v = grid[j];
        if (u - v <= eps * u || u - v <= P) continue;
        const double sum = row[i] + row[j];
        if (sum <= 0) continue;
        if (phi.evaluate(x, 0.5 * (u + v)) > 0.5 * (1 - c) * sum) {
          P = u - v;
          pu = u;
          pv = v;
        }
      }
    }
    if (P > 0) {
      ++hit_count;
      const double contrib = phi.evaluate(x, P);
      res.defect =
          ext_add(res.defect, ext_mul(contrib, dom.length() / x_points));
      if (contrib > best_contrib) {
        best_contrib = contrib;
        res.witness_x = x;
        res.witness_u = pu;
        res.witness_v = pv;
      }
    }
  }
  res.pair_fraction = static_cast<double>(hit_count) / x_points;
  return res;
}

}  // namespace mos
