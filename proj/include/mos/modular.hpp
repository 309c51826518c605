#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "mos/errors.hpp"
#include "mos/extended.hpp"
#include "mos/mo_function.hpp"
#include "mos/piecewise.hpp"
#include "mos/quadrature.hpp"

namespace mos {

namespace detail {

inline void check_same_interval(const MOFunction& phi,
                                const PiecewiseFunction& f) {
  const double tol = 1e-12 * std::max(1.0, std::abs(phi.domain().beta));
  if (std::abs(phi.domain().alpha - f.alpha()) > tol ||
      std::abs(phi.domain().beta - f.beta()) > tol)
    throw ArgumentError("function and Phi live on different intervals");
}

}  // namespace detail

/// Modular I_Phi(scale * f) = integral of Phi(x, scale * |f(x)|) dx.
///
/// The domain splits at f's breakpoints and the declared singular points.
/// Segments touching an endpoint or a singular point are integrated as
/// improper integrals (shell decomposition classifies divergence even when
/// the integrand never overflows, e.g. a 1/x weight); interior segments use
/// adaptive panels, whose +inf-node detection handles value blow-ups.
/// Returns +inf when the integral diverges or exceeds 1e100 (decisions
/// downstream only ever compare modulars against O(1) thresholds).
inline double modular(const MOFunction& phi, const PiecewiseFunction& f,
                      double scale = 1.0) {
  detail::check_same_interval(phi, f);
  if (!(scale > 0)) throw ArgumentError("modular: scale must be positive");
  const auto& dom = phi.domain();

  std::vector<double> cuts = f.breakpoints();
  for (double s : dom.split_points()) cuts.push_back(s);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto improper_at = [&](double x) {
    const double tol = 1e-12 * std::max(1.0, std::abs(dom.beta));
    if (std::abs(x - dom.alpha) <= tol || std::abs(x - dom.beta) <= tol)
      return true;
    for (double s : dom.singularities)
      if (std::abs(x - s) <= tol) return true;
    return false;
  };

  auto g = [&](double x) { return phi.evaluate(x, scale * std::abs(f(x))); };

  double total = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double u = cuts[i], v = cuts[i + 1];
    const bool left_imp = improper_at(u), right_imp = improper_at(v);
    double piece;
    if (left_imp && right_imp) {
      const double mid = 0.5 * (u + v);
      piece = ext_add(integrate_improper(g, u, mid, false, dom.quad),
                      integrate_improper(g, mid, v, true, dom.quad));
    } else if (left_imp) {
      piece = integrate_improper(g, u, v, false, dom.quad);
    } else if (right_imp) {
      piece = integrate_improper(g, u, v, true, dom.quad);
    } else {
      piece = integrate(g, u, v, dom.quad);
    }
    total = ext_add(total, piece);
    if (total == kInf) return kInf;
  }
  return total;
}

}  // namespace mos
