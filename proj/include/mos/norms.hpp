#pragma once

#include <algorithm>
#include <cmath>

#include "mos/errors.hpp"
#include "mos/extended.hpp"
#include "mos/mo_function.hpp"
#include "mos/modular.hpp"
#include "mos/piecewise.hpp"

namespace mos {

/// A norm value with its certification bracket: the true norm lies within
/// [value - bracket, value] for the Luxemburg norm (value is the certified
/// upper end) and within value +- bracket for the Amemiya minimization.
struct NormResult {
  double value = 0;
  double bracket = 0;
  int iterations = 0;
};

namespace detail {

/// Modular at scale 1/lambda, mapping quadrature non-convergence to +inf
/// (pushes the bisection up: the certified side I(f/value) <= 1 survives).
inline double modular_at(const MOFunction& phi, const PiecewiseFunction& f,
                         double inv_scale) {
  try {
    return modular(phi, f, inv_scale);
  } catch (const AccuracyError&) {
    return kInf;
  }
}

}  // namespace detail

/// Luxemburg norm inf{lambda > 0 : I_Phi(f / lambda) <= 1} by bisection
/// with geometric bracket expansion. The returned value is the upper end of
/// the final bracket, so I_Phi(f / value) <= 1 is certified.
inline NormResult luxemburg_norm(const MOFunction& phi,
                                 const PiecewiseFunction& f) {
  detail::check_same_interval(phi, f);
  if (f.max_abs() == 0.0) return {0.0, 0.0, 0};

  int iters = 0;
  auto h = [&](double lambda) {
    ++iters;
    return detail::modular_at(phi, f, 1.0 / lambda);
  };

  double hi = 1.0, lo = 1.0;
  if (h(1.0) <= 1.0) {
    // shrink until the modular exceeds 1
    while (h(lo / 2) <= 1.0) {
      lo /= 2;
      if (lo < 1e-300)
        return {0.0, 0.0, iters};  // modular stays <= 1 at all scales
    }
    lo /= 2;
    hi = 2 * lo;
  } else {
    while (h(hi) > 1.0) {
      hi *= 2;
      if (hi > 1e280)
        throw NotInSpaceError(
            "no finite scale brings the modular below 1: f is outside L^Phi");
    }
    lo = hi / 2;
  }
  // invariant: h(lo) > 1 >= h(hi)
  while (hi - lo > std::max(1e-9, 1e-8 * hi)) {
    const double m = 0.5 * (lo + hi);
    if (h(m) <= 1.0)
      hi = m;
    else
      lo = m;
  }
  return {hi, hi - lo, iters};
}

/// Amemiya value (1 + I_Phi(k f)) / k.
inline double amemiya_value(const MOFunction& phi, const PiecewiseFunction& f,
                            double k) {
  if (!(k > 0)) throw ArgumentError("amemiya: k must be positive");
  const double m = detail::modular_at(phi, f, k);
  return m == kInf ? kInf : (1.0 + m) / k;
}

/// Orlicz norm via the Amemiya formula inf_{k>0} (1 + I_Phi(k f)) / k:
/// log-spaced k-grid, golden-section refinement around the grid argmin.
/// When the infimum sits at the top of the k-range (the limit case, e.g.
/// phi(t) = t where the norm is the L1 limit), the top-of-grid value is
/// returned; the grid top makes the truncation error ~1e-9 absolute.
inline NormResult orlicz_norm(const MOFunction& phi,
                              const PiecewiseFunction& f) {
  detail::check_same_interval(phi, f);
  if (f.max_abs() == 0.0) return {0.0, 0.0, 0};

  int iters = 0;
  auto A = [&](double k) {
    ++iters;
    return amemiya_value(phi, f, k);
  };

  const int n = 200;
  const double k_lo = 1e-9, k_hi = 1e9;
  const double ratio = std::pow(k_hi / k_lo, 1.0 / (n - 1));
  double best = kInf, best_k = k_lo;
  double k = k_lo;
  for (int i = 0; i < n; ++i, k *= ratio) {
    const double v = A(k);
    if (v < best) {
      best = v;
      best_k = k;
    }
  }
  if (best == kInf)
    throw NotInSpaceError("Amemiya functional is +inf on the whole k-grid");

  double lo = best_k / ratio, hi = std::min(best_k * ratio, k_hi);
  const double gr = 0.6180339887498949;
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double Ac = A(c), Ad = A(d);
  while (hi - lo > 1e-12 * hi) {
    if (Ac <= Ad) {
      hi = d;
      d = c;
      Ad = Ac;
      c = hi - gr * (hi - lo);
      Ac = A(c);
    } else {
      lo = c;
      c = d;
      Ac = Ad;
      d = lo + gr * (hi - lo);
      Ad = A(d);
    }
  }
  const double k_star = 0.5 * (lo + hi);
  const double v_star = std::min({A(k_star), Ac, Ad, best});
  const double bracket =
      std::abs(Ac - Ad) + 1e-12 * std::max(1.0, v_star);
  return {v_star, bracket, iters};
}

/// Sobolev norm: Luxemburg norm of f plus Luxemburg norm of its weak
/// derivative. Throws NotWeaklyDifferentiableError for discontinuous f.
inline NormResult sobolev_norm(const MOFunction& phi,
                               const PiecewiseFunction& f) {
  const NormResult a = luxemburg_norm(phi, f);
  const NormResult b = luxemburg_norm(phi, f.weak_derivative());
  return {a.value + b.value, a.bracket + b.bracket,
          a.iterations + b.iterations};
}

/// Exact integral of f * g (piecewise polynomial product).
inline double holder_pairing(const PiecewiseFunction& f,
                             const PiecewiseFunction& g) {
  return (f * g).integral();
}

}  // namespace mos
