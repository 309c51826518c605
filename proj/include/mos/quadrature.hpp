#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "mos/errors.hpp"
#include "mos/extended.hpp"

namespace mos {

struct QuadratureConfig {
  int order = 16;        // Gauss-Legendre points per panel
  double abs_tol = 1e-10;
  int max_depth = 60;    // adaptive bisection depth
};

/// Integrals past this size stop being refined: every decision downstream
/// compares against O(1) thresholds, and resolving 1e100 to full precision
/// on doubly-exponential integrands costs millions of panels.
inline constexpr double kHugeIntegral = 1e100;

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Returns the cached order-n rule; nodes via Newton on P_n.
inline const GaussRule& gauss_rule(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      // Legendre recurrence for P_n(x) and P_n'(x).
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

namespace detail {

struct PanelResult {
  double sum = 0;
  double vmin = kInf;
  double vmax = -kInf;
  bool any_inf = false;
  bool all_inf = true;
};

template <class F>
PanelResult panel(F& g, double a, double b, const GaussRule& rule) {
  PanelResult r;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double v = g(mid + half * rule.nodes[i]);
    if (std::isnan(v))
      throw AccuracyError("integrand evaluated to NaN", r.sum);
    if (v == kInf) {
      r.any_inf = true;
    } else {
      r.all_inf = false;
      r.sum += rule.weights[i] * v;
      r.vmin = std::min(r.vmin, v);
      r.vmax = std::max(r.vmax, v);
    }
  }
  r.sum *= half;
  return r;
}

template <class F>
double integrate_rec(F& g, double a, double b, double tol, int depth,
                     const GaussRule& rule, const QuadratureConfig& cfg,
                     bool& converged) {
  const auto whole = panel(g, a, b, rule);
  const double m = 0.5 * (a + b);
  const bool exhausted =
      (b - a) <= 8 * std::numeric_limits<double>::epsilon() *
                     std::max({std::abs(a), std::abs(b), 1.0});
  if (whole.all_inf) return kInf;
  if (!whole.any_inf && whole.sum >= kHugeIntegral) return whole.sum;
  if (whole.any_inf) {
    // An interior node sits in a region where the integrand is +inf; keep
    // isolating it. A region that never thins out at full depth has
    // positive length, so the integral is +inf.
    if (depth >= cfg.max_depth || exhausted) return kInf;
    return ext_add(
        integrate_rec(g, a, m, tol / 2, depth + 1, rule, cfg, converged),
        integrate_rec(g, m, b, tol / 2, depth + 1, rule, cfg, converged));
  }
  const auto left = panel(g, a, m, rule);
  const auto right = panel(g, m, b, rule);
  if (left.any_inf || right.any_inf) {
    if (depth >= cfg.max_depth || exhausted) return kInf;
    return ext_add(
        integrate_rec(g, a, m, tol / 2, depth + 1, rule, cfg, converged),
        integrate_rec(g, m, b, tol / 2, depth + 1, rule, cfg, converged));
  }
  const double refined = left.sum + right.sum;
  const double err = std::abs(refined - whole.sum);
  // Steep integrands change measurably between adjacent representable
  // abscissas (by roughly |f'| * ulp(x), i.e. the sample range times the
  // relative spacing of doubles near the panel). No subdivision resolves
  // below that floor, so demanding more only explodes the recursion tree.
  const double noise = 4 * std::numeric_limits<double>::epsilon() *
                       std::max({std::abs(a), std::abs(b), 1.0}) *
                       (whole.vmax - whole.vmin);
  if (err <= std::max({tol, 5e-15 * std::abs(refined), noise}) || exhausted)
    return refined;
  if (depth >= cfg.max_depth) {
    // Keep the best estimate and let the caller report the full partial sum.
    converged = false;
    return refined;
  }
  return integrate_rec(g, a, m, tol / 2, depth + 1, rule, cfg, converged) +
         integrate_rec(g, m, b, tol / 2, depth + 1, rule, cfg, converged);
}

}  // namespace detail

/// Adaptive composite Gauss-Legendre on [a, b].
///
/// The integrand may return +inf; a persistent +inf region of positive
/// length makes the result +inf. Non-convergence raises AccuracyError
/// carrying the accumulated partial estimate.
template <class F>
double integrate(F&& g, double a, double b, const QuadratureConfig& cfg = {}) {
  if (!(a < b)) {
    if (a == b) return 0.0;
    throw ArgumentError("integration bounds out of order");
  }
  const auto& rule = gauss_rule(cfg.order);
  bool converged = true;
  const double v =
      detail::integrate_rec(g, a, b, cfg.abs_tol, 0, rule, cfg, converged);
  if (!converged && v != kInf)
    throw AccuracyError("quadrature did not converge", v);
  return v;
}

/// Integral over [a, b] where the integrand may blow up at one endpoint.
///
/// Works through geometric shells approaching the singular endpoint and
/// classifies the tail: decaying shells converge (with a geometric tail
/// bound), non-decaying shells mean the integral diverges to +inf.
template <class F>
double integrate_improper(F&& g, double a, double b, bool singular_at_b,
                          const QuadratureConfig& cfg = {}) {
  if (!(a < b)) {
    if (a == b) return 0.0;
    throw ArgumentError("integration bounds out of order");
  }
  double total = 0.0;
  double width = 0.5 * (b - a);
  double lo = singular_at_b ? a : a + width;
  double hi = singular_at_b ? b - width : b;
  std::vector<double> terms;
  const int max_shells = 360;
  for (int j = 1; j <= max_shells; ++j) {
    QuadratureConfig shell_cfg = cfg;
    shell_cfg.abs_tol = cfg.abs_tol / (static_cast<double>(j) * (j + 1));
    const double term = integrate(g, lo, hi, shell_cfg);
    // A term this size puts the total past kHugeIntegral: report +inf.
    if (term == kInf || term >= kHugeIntegral) return kInf;
    total += term;
    terms.push_back(term);

    const std::size_t n = terms.size();
    if (n >= 10) {
      // Non-decaying shells over a full window: divergence.
      bool nondecaying = true;
      for (std::size_t i = n - 9; i < n; ++i)
        if (!(terms[i] >= terms[i - 1] * (1.0 - 1e-9)) || terms[i] == 0.0)
          nondecaying = false;
      if (nondecaying && terms[n - 1] > 0) return kInf;
    }
    if (n >= 4) {
      double r = 0.0;
      for (std::size_t i = n - 3; i < n; ++i)
        if (terms[i - 1] > 0) r = std::max(r, terms[i] / terms[i - 1]);
      if (r < 0.9 && terms[n - 1] * r / (1.0 - r) <= cfg.abs_tol)
        return total;
      if (terms[n - 1] == 0.0) return total;
    }
    width *= 0.5;
    if (singular_at_b) {
      lo = hi;
      hi = b - width;
    } else {
      hi = lo;
      lo = a + width;
    }
    // Stop before shells collapse onto the singular endpoint (where rounded
    // quadrature nodes would touch it); close with a geometric tail bound.
    const double floor_w = 8 * std::numeric_limits<double>::epsilon() *
                           std::max({std::abs(a), std::abs(b), 1.0});
    if (!(lo < hi) || width <= floor_w) {
      double r = 0.0;
      const std::size_t n = terms.size();
      if (n >= 3)
        for (std::size_t i = n - 2; i < n; ++i)
          if (terms[i - 1] > 0) r = std::max(r, terms[i] / terms[i - 1]);
      if (r < 1.0) return total + terms.back() * (r / (1.0 - r));
      throw AccuracyError("improper integral exhausted double precision",
                          total);
    }
  }
  throw AccuracyError("improper integral did not settle", total);
}

}  // namespace mos
