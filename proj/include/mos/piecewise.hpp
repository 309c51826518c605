#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "mos/errors.hpp"

namespace mos {

namespace poly {

/// Coefficient vectors c represent c[0] + c[1] t + c[2] t^2 + ...

inline double eval(const std::vector<double>& c, double t) {
  double v = 0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
  return v;
}

inline std::vector<double> add(const std::vector<double>& a,
                               const std::vector<double>& b) {
  std::vector<double> r(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return r;
}

inline std::vector<double> scale(std::vector<double> a, double s) {
  for (double& v : a) v *= s;
  return a;
}

inline std::vector<double> mul(const std::vector<double>& a,
                               const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

/// Taylor shift: coefficients of p(t + s).
inline std::vector<double> shift(const std::vector<double>& c, double s) {
  if (s == 0.0) return c;
  std::vector<double> r(c.size(), 0.0);
  // Horner in t + s: r = ((c_n)(t+s) + c_{n-1})(t+s) + ...
  for (std::size_t k = c.size(); k-- > 0;) {
    for (std::size_t i = r.size() - 1; i > 0; --i)
      r[i] = r[i - 1] + s * r[i];
    r[0] = s * r[0] + c[k];
  }
  return r;
}

inline std::vector<double> derivative(const std::vector<double>& c) {
  if (c.size() <= 1) return {0.0};
  std::vector<double> r(c.size() - 1);
  for (std::size_t k = 1; k < c.size(); ++k) r[k - 1] = k * c[k];
  return r;
}

inline std::vector<double> antiderivative(const std::vector<double>& c) {
  std::vector<double> r(c.size() + 1, 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) r[k + 1] = c[k] / (k + 1);
  return r;
}

inline void trim(std::vector<double>& c) {
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
}

/// Sign-change roots of p on (lo, hi), ascending. Tangential (even
/// multiplicity) roots are not reported; they never flip the sign.
inline std::vector<double> sign_change_roots(const std::vector<double>& c,
                                             double lo, double hi) {
  std::vector<double> roots;
  std::size_t deg = 0;
  for (std::size_t k = 0; k < c.size(); ++k)
    if (c[k] != 0.0) deg = k;
  if (deg == 0) return roots;
  const int samples = std::max<int>(64, 16 * static_cast<int>(deg));
  // Walk nonzero samples only: a zero sample is itself a root, and the
  // bracket between the surrounding nonzero samples localizes it exactly
  // when the sign flips across it (tangential touches do not flip).
  double prev_x = 0;
  int prev_sign = 0;
  for (int i = 0; i <= samples; ++i) {
    const double x = lo + (hi - lo) * i / samples;
    const double v = eval(c, x);
    const int sign = v > 0 ? 1 : (v < 0 ? -1 : 0);
    if (sign == 0) continue;
    if (prev_sign != 0 && sign != prev_sign) {
      double a = prev_x, b = x, fa = eval(c, prev_x);
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = eval(c, m);
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if ((fa < 0) == (fm < 0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
        if (b - a <= 1e-15 * std::max(1.0, std::abs(m))) break;
      }
      const double r = 0.5 * (a + b);
      if (r > lo && r < hi) roots.push_back(r);
    }
    prev_x = x;
    prev_sign = sign;
  }
  return roots;
}

}  // namespace poly

/// Piecewise polynomial on [alpha, beta]: breakpoints g0 < ... < gm and one
/// coefficient vector per cell in the local basis (x - g_{i-1}).
///
/// The value class for all norm, modular, and operator computations; its
/// calculus (antiderivative, weak derivative, products, lattice operations)
/// is exact up to rounding.
class PiecewiseFunction {
 public:
  PiecewiseFunction(std::vector<double> breakpoints,
                    std::vector<std::vector<double>> coefficients)
      : breaks_(std::move(breakpoints)), coeffs_(std::move(coefficients)) {
    if (breaks_.size() < 2 || coeffs_.size() + 1 != breaks_.size())
      throw ArgumentError("piecewise: need m+1 breakpoints and m cells");
    for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
      if (!(std::isfinite(breaks_[i]) && breaks_[i] < breaks_[i + 1]))
        throw ArgumentError("piecewise: breakpoints must be finite ascending");
    }
    for (auto& c : coeffs_) {
      if (c.empty()) c = {0.0};
      poly::trim(c);
    }
  }

  static PiecewiseFunction zero(double a, double b) {
    return PiecewiseFunction({a, b}, {{0.0}});
  }

  static PiecewiseFunction constant(double a, double b, double v) {
    return PiecewiseFunction({a, b}, {{v}});
  }

  /// Step function: values[i] on (breakpoints[i], breakpoints[i+1]).
  static PiecewiseFunction step(std::vector<double> breakpoints,
                                const std::vector<double>& values) {
    if (values.size() + 1 != breakpoints.size())
      throw ArgumentError("step: need one value per cell");
    std::vector<std::vector<double>> coeffs;
    coeffs.reserve(values.size());
    for (double v : values) coeffs.push_back({v});
    return PiecewiseFunction(std::move(breakpoints), std::move(coeffs));
  }

  /// Indicator-science helper: value v on (lo, hi) inside [a, b], 0 outside.
  static PiecewiseFunction box(double a, double b, double lo, double hi,
                               double v) {
    if (!(a <= lo && lo < hi && hi <= b))
      throw ArgumentError("box: need a <= lo < hi <= b");
    std::vector<double> bp{a};
    std::vector<double> vals;
    if (lo > a) {
      bp.push_back(lo);
      vals.push_back(0.0);
    }
    bp.push_back(hi);
    vals.push_back(v);
    if (hi < b) {
      bp.push_back(b);
      vals.push_back(0.0);
    }
    return step(std::move(bp), vals);
  }

  double alpha() const { return breaks_.front(); }
  double beta() const { return breaks_.back(); }
  std::size_t cells() const { return coeffs_.size(); }
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& cell_coefficients(std::size_t i) const {
    return coeffs_[i];
  }
  double cell_left(std::size_t i) const { return breaks_[i]; }
  double cell_right(std::size_t i) const { return breaks_[i + 1]; }

  std::size_t degree() const {
    std::size_t d = 0;
    for (const auto& c : coeffs_) d = std::max(d, c.size() - 1);
    return d;
  }

  std::size_t cell_index(double x) const {
    if (!(x >= alpha() && x <= beta()))
      throw DomainError("evaluation point outside [alpha, beta]");
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - breaks_.begin());
    if (i == 0) return 0;
    if (i > coeffs_.size()) return coeffs_.size() - 1;
    return i - 1;
  }

  double operator()(double x) const {
    const std::size_t i = cell_index(x);
    return poly::eval(coeffs_[i], x - breaks_[i]);
  }

  /// Max of |f| over the interval, via endpoints and stationary points.
  double max_abs() const {
    double m = 0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      const double len = breaks_[i + 1] - breaks_[i];
      m = std::max(m, std::abs(poly::eval(coeffs_[i], 0.0)));
      m = std::max(m, std::abs(poly::eval(coeffs_[i], len)));
      if (coeffs_[i].size() > 2) {
        for (double r :
             poly::sign_change_roots(poly::derivative(coeffs_[i]), 0.0, len))
          m = std::max(m, std::abs(poly::eval(coeffs_[i], r)));
      }
    }
    return m;
  }

  bool continuous(double tol = 1e-9) const {
    const double scale = std::max(1.0, max_abs());
    for (std::size_t i = 0; i + 1 < coeffs_.size(); ++i) {
      const double left =
          poly::eval(coeffs_[i], breaks_[i + 1] - breaks_[i]);
      const double right = poly::eval(coeffs_[i + 1], 0.0);
      if (std::abs(left - right) > tol * scale) return false;
    }
    return true;
  }

  /// Exact integral over the whole interval.
  double integral() const {
    double total = 0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      const auto F = poly::antiderivative(coeffs_[i]);
      total += poly::eval(F, breaks_[i + 1] - breaks_[i]);
    }
    return total;
  }

  /// x -> integral from alpha to x; continuous, one degree higher.
  PiecewiseFunction antiderivative() const {
    std::vector<std::vector<double>> coeffs;
    coeffs.reserve(coeffs_.size());
    double acc = 0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      auto F = poly::antiderivative(coeffs_[i]);
      F[0] = acc;
      acc = poly::eval(F, breaks_[i + 1] - breaks_[i]);
      coeffs.push_back(std::move(F));
    }
    return PiecewiseFunction(breaks_, std::move(coeffs));
  }

  /// Cellwise derivative; requires continuity across interior breakpoints.
  PiecewiseFunction weak_derivative() const {
    if (!continuous())
      throw NotWeaklyDifferentiableError(
          "weak derivative requires a continuous piecewise function");
    std::vector<std::vector<double>> coeffs;
    coeffs.reserve(coeffs_.size());
    for (const auto& c : coeffs_) coeffs.push_back(poly::derivative(c));
    return PiecewiseFunction(breaks_, std::move(coeffs));
  }

  PiecewiseFunction operator-() const {
    auto coeffs = coeffs_;
    for (auto& c : coeffs)
      for (double& v : c) v = -v;
    return PiecewiseFunction(breaks_, std::move(coeffs));
  }

  PiecewiseFunction scaled(double s) const {
    auto coeffs = coeffs_;
    for (auto& c : coeffs)
      for (double& v : c) v *= s;
    return PiecewiseFunction(breaks_, std::move(coeffs));
  }

  friend PiecewiseFunction operator+(const PiecewiseFunction& f,
                                     const PiecewiseFunction& g) {
    return combine(f, g, false);
  }
  friend PiecewiseFunction operator-(const PiecewiseFunction& f,
                                     const PiecewiseFunction& g) {
    return combine(f, g, true);
  }

  /// Pointwise product; exact (degrees add).
  friend PiecewiseFunction operator*(const PiecewiseFunction& f,
                                     const PiecewiseFunction& g) {
    check_same_interval(f, g);
    const auto breaks = merged_breaks(f, g);
    std::vector<std::vector<double>> coeffs;
    coeffs.reserve(breaks.size() - 1);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
      coeffs.push_back(
          poly::mul(f.local_on(breaks[i]), g.local_on(breaks[i])));
    return PiecewiseFunction(breaks, std::move(coeffs));
  }

  /// |f|: inserts sign-crossing breakpoints, flips negative cells.
  PiecewiseFunction abs() const {
    std::vector<double> breaks;
    std::vector<std::vector<double>> coeffs;
    breaks.push_back(breaks_.front());
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      const double len = breaks_[i + 1] - breaks_[i];
      std::vector<double> cuts{0.0};
      for (double r : poly::sign_change_roots(coeffs_[i], 0.0, len))
        cuts.push_back(r);
      cuts.push_back(len);
      for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
        auto c = poly::shift(coeffs_[i], cuts[j]);
        const double mid = 0.5 * (cuts[j + 1] - cuts[j]);
        if (poly::eval(c, mid) < 0)
          for (double& v : c) v = -v;
        poly::trim(c);
        // The cell's right end must be the exact original breakpoint.
        breaks.push_back(j + 2 == cuts.size() ? breaks_[i + 1]
                                              : breaks_[i] + cuts[j + 1]);
        coeffs.push_back(std::move(c));
      }
    }
    return PiecewiseFunction(std::move(breaks), std::move(coeffs));
  }

  friend PiecewiseFunction max(const PiecewiseFunction& f,
                               const PiecewiseFunction& g) {
    auto d = f - g;
    return (f + g + d.abs()).scaled(0.5);
  }
  friend PiecewiseFunction min(const PiecewiseFunction& f,
                               const PiecewiseFunction& g) {
    auto d = f - g;
    return (f + g - d.abs()).scaled(0.5);
  }

  /// Serialization: full-precision text, round-trip stable.
  std::string to_text() const {
    std::ostringstream os;
    os << "piecewise v1\n";
    os << "breakpoints";
    char buf[40];
    for (double b : breaks_) {
      std::snprintf(buf, sizeof buf, " %.17g", b);
      os << buf;
    }
    os << "\n";
    for (const auto& c : coeffs_) {
      os << "cell";
      for (double v : c) {
        std::snprintf(buf, sizeof buf, " %.17g", v);
        os << buf;
      }
      os << "\n";
    }
    return os.str();
  }

  static PiecewiseFunction from_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "piecewise v1")
      throw ParseError("expected 'piecewise v1' header", 0);
    std::vector<double> breaks;
    std::vector<std::vector<double>> coeffs;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::string tag;
      ls >> tag;
      if (tag == "breakpoints") {
        double v;
        while (ls >> v) breaks.push_back(v);
      } else if (tag == "cell") {
        std::vector<double> c;
        double v;
        while (ls >> v) c.push_back(v);
        coeffs.push_back(std::move(c));
      } else {
        throw ParseError("unknown line tag '" + tag + "'", 0);
      }
    }
    return PiecewiseFunction(std::move(breaks), std::move(coeffs));
  }

 private:
  static void check_same_interval(const PiecewiseFunction& f,
                                  const PiecewiseFunction& g) {
    if (f.alpha() != g.alpha() || f.beta() != g.beta())
      throw ArgumentError("piecewise operands live on different intervals");
  }

  static std::vector<double> merged_breaks(const PiecewiseFunction& f,
                                           const PiecewiseFunction& g) {
    std::vector<double> breaks;
    breaks.reserve(f.breaks_.size() + g.breaks_.size());
    std::merge(f.breaks_.begin(), f.breaks_.end(), g.breaks_.begin(),
               g.breaks_.end(), std::back_inserter(breaks));
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    return breaks;
  }

  /// Local coefficients of this function on the cell starting at x0.
  std::vector<double> local_on(double x0) const {
    const std::size_t i = cell_index(x0 == beta() ? beta() : x0);
    return poly::shift(coeffs_[i], x0 - breaks_[i]);
  }

  static PiecewiseFunction combine(const PiecewiseFunction& f,
                                   const PiecewiseFunction& g, bool minus) {
    check_same_interval(f, g);
    const auto breaks = merged_breaks(f, g);
    std::vector<std::vector<double>> coeffs;
    coeffs.reserve(breaks.size() - 1);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      auto a = f.local_on(breaks[i]);
      auto b = g.local_on(breaks[i]);
      coeffs.push_back(minus ? poly::add(a, poly::scale(b, -1.0))
                             : poly::add(a, b));
    }
    return PiecewiseFunction(breaks, std::move(coeffs));
  }

  std::vector<double> breaks_;
  std::vector<std::vector<double>> coeffs_;
};

}  // namespace mos
