#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mos/domain.hpp"
#include "mos/errors.hpp"
#include "mos/expression.hpp"
#include "mos/extended.hpp"
#include "mos/quadrature.hpp"

namespace mos {

enum class Semidecision { HOLDS, VIOLATED, INCONCLUSIVE };

inline const char* to_string(Semidecision s) {
  switch (s) {
    case Semidecision::HOLDS: return "HOLDS";
    case Semidecision::VIOLATED: return "VIOLATED";
    case Semidecision::INCONCLUSIVE: return "INCONCLUSIVE";
  }
  return "?";
}

/// Essential bounds of a scalar field over the interval.
///
/// `exact` is set when the expression was piecewise monotone (finitely many
/// derivative sign changes), so extrema sit at piece endpoints, critical
/// points, or blow-up points; otherwise the bounds are grid estimates.
struct FieldBounds {
  double lo = kInf;
  double hi = -kInf;
  bool exact = false;
  int grid_size = 0;
  double argmin = 0;
  double argmax = 0;
  // -1: approached from the left, +1: from the right, 0: attained there.
  int argmin_side = 0;
  int argmax_side = 0;
};

/// Expression in x over a Domain with certified essential bounds.
class ScalarField {
 public:
  ScalarField(const Domain& dom, std::string expr_text)
      : text_(std::move(expr_text)) {
    expr_ = parse_expression(text_, std::string("x"));
    compute_bounds(dom);
  }

  double operator()(double x) const { return expr_->eval1(x); }
  const std::string& text() const { return text_; }
  const Expr::Ptr& expr() const { return expr_; }
  const FieldBounds& bounds() const { return bounds_; }

 private:
  void compute_bounds(const Domain& dom) {
    const double a = dom.alpha, b = dom.beta, span = b - a;
    struct Probe {
      double x;
      double v;
      int side;
    };
    std::vector<Probe> probes;
    auto push = [&](double x, int side) {
      if (x < a || x > b) return;
      const double v = expr_->eval1(x);
      if (!std::isnan(v)) probes.push_back({x, v, side});
    };

    // Critical points from derivative sign changes on a scan grid.
    const int scan_n = 512;
    auto dexpr = expr_->derivative(0);
    int sign_changes = 0;
    std::vector<std::pair<double, double>> change_brackets;
    double px = a + span * 0.5 / scan_n;
    double pv = dexpr->eval1(px);
    for (int i = 1; i < scan_n; ++i) {
      const double x = a + span * (i + 0.5) / scan_n;
      const double v = dexpr->eval1(x);
      if (std::isfinite(pv) && std::isfinite(v) &&
          ((pv < 0 && v > 0) || (pv > 0 && v < 0))) {
        ++sign_changes;
        if (change_brackets.size() < 64) change_brackets.emplace_back(px, x);
      }
      px = x;
      pv = v;
    }
    const bool piecewise_monotone = sign_changes <= 32;
    for (auto [lo, hi] : change_brackets) {
      double flo = dexpr->eval1(lo);
      for (int it = 0;
           it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double m = 0.5 * (lo + hi);
        const double fm = dexpr->eval1(m);
        if (fm == 0.0) {
          lo = hi = m;
          break;
        }
        if ((flo < 0) == (fm < 0)) {
          lo = m;
          flo = fm;
        } else {
          hi = m;
        }
      }
      push(0.5 * (lo + hi), 0);
    }

    // Endpoints, declared singularities, and geometric approach probes.
    std::vector<std::pair<double, int>> special{{a, +1}, {b, -1}};
    for (double s : dom.singularities)
      if (s >= a && s <= b) special.emplace_back(s, 0);
    for (auto [s, side_hint] : special) {
      push(s, side_hint);
      for (int j = 4; j <= 48; ++j) {
        const double w = span * std::pow(0.5, j);
        push(s - w, -1);
        push(s + w, +1);
      }
    }
    // Uniform backstop grid.
    for (int i = 0; i < scan_n; ++i) push(a + span * (i + 0.5) / scan_n, 0);

    if (probes.empty())
      throw ArgumentError("field '" + text_ + "' has no finite values");
    bounds_.exact = piecewise_monotone;
    bounds_.grid_size = scan_n;
    for (const auto& p : probes) {
      if (p.v < bounds_.lo) {
        bounds_.lo = p.v;
        bounds_.argmin = p.x;
        bounds_.argmin_side = p.side;
      }
      if (p.v > bounds_.hi) {
        bounds_.hi = p.v;
        bounds_.argmax = p.x;
        bounds_.argmax_side = p.side;
      }
    }
  }

  std::string text_;
  Expr::Ptr expr_;
  FieldBounds bounds_;
};

/// Variable exponent p(x); bounds cached, p >= 1 enforced.
class ExponentField : public ScalarField {
 public:
  ExponentField(const Domain& dom, std::string expr_text)
      : ScalarField(dom, std::move(expr_text)) {
    if (!(bounds().lo >= 1.0 - 1e-9))
      throw ArgumentError("exponent field '" + text() + "' dips below 1");
  }
  double lo() const { return bounds().lo; }
  double hi() const { return bounds().hi; }
};

/// Weight a(x) >= 0 with an integrability flag decided by quadrature.
class WeightField : public ScalarField {
 public:
  WeightField(const Domain& dom, std::string expr_text)
      : ScalarField(dom, std::move(expr_text)) {
    if (!(bounds().lo >= -1e-12))
      throw ArgumentError("weight field '" + text() + "' is negative");
    integrable_ = decide_integrable(dom);
  }

  bool integrable_on_domain() const { return integrable_; }
  double integral_value() const { return integral_; }

 private:
  bool decide_integrable(const Domain& dom) {
    const auto pts = dom.split_points();
    double total = 0;
    auto g = [&](double x) { return std::max(0.0, (*this)(x)); };
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      // Each segment may blow up toward either end; split at the middle and
      // integrate both halves as improper integrals.
      const double lo = pts[i], hi = pts[i + 1], mid = 0.5 * (lo + hi);
      try {
        const double left = integrate_improper(g, lo, mid, false, dom.quad);
        if (left == kInf) return false;
        const double right = integrate_improper(g, mid, hi, true, dom.quad);
        if (right == kInf) return false;
        total += left + right;
      } catch (const AccuracyError&) {
        return false;
      }
    }
    integral_ = total;
    return true;
  }

  bool integrable_ = false;
  double integral_ = kInf;
};

namespace detail {

/// t^p with the p = +inf convention: 0 for t<1, 1 at t=1, +inf beyond.
inline double pow_ext(double t, double p) {
  if (p == kInf) return t < 1 ? 0.0 : (t == 1 ? 1.0 : kInf);
  return std::pow(t, p);
}

struct SupResult {
  double value;
  double argmax;
};

/// sup_{s>=0} (s t - phi(s)) for convex nondecreasing phi with phi(0) = 0.
///
/// Bracket expansion doubles s_hi until the mean slope phi(s)/s reaches t
/// (convexity puts the maximizer below such an s_hi); if the slope stays
/// short of t up to overflow scale the gap grows linearly: +inf. Then a
/// log-spaced grid plus golden-section refinement locates the maximizer.
template <class F>
SupResult legendre_sup(F&& phi, double t) {
  if (t == 0.0) return {0.0, 0.0};
  double s_hi = 1.0;
  for (;;) {
    const double v = phi(s_hi);
    if (v == kInf || v / s_hi >= t) break;
    s_hi *= 2;
    if (s_hi > 1e300) return {kInf, kInf};
  }
  auto g = [&](double s) {
    const double v = phi(s);
    return v == kInf ? -kInf : s * t - v;
  };
  const int n = 96;
  const double s_lo = s_hi * 1e-12;
  double best = 0.0, best_s = 0.0;  // s = 0 contributes g = 0
  const double ratio = std::pow(s_hi / s_lo, 1.0 / (n - 1));
  double s = s_lo;
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i, s *= ratio) {
    grid[i] = s;
    const double v = g(s);
    if (v > best) {
      best = v;
      best_s = s;
    }
  }
  // Golden refinement around the grid argmax.
  double lo = best_s == 0.0 ? 0.0 : best_s / ratio;
  double hi = best_s == 0.0 ? grid[0] : std::min(best_s * ratio, s_hi);
  const double gr = 0.6180339887498949;
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
    if (gc >= gd) {
      hi = d;
      d = c;
      gd = gc;
      c = hi - gr * (hi - lo);
      gc = g(c);
    } else {
      lo = c;
      c = d;
      gc = gd;
      d = lo + gr * (hi - lo);
      gd = g(d);
    }
  }
  const double s_star = 0.5 * (lo + hi);
  const double v_star = g(s_star);
  if (v_star > best) {
    best = v_star;
    best_s = s_star;
  }
  return {std::max(0.0, best), best_s};
}

}  // namespace detail

/// Musielak-Orlicz function Phi(x, t), possibly extended-valued.
///
/// Immutable; all operations are pure and safe to call concurrently.
class MOFunction {
 public:
  enum class Family {
    Orlicz,
    VariableExponent,
    DoublePhase,
    Tabulated,
    Conjugate  // numeric conjugate of another family
  };

  static MOFunction orlicz(const Domain& dom, const std::string& phi_expr);
  static MOFunction variable_exponent(const Domain& dom,
                                      const std::string& p_expr);
  static MOFunction double_phase(const Domain& dom, const std::string& p_expr,
                                 const std::string& r_expr,
                                 const std::string& a_expr);
  /// x_edges: m+1 bin edges; t_grid: n points starting at 0; values: m rows
  /// of n samples, convex and nondecreasing in t, 0 at t=0.
  static MOFunction tabulated(const Domain& dom, std::vector<double> x_edges,
                              std::vector<double> t_grid,
                              std::vector<std::vector<double>> values);

  Family family() const { return impl_->family(); }
  const Domain& domain() const { return impl_->dom; }
  std::string describe() const { return impl_->describe(); }

  /// Phi(x, t); +inf is a valid value.
  double evaluate(double x, double t) const {
    check_point(x, t);
    return impl_->eval(x, t);
  }

  /// Right derivative of Phi(x, .) at t; requires Phi(x, t) finite.
  double right_derivative(double x, double t) const {
    check_point(x, t);
    if (impl_->eval(x, t) == kInf)
      throw ExtendedValueError("right derivative at a +inf point");
    return impl_->right_deriv(x, t);
  }

  /// Fenchel conjugate; closed form when the family has one, else numeric.
  double conjugate(double x, double t) const {
    check_point(x, t);
    return impl_->conj(x, t);
  }

  /// The sup-over-s Legendre engine, regardless of closed forms.
  double conjugate_numeric(double x, double t) const {
    check_point(x, t);
    return detail::legendre_sup([&](double s) { return impl_->eval(x, s); },
                                t)
        .value;
  }

  /// Maximizer s* of s t - Phi(x,s): a subgradient of the conjugate at t.
  double conjugate_argmax(double x, double t) const {
    check_point(x, t);
    return detail::legendre_sup([&](double s) { return impl_->eval(x, s); },
                                t)
        .argmax;
  }

  /// inf{u >= 0 : Phi(x, u) >= t} by bisection with bracket expansion.
  double generalized_inverse(double x, double t) const {
    check_point(x, t);
    if (t == kInf) throw ArgumentError("generalized inverse of +inf level");
    if (t == 0.0) return 0.0;
    double hi = 1.0;
    while (impl_->eval(x, hi) < t) {
      hi *= 2;
      if (hi > 1e300)
        throw UnreachableLevelError("level above sup of Phi(x, .)");
    }
    double lo = hi > 1.0 ? hi / 2 : 0.0;
    if (impl_->eval(x, lo) >= t) lo = 0.0;
    while (hi - lo > 1e-10 * std::max(1.0, hi)) {
      const double m = 0.5 * (lo + hi);
      if (impl_->eval(x, m) >= t)
        hi = m;
      else
        lo = m;
    }
    return hi;
  }

  /// The conjugate as a function object: closed form for variable exponent,
  /// a numeric wrapper family otherwise.
  MOFunction conjugate_function() const;

  // Family introspection (null when the family lacks the part).
  const ExponentField* exponent_p() const { return impl_->field_p(); }
  const ExponentField* exponent_r() const { return impl_->field_r(); }
  const WeightField* weight_a() const { return impl_->field_a(); }
  const Expr::Ptr& orlicz_phi() const { return impl_->phi_expr(); }
  /// For Family::Conjugate: the function this one is the conjugate of.
  const MOFunction* conjugate_base() const { return impl_->base(); }

 private:
  struct Impl {
    Domain dom;
    virtual ~Impl() = default;
    virtual Family family() const = 0;
    virtual std::string describe() const = 0;
    virtual double eval(double x, double t) const = 0;
    virtual double right_deriv(double x, double t) const = 0;
    virtual double conj(double x, double t) const = 0;
    virtual const ExponentField* field_p() const { return nullptr; }
    virtual const ExponentField* field_r() const { return nullptr; }
    virtual const WeightField* field_a() const { return nullptr; }
    virtual const Expr::Ptr& phi_expr() const {
      static const Expr::Ptr none;
      return none;
    }
    virtual const MOFunction* base() const { return nullptr; }
  };

  struct OrliczImpl;
  struct VariableExponentImpl;
  struct DoublePhaseImpl;
  struct TabulatedImpl;
  struct ConjugateImpl;

  explicit MOFunction(std::shared_ptr<const Impl> impl)
      : impl_(std::move(impl)) {}

  void check_point(double x, double t) const {
    if (!(x >= impl_->dom.alpha && x <= impl_->dom.beta))
      throw DomainError("x outside the interval");
    if (!(t >= 0)) throw ArgumentError("t must be nonnegative");
  }

  std::shared_ptr<const Impl> impl_;
};

struct MOFunction::OrliczImpl final : MOFunction::Impl {
  Expr::Ptr phi;
  Expr::Ptr dphi;
  std::string text;

  Family family() const override { return Family::Orlicz; }
  std::string describe() const override { return "orlicz phi = " + text; }
  double eval(double, double t) const override {
    const double v = phi->eval1(t);
    if (std::isnan(v)) throw ExtendedValueError("phi evaluated to NaN");
    return v;
  }
  double right_deriv(double, double t) const override {
    const double v = dphi->eval1(t);
    return std::isnan(v) ? kInf : v;
  }
  double conj(double, double t) const override {
    return detail::legendre_sup([&](double s) { return eval(0, s); }, t)
        .value;
  }
  const Expr::Ptr& phi_expr() const override { return phi; }
};

struct MOFunction::VariableExponentImpl final : MOFunction::Impl {
  std::shared_ptr<ExponentField> p;

  Family family() const override { return Family::VariableExponent; }
  std::string describe() const override {
    return "variable-exponent p = " + p->text();
  }
  double eval(double x, double t) const override {
    const double px = (*p)(x);
    if (t == 0.0) return 0.0;
    if (px == kInf || px > 1e290) return t <= 1 ? 0.0 : kInf;
    return detail::pow_ext(t, px) / px;
  }
  double right_deriv(double x, double t) const override {
    const double px = (*p)(x);
    if (px == kInf || px > 1e290) return t < 1 ? 0.0 : kInf;
    return detail::pow_ext(t, px - 1);
  }
  double conj(double x, double t) const override {
    const double px = (*p)(x);
    if (t == 0.0) return 0.0;
    if (px <= 1.0 + 1e-15) return t <= 1 ? 0.0 : kInf;
    if (px == kInf || px > 1e290) return t;  // q = 1
    const double q = px / (px - 1.0);
    return detail::pow_ext(t, q) / q;
  }
  const ExponentField* field_p() const override { return p.get(); }
};

struct MOFunction::DoublePhaseImpl final : MOFunction::Impl {
  std::shared_ptr<ExponentField> p, r;
  std::shared_ptr<WeightField> a;

  Family family() const override { return Family::DoublePhase; }
  std::string describe() const override {
    return "double-phase p = " + p->text() + ", r = " + r->text() +
           ", a = " + a->text();
  }
  double eval(double x, double t) const override {
    if (t == 0.0) return 0.0;
    const double px = (*p)(x), rx = (*r)(x), ax = (*a)(x);
    const double t1 = detail::pow_ext(t, px);
    const double t2 = ext_mul(std::max(0.0, ax), detail::pow_ext(t, rx));
    return ext_add(t1, t2);
  }
  double right_deriv(double x, double t) const override {
    const double px = (*p)(x), rx = (*r)(x), ax = (*a)(x);
    return ext_add(
        ext_mul(px, detail::pow_ext(t, px - 1)),
        ext_mul(std::max(0.0, ax) * rx, detail::pow_ext(t, rx - 1)));
  }
  double conj(double x, double t) const override {
    return detail::legendre_sup([&](double s) { return eval(x, s); }, t)
        .value;
  }
  const ExponentField* field_p() const override { return p.get(); }
  const ExponentField* field_r() const override { return r.get(); }
  const WeightField* field_a() const override { return a.get(); }
};

struct MOFunction::TabulatedImpl final : MOFunction::Impl {
  std::vector<double> x_edges;              // m+1
  std::vector<double> t_grid;               // n, t_grid[0] == 0
  std::vector<std::vector<double>> values;  // m rows of n

  Family family() const override { return Family::Tabulated; }
  std::string describe() const override {
    return "tabulated (" + std::to_string(x_edges.size() - 1) + " x-bins, " +
           std::to_string(t_grid.size()) + " t-samples)";
  }

  std::size_t bin(double x) const {
    const auto it = std::upper_bound(x_edges.begin(), x_edges.end(), x);
    std::size_t i = static_cast<std::size_t>(it - x_edges.begin());
    if (i == 0) return 0;
    if (i >= x_edges.size()) return x_edges.size() - 2;
    return i - 1;
  }

  double eval(double x, double t) const override {
    const auto& row = values[bin(x)];
    const std::size_t n = t_grid.size();
    if (t >= t_grid[n - 1]) {
      // extend linearly with the last slope
      const double slope =
          (row[n - 1] - row[n - 2]) / (t_grid[n - 1] - t_grid[n - 2]);
      return row[n - 1] + slope * (t - t_grid[n - 1]);
    }
    const auto it = std::upper_bound(t_grid.begin(), t_grid.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - t_grid.begin());
    const std::size_t i = j == 0 ? 0 : j - 1;
    const double w = (t - t_grid[i]) / (t_grid[i + 1] - t_grid[i]);
    return row[i] + w * (row[i + 1] - row[i]);
  }

  double right_deriv(double x, double t) const override {
    const auto& row = values[bin(x)];
    const std::size_t n = t_grid.size();
    if (t >= t_grid[n - 1])
      return (row[n - 1] - row[n - 2]) / (t_grid[n - 1] - t_grid[n - 2]);
    // right derivative: slope of the segment to the right of t
    std::size_t j = static_cast<std::size_t>(
        std::upper_bound(t_grid.begin(), t_grid.end(), t) - t_grid.begin());
    if (j == 0) j = 1;
    return (row[j] - row[j - 1]) / (t_grid[j] - t_grid[j - 1]);
  }

  /// Exact polygonal Legendre transform: the sup over a polygon is attained
  /// at a vertex; +inf beyond the final slope.
  double conj(double x, double t) const override {
    const auto& row = values[bin(x)];
    const std::size_t n = t_grid.size();
    const double last_slope =
        (row[n - 1] - row[n - 2]) / (t_grid[n - 1] - t_grid[n - 2]);
    if (t > last_slope) return kInf;
    double best = 0;
    for (std::size_t i = 0; i < n; ++i)
      best = std::max(best, t * t_grid[i] - row[i]);
    return best;
  }
};

struct MOFunction::ConjugateImpl final : MOFunction::Impl {
  std::shared_ptr<const MOFunction> base_fn;

  Family family() const override { return Family::Conjugate; }
  std::string describe() const override {
    return "conjugate of [" + base_fn->describe() + "]";
  }
  double eval(double x, double t) const override {
    return base_fn->conjugate(x, t);
  }
  double right_deriv(double x, double t) const override {
    // The maximizer of s t - Phi(x,s) is a subgradient of Phi* at t.
    return base_fn->conjugate_argmax(x, t);
  }
  double conj(double x, double t) const override {
    return detail::legendre_sup([&](double s) { return eval(x, s); }, t)
        .value;
  }
  const MOFunction* base() const override { return base_fn.get(); }
};

namespace detail {

/// Light construction-time validation shared by the families.
inline void validate_mo(const MOFunction& f) {
  const auto& dom = f.domain();
  const double xs[] = {dom.alpha + dom.length() * 0.13,
                       dom.alpha + dom.length() * 0.5,
                       dom.alpha + dom.length() * 0.87};
  for (double x : xs) {
    if (f.evaluate(x, 0.0) != 0.0) throw ArgumentError("Phi(x, 0) must be 0");
    double prev = 0.0;
    for (int i = -6; i <= 6; ++i) {
      const double t = std::pow(10.0, i);
      const double v = f.evaluate(x, t);
      if (v < prev - 1e-9 * std::max(1.0, prev))
        throw ArgumentError("Phi(x, .) must be nondecreasing");
      prev = v;
      const double vh = f.evaluate(x, t / 2);
      const double mid = f.evaluate(x, 0.75 * t);
      if (finite(v) && finite(vh) &&
          mid > 0.5 * (v + vh) + 1e-9 * std::max(1.0, v))
        throw ArgumentError("Phi(x, .) must be convex");
    }
  }
}

}  // namespace detail

inline MOFunction MOFunction::orlicz(const Domain& dom,
                                     const std::string& phi_expr) {
  dom.validate();
  auto impl = std::make_shared<OrliczImpl>();
  impl->dom = dom;
  impl->text = phi_expr;
  impl->phi = parse_expression(phi_expr, std::string("t"));
  impl->dphi = impl->phi->derivative(0);
  MOFunction f(impl);
  detail::validate_mo(f);
  return f;
}

inline MOFunction MOFunction::variable_exponent(const Domain& dom,
                                                const std::string& p_expr) {
  dom.validate();
  auto impl = std::make_shared<VariableExponentImpl>();
  impl->dom = dom;
  impl->p = std::make_shared<ExponentField>(dom, p_expr);
  MOFunction f(impl);
  detail::validate_mo(f);
  return f;
}

inline MOFunction MOFunction::double_phase(const Domain& dom,
                                           const std::string& p_expr,
                                           const std::string& r_expr,
                                           const std::string& a_expr) {
  dom.validate();
  auto impl = std::make_shared<DoublePhaseImpl>();
  impl->dom = dom;
  impl->p = std::make_shared<ExponentField>(dom, p_expr);
  impl->r = std::make_shared<ExponentField>(dom, r_expr);
  impl->a = std::make_shared<WeightField>(dom, a_expr);
  if (impl->r->bounds().lo < impl->p->bounds().lo - 1e-9)
    throw ArgumentError("double phase requires p <= r");
  MOFunction f(impl);
  detail::validate_mo(f);
  return f;
}

inline MOFunction MOFunction::tabulated(
    const Domain& dom, std::vector<double> x_edges, std::vector<double> t_grid,
    std::vector<std::vector<double>> values) {
  dom.validate();
  if (x_edges.size() < 2 || t_grid.size() < 2 ||
      values.size() + 1 != x_edges.size())
    throw ArgumentError("tabulated: need m+1 x-edges and m value rows");
  if (t_grid.front() != 0.0)
    throw ArgumentError("tabulated: t-grid must start at 0");
  for (const auto& row : values) {
    if (row.size() != t_grid.size())
      throw ArgumentError("tabulated: row length must match t-grid");
    if (row.front() != 0.0)
      throw ArgumentError("tabulated: Phi(x, 0) must be 0");
    double prev_slope = 0.0;
    for (std::size_t j = 1; j < row.size(); ++j) {
      const double slope = (row[j] - row[j - 1]) / (t_grid[j] - t_grid[j - 1]);
      if (slope < prev_slope - 1e-12)
        throw ArgumentError("tabulated: samples must be convex in t");
      if (row[j] < row[j - 1] - 1e-12)
        throw ArgumentError("tabulated: samples must be nondecreasing in t");
      prev_slope = slope;
    }
  }
  auto impl = std::make_shared<TabulatedImpl>();
  impl->dom = dom;
  impl->x_edges = std::move(x_edges);
  impl->t_grid = std::move(t_grid);
  impl->values = std::move(values);
  return MOFunction(impl);
}

inline MOFunction MOFunction::conjugate_function() const {
  if (family() == Family::VariableExponent) {
    // q = p/(p-1) in closed form; the q-field inherits the blow-up points
    // of 1/(p-1), which the bounds probes pick up at endpoints and declared
    // singular points.
    const auto& p = *exponent_p();
    auto q_text = "(" + p.text() + ")/((" + p.text() + ") - 1)";
    return variable_exponent(domain(), q_text);
  }
  auto impl = std::make_shared<ConjugateImpl>();
  impl->dom = domain();
  impl->base_fn = std::make_shared<const MOFunction>(*this);
  return MOFunction(impl);
}

struct GridSpec {
  double t_min = 1e-6;
  double t_max = 1e6;
  int t_points = 120;
  int x_points = 256;
};

struct DominationReport {
  Semidecision status = Semidecision::INCONCLUSIVE;
  double gap_integral = 0;
  double witness_x = 0;
  double witness_t = 0;
  std::string note;
};

/// Grid semidecision of "Phi2 is dominated by Phi1": Phi2(x, K t) <=
/// Phi1(x, t) + h(x) for an L1 budget on h. g(x) = sup_t max(0,
/// Phi2(x,Kt) - Phi1(x,t)); HOLDS when the x-integral of g fits the
/// budget, VIOLATED with a witness when the gap is +inf or still growing
/// through the top of the t-grid, INCONCLUSIVE otherwise.
inline DominationReport dominates(const MOFunction& phi1,
                                  const MOFunction& phi2, double K,
                                  double h_budget, const GridSpec& grid = {}) {
  if (phi1.domain().alpha != phi2.domain().alpha ||
      phi1.domain().beta != phi2.domain().beta)
    throw ArgumentError("dominates: functions live on different intervals");
  if (!(K > 0)) throw ArgumentError("dominates: K must be positive");
  if (!(h_budget >= 0)) throw ArgumentError("dominates: negative budget");
  const auto& dom = phi1.domain();
  DominationReport rep;
  const double lr = std::log(grid.t_max / grid.t_min);
  double integral = 0;
  bool any_tail_growing = false;
  for (int ix = 0; ix < grid.x_points; ++ix) {
    const double x = dom.alpha + dom.length() * (ix + 0.5) / grid.x_points;
    double g = 0, last = 0, last2 = 0;
    double arg_t = 0;
    bool tail_growing = false;
    for (int it = 0; it < grid.t_points; ++it) {
      const double t = grid.t_min * std::exp(lr * it / (grid.t_points - 1));
      const double v2 = phi2.evaluate(x, K * t);
      const double v1 = phi1.evaluate(x, t);
      double gap;
      if (v2 == kInf && v1 == kInf)
        gap = 0;
      else if (v2 == kInf)
        gap = kInf;
      else
        gap = std::max(0.0, v2 - v1);
      if (gap == kInf) {
        rep.status = Semidecision::VIOLATED;
        rep.witness_x = x;
        rep.witness_t = t;
        rep.note = "infinite gap at the witness point";
        rep.gap_integral = kInf;
        return rep;
      }
      if (gap > g) {
        g = gap;
        arg_t = t;
      }
      if (it == grid.t_points - 1 && gap > last && last > last2 && gap > 0)
        tail_growing = true;
      last2 = last;
      last = gap;
    }
    integral += g * dom.length() / grid.x_points;
    if (tail_growing && !any_tail_growing) {
      any_tail_growing = true;
      rep.witness_x = x;
      rep.witness_t = arg_t;
    }
  }
  rep.gap_integral = integral;
  if (integral <= h_budget) {
    rep.status = Semidecision::HOLDS;
    rep.note = "gap integral within budget";
  } else if (any_tail_growing) {
    rep.status = Semidecision::VIOLATED;
    rep.note = "gap grows through the top of the t-grid";
  } else {
    rep.status = Semidecision::INCONCLUSIVE;
    rep.note = "budget exceeded on the grid without certified growth";
  }
  return rep;
}

}  // namespace mos
