#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mos/errors.hpp"
#include "mos/extended.hpp"
#include "mos/mo_function.hpp"

using mos::Domain;
using mos::kInf;
using mos::MOFunction;
using mos::Semidecision;

namespace {

Domain unit() { return Domain(0, 1); }

Domain unit_singular_at_1() {
  Domain d(0, 1);
  d.singularities = {1.0};
  return d;
}

}  // namespace

TEST_CASE("variable exponent evaluation") {
  auto f = MOFunction::variable_exponent(unit(), "2");
  CHECK(f.evaluate(0.5, 0.0) == 0.0);
  CHECK_THAT(f.evaluate(0.5, 3.0), Catch::Matchers::WithinRel(4.5, 1e-15));
  CHECK_THAT(f.right_derivative(0.5, 3.0),
             Catch::Matchers::WithinRel(3.0, 1e-15));

  auto g = MOFunction::variable_exponent(unit(), "1+x");
  CHECK_THAT(g.evaluate(1.0, 2.0), Catch::Matchers::WithinRel(2.0, 1e-15));
  CHECK_THAT(g.evaluate(0.0, 2.0), Catch::Matchers::WithinRel(2.0, 1e-15));
}

TEST_CASE("exponent fields record bounds and blow-up locations") {
  auto f = MOFunction::variable_exponent(unit_singular_at_1(), "1/(1-x)");
  const auto& b = f.exponent_p()->bounds();
  CHECK_THAT(b.lo, Catch::Matchers::WithinRel(1.0, 1e-9));
  CHECK(b.hi == kInf);
  CHECK_THAT(b.argmax, Catch::Matchers::WithinAbs(1.0, 1e-9));
  CHECK(b.exact);

  // sin(3x) >= 0 on [0,1] (3 < pi), peak at 3x = pi/2 inside the interval
  auto g = MOFunction::variable_exponent(unit(), "2 + sin(3*x)");
  const auto& bg = g.exponent_p()->bounds();
  CHECK_THAT(bg.lo, Catch::Matchers::WithinAbs(2.0, 1e-9));
  CHECK_THAT(bg.hi, Catch::Matchers::WithinAbs(3.0, 1e-9));
  CHECK_THAT(bg.argmax, Catch::Matchers::WithinAbs(M_PI / 6, 1e-6));
}

TEST_CASE("exponents below 1 are rejected") {
  CHECK_THROWS_AS(MOFunction::variable_exponent(unit(), "x"),
                  mos::ArgumentError);
  CHECK_THROWS_AS(MOFunction::variable_exponent(unit(), "1/2"),
                  mos::ArgumentError);
}

TEST_CASE("infinite exponent convention") {
  // p blows up at x = 1: Phi(1, t) is 0 up to 1 and +inf beyond
  auto f = MOFunction::variable_exponent(unit_singular_at_1(), "1/(1-x)");
  CHECK(f.evaluate(1.0, 0.5) == 0.0);
  CHECK(f.evaluate(1.0, 1.0) == 0.0);
  CHECK(f.evaluate(1.0, 2.0) == kInf);
  CHECK_THROWS_AS(f.right_derivative(1.0, 2.0), mos::ExtendedValueError);
}

TEST_CASE("double phase evaluation") {
  auto f = MOFunction::double_phase(unit(), "2", "4", "x");
  // t^2 + x t^4
  CHECK_THAT(f.evaluate(0.5, 2.0),
             Catch::Matchers::WithinRel(4.0 + 0.5 * 16.0, 1e-15));
  CHECK_THAT(f.right_derivative(0.5, 2.0),
             Catch::Matchers::WithinRel(2 * 2.0 + 0.5 * 4 * 8.0, 1e-15));
  CHECK(f.weight_a()->integrable_on_domain());
  CHECK_THAT(f.weight_a()->integral_value(),
             Catch::Matchers::WithinRel(0.5, 1e-9));
}

TEST_CASE("double phase rejects r < p and negative weights") {
  CHECK_THROWS_AS(MOFunction::double_phase(unit(), "3", "2", "x"),
                  mos::ArgumentError);
  CHECK_THROWS_AS(MOFunction::double_phase(unit(), "2", "4", "x-1"),
                  mos::ArgumentError);
}

TEST_CASE("non-integrable weights are flagged") {
  Domain d(0, 1);
  d.singularities = {};  // the blow-up sits at the left endpoint
  auto f = MOFunction::double_phase(d, "2", "4", "1/x");
  CHECK_FALSE(f.weight_a()->integrable_on_domain());
  auto g = MOFunction::double_phase(d, "2", "4", "1/sqrt(x)");
  CHECK(g.weight_a()->integrable_on_domain());
  CHECK_THAT(g.weight_a()->integral_value(),
             Catch::Matchers::WithinAbs(2.0, 1e-7));
}

TEST_CASE("orlicz family with symbolic derivative") {
  auto f = MOFunction::orlicz(unit(), "t^2/2");
  CHECK_THAT(f.evaluate(0.3, 4.0), Catch::Matchers::WithinRel(8.0, 1e-15));
  CHECK_THAT(f.right_derivative(0.3, 4.0),
             Catch::Matchers::WithinRel(4.0, 1e-15));
  CHECK_THROWS_AS(MOFunction::orlicz(unit(), "sqrt(t)"),
                  mos::ArgumentError);  // concave
}

TEST_CASE("conjugate closed forms for variable exponent") {
  auto f = MOFunction::variable_exponent(unit(), "2");
  // (t^2/2)* = t^2/2
  CHECK_THAT(f.conjugate(0.5, 3.0), Catch::Matchers::WithinRel(4.5, 1e-15));

  auto g = MOFunction::variable_exponent(unit(), "1+x");
  // at x = 1: p = 2, q = 2
  CHECK_THAT(g.conjugate(1.0, 3.0), Catch::Matchers::WithinRel(4.5, 1e-15));
  // at x = 0: p = 1, q = inf: conjugate is 0 below 1, inf above
  CHECK(g.conjugate(0.0, 0.5) == 0.0);
  CHECK(g.conjugate(0.0, 2.0) == kInf);
}

TEST_CASE("numeric conjugate matches closed forms") {
  auto f = MOFunction::variable_exponent(unit(), "3");
  for (double t : {0.1, 0.7, 1.0, 5.0, 300.0}) {
    INFO("t = " << t);
    CHECK_THAT(f.conjugate_numeric(0.5, t),
               Catch::Matchers::WithinRel(f.conjugate(0.5, t), 1e-9));
  }
  // far-out argument: maximizer s* = t^{1/(p-1)} is huge, still finite
  auto h = MOFunction::variable_exponent(unit(), "1.5");
  const double t = 1e6;
  const double expect = std::pow(t, 3.0) / 3.0;  // q = 3
  CHECK_THAT(h.conjugate_numeric(0.5, t),
             Catch::Matchers::WithinRel(expect, 1e-8));
}

TEST_CASE("numeric conjugate certifies unboundedness") {
  // phi(t) = t has slope 1: conjugate is 0 up to 1 and +inf beyond
  auto f = MOFunction::orlicz(unit(), "t");
  CHECK(f.conjugate_numeric(0.5, 0.99) == 0.0);
  CHECK(f.conjugate_numeric(0.5, 1.5) == kInf);
}

TEST_CASE("conjugate of an extended-valued function") {
  // Phi(x, t) = 0 up to 1, +inf beyond (p = inf everywhere is not
  // expressible; use a tabulated polygon with a steep last slope instead)
  auto f = MOFunction::variable_exponent(unit(), "4");
  // conjugate beyond any slope cannot happen for finite p; sanity only
  CHECK(f.conjugate(0.5, 10.0) < kInf);
}

TEST_CASE("young inequality with equality at the subgradient") {
  auto f = MOFunction::variable_exponent(unit(), "2 + x");
  const double x = 0.3, s = 1.7;
  const double d = f.right_derivative(x, s);
  // equality: Phi(x, s) + Phi*(x, Phi'(x, s)) = s * Phi'(x, s)
  CHECK_THAT(f.evaluate(x, s) + f.conjugate(x, d),
             Catch::Matchers::WithinRel(s * d, 1e-12));
  // inequality elsewhere
  for (double t : {0.1, 1.0, 4.0})
    CHECK(s * t <= f.evaluate(x, s) + f.conjugate(x, t) + 1e-12);
}

TEST_CASE("biconjugation recovers the function") {
  auto f = MOFunction::variable_exponent(unit(), "2.5");
  auto fstar = f.conjugate_function();
  CHECK(fstar.family() == MOFunction::Family::VariableExponent);
  for (double t : {0.2, 1.0, 3.0}) {
    // (Phi*)* = Phi via the numeric engine on the closed-form conjugate
    CHECK_THAT(fstar.conjugate_numeric(0.5, t),
               Catch::Matchers::WithinRel(f.evaluate(0.5, t), 1e-8));
  }

  auto g = MOFunction::double_phase(unit(), "2", "3", "x");
  auto gstar = g.conjugate_function();
  CHECK(gstar.family() == MOFunction::Family::Conjugate);
  for (double t : {0.5, 2.0}) {
    CHECK_THAT(gstar.conjugate(0.4, t),
               Catch::Matchers::WithinRel(g.evaluate(0.4, t), 1e-6));
  }
}

TEST_CASE("tabulated family with exact polygon conjugate") {
  // piecewise-linear phi: vertices (0,0), (1,0), (2,1): slopes 0 then 1
  auto f = MOFunction::tabulated(unit(), {0, 1}, {0, 1, 2}, {{0, 0, 1}});
  CHECK(f.evaluate(0.5, 0.5) == 0.0);
  CHECK(f.evaluate(0.5, 1.5) == 0.5);
  CHECK(f.evaluate(0.5, 3.0) == 2.0);  // linear tail, slope 1
  // conjugate: sup_s (s t - phi(s)); for t <= 1 attained at s = 1 or 2
  CHECK_THAT(f.conjugate(0.5, 0.5), Catch::Matchers::WithinRel(0.5, 1e-15));
  CHECK(f.conjugate(0.5, 2.0) == kInf);  // beyond the last slope
  CHECK_THAT(f.conjugate_numeric(0.5, 0.5),
             Catch::Matchers::WithinRel(0.5, 1e-9));

  CHECK_THROWS_AS(
      MOFunction::tabulated(unit(), {0, 1}, {0, 1, 2}, {{0, 1, 1.5}}),
      mos::ArgumentError);  // concave samples
}

TEST_CASE("generalized inverse brackets the level") {
  auto f = MOFunction::variable_exponent(unit(), "2");
  CHECK(f.generalized_inverse(0.5, 0.0) == 0.0);
  const double t = 3.7;
  const double u = f.generalized_inverse(0.5, t);
  // Phi(x, u) >= t at the returned point, < t just below
  CHECK(f.evaluate(0.5, u) >= t);
  CHECK(f.evaluate(0.5, u * (1 - 1e-8)) < t);
  CHECK_THAT(u, Catch::Matchers::WithinRel(std::sqrt(2 * t), 1e-9));
}

TEST_CASE("generalized inverse of an unreachable level") {
  // phi flat at large t never reaches level 5
  auto f = MOFunction::tabulated(unit(), {0, 1}, {0, 1, 2}, {{0, 1, 2}});
  // linear tail slope 1, so every level is reachable; use level inf
  CHECK_THROWS_AS(f.generalized_inverse(0.5, kInf), mos::ArgumentError);
}

TEST_CASE("inverse product sandwich") {
  // t <= Phi^{-1}(x,t) (Phi*)^{-1}(x,t) <= 2t
  auto f = MOFunction::variable_exponent(unit(), "2 + x");
  auto fstar = f.conjugate_function();
  for (double t : {0.3, 1.0, 8.0}) {
    const double u = f.generalized_inverse(0.4, t);
    const double v = fstar.generalized_inverse(0.4, t);
    INFO("t = " << t);
    CHECK(u * v >= t * (1 - 1e-8));
    CHECK(u * v <= 2 * t * (1 + 1e-8));
  }
}

TEST_CASE("domination semidecision") {
  auto phi2 = MOFunction::variable_exponent(unit(), "2");

  SECTION("every function dominates itself") {
    auto rep = mos::dominates(phi2, phi2, 1.0, 1e-6);
    CHECK(rep.status == Semidecision::HOLDS);
    CHECK(rep.gap_integral <= 1e-12);
  }

  SECTION("t^2 is not dominated by t") {
    auto phi1 = MOFunction::orlicz(unit(), "t");
    mos::GridSpec grid;
    grid.t_max = 10.0;
    auto rep = mos::dominates(phi1, phi2, 1.0, 1.0, grid);
    CHECK(rep.status == Semidecision::VIOLATED);
    CHECK(rep.witness_t > 5.0);  // gap keeps growing at the grid top
  }

  SECTION("t is dominated by t^2 with a small budget") {
    auto phi1 = MOFunction::orlicz(unit(), "t^2");
    auto phi2lin = MOFunction::orlicz(unit(), "t");
    auto rep = mos::dominates(phi1, phi2lin, 1.0, 1.0);
    CHECK(rep.status == Semidecision::HOLDS);
    // sup_t (t - t^2) = 1/4 at every x, resolved up to the t-grid spacing
    CHECK_THAT(rep.gap_integral, Catch::Matchers::WithinAbs(0.25, 1e-2));
  }
}

TEST_CASE("construction validation rejects broken shapes") {
  // decreasing in t
  CHECK_THROWS_AS(MOFunction::orlicz(unit(), "1/(1+t) - 1"),
                  mos::ArgumentError);
}
