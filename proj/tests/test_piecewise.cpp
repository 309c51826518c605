#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mos/errors.hpp"
#include "mos/piecewise.hpp"

using mos::PiecewiseFunction;

namespace {

// x on (0,1), then 2-x on (1,2): a hat function.
// Cell coefficients are in the local basis x - (left breakpoint).
PiecewiseFunction hat() {
  return PiecewiseFunction({0, 1, 2}, {{0, 1}, {1, -1}});
}

}  // namespace

TEST_CASE("construction validates breakpoints and evaluates") {
  auto f = hat();
  CHECK(f(0.5) == 0.5);
  CHECK(f(1.5) == 0.5);
  CHECK(f.cells() == 2);
  CHECK_THROWS_AS(f(2.5), mos::DomainError);
  CHECK_THROWS_AS(PiecewiseFunction({1, 0}, {{1}}), mos::ArgumentError);
}

TEST_CASE("factories") {
  auto z = PiecewiseFunction::zero(0, 1);
  CHECK(z.max_abs() == 0.0);
  auto c = PiecewiseFunction::constant(0, 1, 3.5);
  CHECK(c(0.25) == 3.5);
  auto s = PiecewiseFunction::step({0, 0.5, 1}, {1.0, -2.0});
  CHECK(s(0.25) == 1.0);
  CHECK(s(0.75) == -2.0);
  auto b = PiecewiseFunction::box(0, 1, 0.25, 0.5, 7.0);
  CHECK(b(0.3) == 7.0);
  CHECK(b(0.7) == 0.0);
}

TEST_CASE("exact integrals and antiderivatives") {
  auto f = hat();
  CHECK(f.integral() == 1.0);

  auto F = f.antiderivative();
  CHECK(F(0.0) == 0.0);
  CHECK_THAT(F(2.0), Catch::Matchers::WithinRel(1.0, 1e-15));
  CHECK(F.continuous());

  // antiderivative of the weak derivative recovers f - f(alpha) exactly
  auto g = F.weak_derivative().antiderivative();
  for (double x : {0.1, 0.5, 0.9, 1.3, 1.9})
    CHECK_THAT(g(x), Catch::Matchers::WithinAbs(F(x) - F(0.0), 1e-15));
}

TEST_CASE("weak derivative requires continuity") {
  auto s = PiecewiseFunction::step({0, 0.5, 1}, {1.0, -2.0});
  CHECK_THROWS_AS(s.weak_derivative(), mos::NotWeaklyDifferentiableError);
  CHECK_NOTHROW(hat().weak_derivative());
}

TEST_CASE("arithmetic merges breakpoints exactly") {
  auto f = hat();
  auto g = PiecewiseFunction::step({0, 0.7, 2}, {1.0, 0.5});
  auto h = f + g;
  for (double x : {0.1, 0.65, 0.8, 1.2, 1.9})
    CHECK_THAT(h(x), Catch::Matchers::WithinAbs(f(x) + g(x), 1e-15));
  auto d = f - g;
  for (double x : {0.1, 0.65, 0.8, 1.2, 1.9})
    CHECK_THAT(d(x), Catch::Matchers::WithinAbs(f(x) - g(x), 1e-15));
}

TEST_CASE("products are exact polynomial products") {
  auto f = hat();
  auto p = f * f;
  CHECK_THAT(p(0.5), Catch::Matchers::WithinAbs(0.25, 1e-15));
  // integral of x^2 on (0,1) plus (2-x)^2 on (1,2): 1/3 + 1/3
  CHECK_THAT(p.integral(), Catch::Matchers::WithinRel(2.0 / 3, 1e-15));
}

TEST_CASE("absolute value inserts sign-change breakpoints") {
  PiecewiseFunction f({0, 2}, {{-1, 1}});  // x - 1 on (0, 2)
  auto a = f.abs();
  CHECK_THAT(a(0.25), Catch::Matchers::WithinAbs(0.75, 1e-15));
  CHECK_THAT(a(1.75), Catch::Matchers::WithinAbs(0.75, 1e-15));
  CHECK_THAT(a.integral(), Catch::Matchers::WithinRel(1.0, 1e-14));
  for (double x : {0.0, 0.5, 1.0, 1.5, 2.0}) CHECK(a(x) >= 0.0);
}

TEST_CASE("lattice operations") {
  auto f = hat();
  auto g = PiecewiseFunction::constant(0, 2, 0.5);
  auto mx = max(f, g);
  auto mn = min(f, g);
  for (double x : {0.1, 0.4, 0.6, 1.0, 1.6, 1.9}) {
    CHECK_THAT(mx(x),
               Catch::Matchers::WithinAbs(std::max(f(x), g(x)), 1e-14));
    CHECK_THAT(mn(x),
               Catch::Matchers::WithinAbs(std::min(f(x), g(x)), 1e-14));
  }
  // lattice identity: max + min = f + g pointwise
  for (double x : {0.3, 0.8, 1.4})
    CHECK_THAT(mx(x) + mn(x), Catch::Matchers::WithinAbs(f(x) + g(x), 1e-14));
}

TEST_CASE("disjoint supports stay disjoint under lattice ops") {
  auto u = PiecewiseFunction::box(0, 1, 0.0, 0.3, 2.0);
  auto v = PiecewiseFunction::box(0, 1, 0.6, 0.9, 3.0);
  auto m = max(u, v);
  CHECK(m(0.15) == 2.0);
  CHECK(m(0.75) == 3.0);
  CHECK(m(0.45) == 0.0);
  // |u + v| = |u| + |v| for disjoint supports
  auto s = (u + v).abs();
  CHECK_THAT(s.integral(), Catch::Matchers::WithinRel(
                               u.integral() + v.integral(), 1e-14));
}

TEST_CASE("max_abs finds interior extrema") {
  // 4x(1-x) peaks at 1 inside the cell
  PiecewiseFunction f({0, 1}, {{0, 4, -4}});
  CHECK_THAT(f.max_abs(), Catch::Matchers::WithinRel(1.0, 1e-12));
}

TEST_CASE("serialization round-trips bit-exactly") {
  auto f = hat();
  auto g = PiecewiseFunction::from_text(f.to_text());
  CHECK(g.breakpoints() == f.breakpoints());
  for (double x : {0.123, 0.9, 1.456})
    CHECK(g(x) == f(x));
  CHECK_THROWS_AS(PiecewiseFunction::from_text("garbage"), mos::ParseError);
}

TEST_CASE("scaling and negation") {
  auto f = hat();
  auto g = f.scaled(-2.0);
  CHECK(g(0.5) == -1.0);
  CHECK((-f)(0.5) == -0.5);
}
