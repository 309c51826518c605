#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mos/errors.hpp"
#include "mos/extended.hpp"
#include "mos/modular.hpp"
#include "mos/norms.hpp"

using mos::Domain;
using mos::kInf;
using mos::MOFunction;
using mos::PiecewiseFunction;

namespace {

Domain unit() { return Domain(0, 1); }

PiecewiseFunction identity01() {
  return PiecewiseFunction({0, 1}, {{0, 1}});  // f(x) = x
}

}  // namespace

TEST_CASE("modular of a polynomial against a power function") {
  // Phi(x,t) = t^2/2, f(x) = x: integral of x^2/2 = 1/6
  auto phi = MOFunction::variable_exponent(unit(), "2");
  CHECK_THAT(mos::modular(phi, identity01()),
             Catch::Matchers::WithinRel(1.0 / 6, 1e-8));
  // scale pulls through: I(2f) = 4/6
  CHECK_THAT(mos::modular(phi, identity01(), 2.0),
             Catch::Matchers::WithinRel(4.0 / 6, 1e-8));
}

TEST_CASE("modular is monotone in the scale") {
  auto phi = MOFunction::double_phase(unit(), "2", "4", "x");
  auto f = identity01();
  double prev = 0;
  for (double s : {0.5, 1.0, 2.0, 4.0}) {
    const double v = mos::modular(phi, f, s);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("modular diverges to +inf for non-integrable compositions") {
  // weight 1/x is not integrable: constant functions of height > 1 blow up
  Domain d(0, 1);
  auto phi = MOFunction::double_phase(d, "2", "4", "1/x");
  auto f = PiecewiseFunction::constant(0, 1, 2.0);
  CHECK(mos::modular(phi, f) == kInf);
  // heights below threshold still converge: t^2 + t^4/x at t = 1/2
  // integrates the 1/x part only where f is supported away from 0
  auto g = PiecewiseFunction::box(0, 1, 0.5, 1.0, 2.0);
  CHECK(std::isfinite(mos::modular(phi, g)));
}

TEST_CASE("modular handles the infinite-exponent region") {
  Domain d(0, 1);
  d.singularities = {1.0};
  auto phi = MOFunction::variable_exponent(d, "1/(1-x)");
  // |f| <= 1 everywhere: modular stays finite
  auto f = PiecewiseFunction::constant(0, 1, 1.0);
  CHECK(std::isfinite(mos::modular(phi, f)));
  // |f| > 1 on a set reaching the exponent blow-up: t^p explodes
  auto g = PiecewiseFunction::constant(0, 1, 1.5);
  CHECK(mos::modular(phi, g) == kInf);
}

TEST_CASE("luxemburg norm closed form for constant exponents") {
  // ||f||_Lux = p^{-1/p} ||f||_p for Phi = t^p/p
  auto phi2 = MOFunction::variable_exponent(unit(), "2");
  auto f = identity01();
  const double l2 = 1.0 / std::sqrt(3.0);  // ||x||_2 on (0,1)
  auto r = mos::luxemburg_norm(phi2, f);
  CHECK_THAT(r.value, Catch::Matchers::WithinRel(l2 / std::sqrt(2.0), 1e-7));
  CHECK(r.bracket <= std::max(1e-9, 1e-8 * r.value) * 1.0001);
  CHECK(r.iterations > 0);

  auto phi3 = MOFunction::variable_exponent(unit(), "3");
  const double l3 = std::pow(0.25, 1.0 / 3);  // ||x||_3 on (0,1)
  CHECK_THAT(mos::luxemburg_norm(phi3, f).value,
             Catch::Matchers::WithinRel(l3 * std::pow(3.0, -1.0 / 3), 1e-7));
}

TEST_CASE("luxemburg norm certificate at the returned value") {
  auto phi = MOFunction::double_phase(unit(), "2", "4", "x");
  auto f = identity01();
  auto r = mos::luxemburg_norm(phi, f);
  CHECK(mos::modular(phi, f, 1.0 / r.value) <= 1.0 + 1e-12);
  CHECK(mos::modular(phi, f, 1.0 / (r.value - 2 * r.bracket)) > 1.0);
}

TEST_CASE("luxemburg norm is positively homogeneous") {
  auto phi = MOFunction::variable_exponent(unit(), "2 + x");
  auto f = identity01();
  const double base = mos::luxemburg_norm(phi, f).value;
  for (double c : {0.25, 3.0, 17.0}) {
    const double scaled = mos::luxemburg_norm(phi, f.scaled(c)).value;
    INFO("c = " << c);
    CHECK_THAT(scaled, Catch::Matchers::WithinRel(c * base, 1e-6));
  }
}

TEST_CASE("luxemburg norm of zero and of out-of-space functions") {
  auto phi = MOFunction::variable_exponent(unit(), "2");
  CHECK(mos::luxemburg_norm(phi, PiecewiseFunction::zero(0, 1)).value == 0.0);
}

TEST_CASE("orlicz norm via the amemiya formula") {
  // Phi = t^2/2: Amemiya minimum is sqrt(2) ||f||_2
  auto phi = MOFunction::variable_exponent(unit(), "2");
  auto f = PiecewiseFunction::constant(0, 1, 1.0);
  auto r = mos::orlicz_norm(phi, f);
  CHECK_THAT(r.value, Catch::Matchers::WithinRel(std::sqrt(2.0), 1e-9));

  // the Luxemburg norm of the same function is 2^{-1/2}: ratio exactly 2
  auto lux = mos::luxemburg_norm(phi, f);
  CHECK_THAT(r.value / lux.value, Catch::Matchers::WithinRel(2.0, 1e-6));
}

TEST_CASE("orlicz norm boundary limit recovers L1") {
  // phi(t) = t: the Amemiya infimum is the k -> inf limit ||f||_1
  auto phi = MOFunction::orlicz(unit(), "t");
  auto f = identity01();
  auto r = mos::orlicz_norm(phi, f);
  CHECK_THAT(r.value, Catch::Matchers::WithinAbs(0.5, 1e-6));
}

TEST_CASE("norm sandwich lux <= orlicz <= 2 lux") {
  auto f = identity01();
  std::vector<MOFunction> phis;
  phis.push_back(MOFunction::variable_exponent(unit(), "2"));
  phis.push_back(MOFunction::variable_exponent(unit(), "1 + x"));
  phis.push_back(MOFunction::double_phase(unit(), "2", "4", "x"));
  phis.push_back(MOFunction::orlicz(unit(), "t^2/2 + t^3"));
  for (const auto& phi : phis) {
    INFO(phi.describe());
    const double lux = mos::luxemburg_norm(phi, f).value;
    const double orl = mos::orlicz_norm(phi, f).value;
    CHECK(orl >= lux * (1 - 1e-6));
    CHECK(orl <= 2 * lux * (1 + 1e-6));
  }
}

TEST_CASE("sobolev norm adds the weak derivative") {
  auto phi = MOFunction::variable_exponent(unit(), "2");
  auto f = identity01();  // f' = 1
  const double expect = mos::luxemburg_norm(phi, f).value +
                        mos::luxemburg_norm(
                            phi, PiecewiseFunction::constant(0, 1, 1.0))
                            .value;
  auto r = mos::sobolev_norm(phi, f);
  CHECK_THAT(r.value, Catch::Matchers::WithinRel(expect, 1e-9));

  auto s = PiecewiseFunction::step({0, 0.5, 1}, {0.0, 1.0});
  CHECK_THROWS_AS(mos::sobolev_norm(phi, s),
                  mos::NotWeaklyDifferentiableError);
}

TEST_CASE("holder pairing is the exact polynomial integral") {
  auto f = identity01();
  auto g = identity01();
  CHECK_THAT(mos::holder_pairing(f, g),
             Catch::Matchers::WithinRel(1.0 / 3, 1e-15));
}

TEST_CASE("holder inequality with the conjugate norm") {
  // |integral f g| <= 2 ||f||_Phi ||g||_Phi*
  auto phi = MOFunction::variable_exponent(unit(), "2 + x");
  auto phistar = phi.conjugate_function();
  auto f = identity01();
  auto g = PiecewiseFunction({0, 1}, {{1, -1}});  // 1 - x
  const double pairing = std::abs(mos::holder_pairing(f, g));
  const double bound = 2 * mos::luxemburg_norm(phi, f).value *
                       mos::luxemburg_norm(phistar, g).value;
  CHECK(pairing <= bound * (1 + 1e-9));
}
