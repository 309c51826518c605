#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mos/errors.hpp"
#include "mos/extended.hpp"
#include "mos/quadrature.hpp"

using mos::integrate;
using mos::integrate_improper;
using mos::kInf;
using mos::QuadratureConfig;

TEST_CASE("Gauss nodes integrate polynomials of degree 2n-1 exactly") {
  const auto& rule = mos::gauss_rule(16);
  // integral of x^31 over [-1, 1] is 0; over [0, 1] it is 1/32
  double s = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = 0.5 * (rule.nodes[i] + 1.0);
    s += 0.5 * rule.weights[i] * std::pow(x, 31);
  }
  CHECK_THAT(s, Catch::Matchers::WithinRel(1.0 / 32, 1e-13));
}

TEST_CASE("adaptive integration of smooth functions") {
  QuadratureConfig cfg;
  CHECK_THAT(integrate([](double x) { return x * x; }, 0, 1, cfg),
             Catch::Matchers::WithinRel(1.0 / 3, 1e-14));
  CHECK_THAT(integrate([](double x) { return std::sin(x); }, 0, M_PI, cfg),
             Catch::Matchers::WithinRel(2.0, 1e-12));
  CHECK_THAT(
      integrate([](double x) { return std::exp(-x * x); }, -6, 6, cfg),
      Catch::Matchers::WithinRel(std::sqrt(M_PI), 1e-12));
}

TEST_CASE("empty and reversed ranges") {
  QuadratureConfig cfg;
  CHECK(integrate([](double) { return 1.0; }, 2, 2, cfg) == 0.0);
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 3, 2, cfg),
                  mos::ArgumentError);
}

TEST_CASE("improper integrals with an endpoint singularity") {
  QuadratureConfig cfg;
  // integral of 1/sqrt(x) over (0, 1] = 2, singular at the left end
  CHECK_THAT(
      integrate_improper([](double x) { return 1.0 / std::sqrt(x); }, 0, 1,
                         false, cfg),
      Catch::Matchers::WithinAbs(2.0, 1e-8));
  // singular at the right end
  CHECK_THAT(integrate_improper(
                 [](double x) { return 1.0 / std::sqrt(1.0 - x); }, 0, 1,
                 true, cfg),
             Catch::Matchers::WithinAbs(2.0, 1e-8));
  // log singularity, still integrable
  CHECK_THAT(
      integrate_improper([](double x) { return -std::log(x); }, 0, 1, false,
                         cfg),
      Catch::Matchers::WithinAbs(1.0, 1e-8));
}

TEST_CASE("improper integration classifies divergence as +inf") {
  QuadratureConfig cfg;
  CHECK(integrate_improper([](double x) { return 1.0 / x; }, 0, 1, false,
                           cfg) == kInf);
  CHECK(integrate_improper([](double x) { return 1.0 / (x * x); }, 0, 1,
                           false, cfg) == kInf);
}

TEST_CASE("infinite integrand values propagate to +inf") {
  QuadratureConfig cfg;
  // +inf on the whole right half
  const double v = integrate(
      [](double x) { return x > 0.5 ? kInf : 1.0; }, 0, 1, cfg);
  CHECK(v == kInf);
}

TEST_CASE("non-convergent adaptive integration reports a partial value") {
  QuadratureConfig cfg;
  cfg.max_depth = 8;
  try {
    integrate([](double x) { return std::pow(std::abs(x - 0.5), -0.5); }, 0,
              1, cfg);
    FAIL("expected AccuracyError");
  } catch (const mos::AccuracyError& err) {
    CHECK(err.partial() > 1.0);  // true value is 2*sqrt(2)
  }
}
