#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <string>

#include "mos/space_spec.hpp"

using mos::SpaceSpec;

namespace {

std::string blowup_text() {
  return "space v1\n"
         "interval 0 1\n"
         "family variable-exponent\n"
         "p 1/(1 - x)\n"
         "singular 1\n"
         "seed 1234\n";
}

}  // namespace

TEST_CASE("spec files round-trip through text exactly") {
  const auto s = SpaceSpec::from_text(blowup_text());
  CHECK(s.alpha == 0.0);
  CHECK(s.beta == 1.0);
  CHECK(s.family == "variable-exponent");
  CHECK(s.p == "1/(1 - x)");
  REQUIRE(s.singular.size() == 1);
  CHECK(s.singular[0] == 1.0);
  REQUIRE(s.seed.has_value());
  CHECK(*s.seed == 1234);

  const std::string once = s.to_text();
  const auto back = SpaceSpec::from_text(once);
  CHECK(back.to_text() == once);
  CHECK(back.p == s.p);
  CHECK(back.singular == s.singular);
}

TEST_CASE("every family parses and builds") {
  const auto orlicz = SpaceSpec::from_text(
      "space v1\ninterval 0 1\nfamily orlicz\nphi t^2/2\n");
  CHECK(orlicz.build().evaluate(0.5, 2.0) == Catch::Approx(2.0));

  const auto dp = SpaceSpec::from_text(
      "space v1\ninterval 0 1\nfamily double-phase\np 2\nr 4\na x\n");
  CHECK(dp.build().evaluate(0.0, 1.0) > 0.0);

  const auto tab = SpaceSpec::from_text(
      "space v1\n"
      "interval 0 1\n"
      "family tabulated\n"
      "x-edges 0 0.5 1\n"
      "t-grid 0 1 2\n"
      "values 0 0.5 2\n"
      "values 0 1 4\n");
  CHECK(tab.build().evaluate(0.25, 1.0) == Catch::Approx(0.5));
  const auto tab2 = SpaceSpec::from_text(tab.to_text());
  CHECK(tab2.to_text() == tab.to_text());
}

TEST_CASE("comments and blank lines are ignored") {
  const auto s = SpaceSpec::from_text(
      "# a sample space\n"
      "space v1\n"
      "\n"
      "interval 0 1   # the unit interval\n"
      "family orlicz\n"
      "phi t^2/2\n");
  CHECK(s.family == "orlicz");
  CHECK(s.phi == "t^2/2");
}

TEST_CASE("tolerance precedence runs file override, profile, environment") {
  unsetenv("MOS_TOLERANCE_PROFILE");
  const auto plain = SpaceSpec::from_text(blowup_text());
  CHECK(plain.domain().quad.abs_tol == 1e-10);

  setenv("MOS_TOLERANCE_PROFILE", "strict", 1);
  CHECK(plain.domain().quad.abs_tol == 1e-12);

  const auto profiled =
      SpaceSpec::from_text(blowup_text() + "tolerance fast\n");
  CHECK(profiled.domain().quad.abs_tol == 1e-8);

  const auto pinned =
      SpaceSpec::from_text(blowup_text() + "quad-tol 3e-9\ntolerance fast\n");
  CHECK(pinned.domain().quad.abs_tol == 3e-9);

  setenv("MOS_TOLERANCE_PROFILE", "bogus", 1);
  CHECK_THROWS_AS(plain.domain(), mos::ArgumentError);
  unsetenv("MOS_TOLERANCE_PROFILE");
}

TEST_CASE("quadrature overrides land in the domain") {
  const auto s = SpaceSpec::from_text(blowup_text() +
                                      "quad-order 24\nquad-depth 40\n");
  const auto d = s.domain();
  CHECK(d.quad.order == 24);
  CHECK(d.quad.max_depth == 40);
  REQUIRE(d.singularities.size() == 1);
  CHECK(d.singularities[0] == 1.0);
}

TEST_CASE("parse errors carry line and column positions") {
  using Catch::Matchers::ContainsSubstring;

  CHECK_THROWS_WITH(SpaceSpec::from_text("interval 0 1\n"),
                    ContainsSubstring("space v1"));
  CHECK_THROWS_WITH(
      SpaceSpec::from_text("space v1\ninterval 0 1\nfamly orlicz\n"),
      ContainsSubstring("line 3, column 1"));
  CHECK_THROWS_WITH(
      SpaceSpec::from_text("space v1\ninterval 0 one\n"),
      ContainsSubstring("line 2, column 12"));
  CHECK_THROWS_WITH(
      SpaceSpec::from_text("space v1\ninterval 1 0\nfamily orlicz\nphi t\n"),
      ContainsSubstring("alpha < beta"));
  CHECK_THROWS_WITH(
      SpaceSpec::from_text("space v1\ninterval 0 1\ninterval 0 2\n"),
      ContainsSubstring("duplicate key 'interval'"));
  CHECK_THROWS_WITH(
      SpaceSpec::from_text("space v1\ninterval 0 1\nfamily sobolev\n"),
      ContainsSubstring("unknown family"));
  CHECK_THROWS_WITH(
      SpaceSpec::from_text(
          "space v1\ninterval 0 1\nfamily orlicz\nphi t^\n"),
      ContainsSubstring("bad expression"));

  try {
    SpaceSpec::from_text("space v1\ninterval 0 one\n");
    FAIL("expected a parse error");
  } catch (const mos::ParseError& e) {
    CHECK(e.offset() == 9 + 11);  // line 2 starts at 9; column 12
  }
}

TEST_CASE("family and key pairings are enforced") {
  using Catch::Matchers::ContainsSubstring;

  CHECK_THROWS_WITH(
      SpaceSpec::from_text("space v1\ninterval 0 1\nfamily orlicz\n"),
      ContainsSubstring("needs 'phi'"));
  CHECK_THROWS_WITH(
      SpaceSpec::from_text(
          "space v1\ninterval 0 1\nfamily orlicz\nphi t\np 2\n"),
      ContainsSubstring("does not take 'p'"));
  CHECK_THROWS_WITH(
      SpaceSpec::from_text("space v1\ninterval 0 1\nfamily tabulated\n"
                           "x-edges 0 1\nt-grid 0 1\nvalues 0 1\nvalues 0 2\n"),
      ContainsSubstring("one values row per x cell"));
  CHECK_THROWS_WITH(
      SpaceSpec::from_text("space v1\ninterval 0 1\nfamily tabulated\n"
                           "x-edges 0 1\nt-grid 0 1 2\nvalues 0 1\n"),
      ContainsSubstring("one sample per t-grid point"));
  CHECK_THROWS_WITH(
      SpaceSpec::from_text("space v1\ninterval 0 1\nfamily tabulated\n"
                           "x-edges 0 1 0.5\nt-grid 0 1\nvalues 0 1\n"),
      ContainsSubstring("strictly increasing"));
}
