// Computes the three norms of f(x) = x on a few spaces and shows the
// certified brackets next to closed-form values where one exists.

#include <cmath>
#include <cstdio>

#include "mos/mo_function.hpp"
#include "mos/norms.hpp"
#include "mos/piecewise.hpp"

namespace {

void show(const char* label, const mos::MOFunction& phi,
          const mos::PiecewiseFunction& f) {
  const auto lux = mos::luxemburg_norm(phi, f);
  const auto orl = mos::orlicz_norm(phi, f);
  const auto sob = mos::sobolev_norm(phi, f);
  std::printf("%-22s lux %.9f (+/- %.1e, %d steps)\n", label, lux.value,
              lux.bracket, lux.iterations);
  std::printf("%-22s orlicz %.9f   sobolev %.9f\n", "", orl.value, sob.value);
}

}  // namespace

int main() {
  const mos::Domain dom(0.0, 1.0);
  const auto f = mos::PiecewiseFunction({0.0, 1.0}, {{0.0, 1.0}});

  show("exponent p = 2", mos::MOFunction::variable_exponent(dom, "2"), f);
  // closed form for the p = 2 Sobolev norm of x: 1/sqrt(6) + 1/sqrt(2)
  std::printf("%-22s expected sobolev %.9f\n", "",
              1.0 / std::sqrt(6.0) + 1.0 / std::sqrt(2.0));

  show("exponent p = 1 + x", mos::MOFunction::variable_exponent(dom, "1 + x"),
       f);
  show("double phase", mos::MOFunction::double_phase(dom, "2", "4", "x"), f);
  show("orlicz exp(t) - 1", mos::MOFunction::orlicz(dom, "exp(t) - 1"), f);
  return 0;
}
