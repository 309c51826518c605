// Walks three sample spaces through the full condition audit and prints
// the same human-readable report the command line tool emits.

#include <iostream>
#include <string>

#include "mos/conditions.hpp"
#include "mos/report.hpp"
#include "mos/space_spec.hpp"

namespace {

const char* kSpecs[] = {
    "space v1\n"
    "interval 0 1\n"
    "family variable-exponent\n"
    "p 2 + sin(3.141592653589793*x)\n",

    "space v1\n"
    "interval 0 1\n"
    "family variable-exponent\n"
    "p 1/(1 - x)\n"
    "singular 1\n",

    "space v1\n"
    "interval 0 1\n"
    "family double-phase\n"
    "p 2\n"
    "r 4\n"
    "a x\n",
};

}  // namespace

int main() {
  for (const char* text : kSpecs) {
    const auto spec = mos::SpaceSpec::from_text(text);
    const auto phi = spec.build();
    const auto sv = mos::space_verdicts(phi);

    mos::Report report;
    mos::append_space(report, spec);
    mos::append_space_verdicts(report, sv);
    std::cout << report.render(mos::EmitMode::Human) << "\n";
  }
  return 0;
}
