// Builds a doubling-failure witness family on the exponent blow-up space,
// prints its certificate table, then round-trips it through the text
// format and rechecks every inequality from the serialized copy.

#include <cstdio>
#include <string>

#include "mos/mo_function.hpp"
#include "mos/probes.hpp"

int main() {
  mos::Domain dom(0.0, 1.0);
  dom.singularities = {1.0};
  const auto phi = mos::MOFunction::variable_exponent(dom, "1/(1 - x)");

  const auto ws = mos::non_delta2_witness(phi, 4);
  std::printf("witness kind %s, %zu members\n", mos::to_string(ws.kind),
              ws.members.size());
  for (const auto& row : ws.certified)
    std::printf("  %-24s %.6e <= %.6e  %s\n", row.name.c_str(), row.lhs,
                row.rhs, row.passed() ? "ok" : "VIOLATED");

  const std::string text = ws.to_text();
  const auto back = mos::WitnessSequence::from_text(text);
  const auto rows = mos::recheck_witness(phi, back);
  int matched = 0;
  for (const auto& r : rows) matched += r.matched && r.passed;
  std::printf("recheck after round-trip: %d of %zu rows reproduced\n", matched,
              rows.size());
  return matched == static_cast<int>(rows.size()) ? 0 : 1;
}
