#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mos/domain.hpp"
#include "mos/errors.hpp"
#include "mos/expression.hpp"
#include "mos/mo_function.hpp"

namespace mos {

/// Quadrature tolerance selected by a named profile. The profile applies
/// only when a spec file does not pin quad-tol itself.
inline double quad_tol_for_profile(const std::string& name) {
  if (name == "strict") return 1e-12;
  if (name == "default") return 1e-10;
  if (name == "fast") return 1e-8;
  throw ArgumentError("unknown tolerance profile '" + name +
                      "' (strict, default, fast)");
}

/// Profile taken from MOS_TOLERANCE_PROFILE, falling back to "default".
/// An unknown value in the environment is an error, not a fallback:
/// silently ignoring it would run every audit at the wrong tolerance.
inline std::string default_tolerance_profile() {
  const char* env = std::getenv("MOS_TOLERANCE_PROFILE");
  if (env == nullptr || *env == '\0') return "default";
  const std::string name(env);
  quad_tol_for_profile(name);  // validates
  return name;
}

/// A parsed space description: the interval, the family with its defining
/// expressions or tables, declared singular points, and optional
/// quadrature / tolerance / seed overrides. The text format is line
/// oriented ("key values...", # comments) with a "space v1" header; see
/// from_text for the accepted keys. to_text() round-trips exactly.
struct SpaceSpec {
  double alpha = 0;
  double beta = 1;
  std::string family;  // orlicz | variable-exponent | double-phase | tabulated

  std::string phi;      // orlicz: Phi(t)
  std::string p;        // variable-exponent / double-phase: p(x)
  std::string r;        // double-phase: r(x)
  std::string a;        // double-phase: weight a(x)
  std::vector<double> x_edges;                // tabulated
  std::vector<double> t_grid;                 // tabulated
  std::vector<std::vector<double>> values;    // tabulated, one row per x cell

  std::vector<double> singular;
  std::optional<std::uint64_t> seed;
  std::optional<int> quad_order;
  std::optional<double> quad_tol;
  std::optional<int> quad_depth;
  std::optional<std::string> tolerance;  // profile name, overrides the env

  /// Domain with the declared singular points and the effective
  /// quadrature settings. Precedence for the tolerance: quad-tol in the
  /// file, then the file's tolerance profile, then MOS_TOLERANCE_PROFILE.
  Domain domain() const {
    Domain d(alpha, beta);
    d.singularities = singular;
    d.quad.abs_tol = quad_tol ? *quad_tol
                              : quad_tol_for_profile(
                                    tolerance ? *tolerance
                                              : default_tolerance_profile());
    if (quad_order) d.quad.order = *quad_order;
    if (quad_depth) d.quad.max_depth = *quad_depth;
    return d;
  }

  MOFunction build() const {
    const Domain d = domain();
    if (family == "orlicz") return MOFunction::orlicz(d, phi);
    if (family == "variable-exponent")
      return MOFunction::variable_exponent(d, p);
    if (family == "double-phase") return MOFunction::double_phase(d, p, r, a);
    if (family == "tabulated")
      return MOFunction::tabulated(d, x_edges, t_grid, values);
    throw ArgumentError("unknown family '" + family + "'");
  }

  std::string to_text() const {
    std::ostringstream os;
    char buf[40];
    auto num = [&](double v) {
      std::snprintf(buf, sizeof buf, " %.17g", v);
      os << buf;
    };
    os << "space v1\n";
    os << "interval";
    num(alpha);
    num(beta);
    os << "\n";
    os << "family " << family << "\n";
    if (!phi.empty()) os << "phi " << phi << "\n";
    if (!p.empty()) os << "p " << p << "\n";
    if (!r.empty()) os << "r " << r << "\n";
    if (!a.empty()) os << "a " << a << "\n";
    if (!x_edges.empty()) {
      os << "x-edges";
      for (double v : x_edges) num(v);
      os << "\n";
    }
    if (!t_grid.empty()) {
      os << "t-grid";
      for (double v : t_grid) num(v);
      os << "\n";
    }
    for (const auto& row : values) {
      os << "values";
      for (double v : row) num(v);
      os << "\n";
    }
    if (!singular.empty()) {
      os << "singular";
      for (double v : singular) num(v);
      os << "\n";
    }
    if (seed) os << "seed " << *seed << "\n";
    if (quad_order) os << "quad-order " << *quad_order << "\n";
    if (quad_tol) {
      os << "quad-tol";
      num(*quad_tol);
      os << "\n";
    }
    if (quad_depth) os << "quad-depth " << *quad_depth << "\n";
    if (tolerance) os << "tolerance " << *tolerance << "\n";
    return os.str();
  }

  static SpaceSpec from_text(const std::string& text);
};

namespace detail {

struct SpecToken {
  std::string text;
  std::size_t column = 0;  // 1-based
};

/// Splits one logical line (comment stripped) into whitespace-separated
/// tokens with their 1-based column positions.
inline std::vector<SpecToken> spec_tokens(const std::string& line) {
  std::vector<SpecToken> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

}  // namespace detail

inline SpaceSpec SpaceSpec::from_text(const std::string& text) {
  SpaceSpec s;
  bool saw_header = false, saw_interval = false, saw_family = false;
  std::map<std::string, int> key_line;        // first line of each scalar key
  std::vector<int> value_row_lines;

  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const std::size_t line_start = pos;
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    const auto toks = detail::spec_tokens(line);
    if (toks.empty()) {
      if (pos > text.size()) break;
      continue;
    }

    auto fail = [&](const std::string& msg, std::size_t column) -> void {
      std::ostringstream os;
      os << "space file line " << line_no << ", column " << column << ": "
         << msg;
      throw ParseError(os.str(), line_start + column - 1);
    };
    auto num_at = [&](std::size_t i) -> double {
      const auto& t = toks[i];
      const char* c = t.text.c_str();
      char* end = nullptr;
      const double v = std::strtod(c, &end);
      if (end != c + t.text.size() || t.text.empty())
        fail("expected a number, got '" + t.text + "'", t.column);
      return v;
    };
    auto int_at = [&](std::size_t i, long lo, long hi) -> long {
      const auto& t = toks[i];
      const char* c = t.text.c_str();
      char* end = nullptr;
      const long v = std::strtol(c, &end, 10);
      if (end != c + t.text.size() || t.text.empty())
        fail("expected an integer, got '" + t.text + "'", t.column);
      if (v < lo || v > hi)
        fail("value " + t.text + " is outside [" + std::to_string(lo) + ", " +
                 std::to_string(hi) + "]",
             t.column);
      return v;
    };
    auto arity = [&](std::size_t want) -> void {
      if (toks.size() != want + 1)
        fail("'" + toks[0].text + "' takes " + std::to_string(want) +
                 (want == 1 ? " value" : " values"),
             toks.size() > want + 1 ? toks[want + 1].column
                                    : toks[0].column);
    };
    auto once = [&](const std::string& key) -> void {
      const auto [it, fresh] = key_line.emplace(key, line_no);
      if (!fresh)
        fail("duplicate key '" + key + "' (first on line " +
                 std::to_string(it->second) + ")",
             toks[0].column);
    };
    // the raw remainder of the line after the key, for expression values
    auto rest = [&]() -> std::string {
      std::size_t from = toks[0].column - 1 + toks[0].text.size();
      while (from < line.size() && (line[from] == ' ' || line[from] == '\t'))
        ++from;
      std::size_t to = line.size();
      while (to > from && (line[to - 1] == ' ' || line[to - 1] == '\t')) --to;
      return line.substr(from, to - from);
    };
    auto expr = [&](const char* var) -> std::string {
      const std::string e = rest();
      if (e.empty())
        fail("'" + toks[0].text + "' needs an expression", toks[0].column);
      try {
        parse_expression(e, std::string(var));
      } catch (const Error& err) {
        fail(std::string("bad expression: ") + err.what(),
             toks.size() > 1 ? toks[1].column : toks[0].column);
      }
      return e;
    };

    const std::string& key = toks[0].text;
    if (!saw_header) {
      if (key != "space" || toks.size() != 2 || toks[1].text != "v1")
        fail("a space file starts with 'space v1'", toks[0].column);
      saw_header = true;
      continue;
    }

    if (key == "space") {
      fail("duplicate header", toks[0].column);
    } else if (key == "interval") {
      once(key);
      arity(2);
      s.alpha = num_at(1);
      s.beta = num_at(2);
      if (!(std::isfinite(s.alpha) && std::isfinite(s.beta) &&
            s.alpha < s.beta))
        fail("interval needs finite endpoints with alpha < beta",
             toks[1].column);
      saw_interval = true;
    } else if (key == "family") {
      once(key);
      arity(1);
      const std::string& f = toks[1].text;
      if (f != "orlicz" && f != "variable-exponent" && f != "double-phase" &&
          f != "tabulated")
        fail("unknown family '" + f +
                 "' (orlicz, variable-exponent, double-phase, tabulated)",
             toks[1].column);
      s.family = f;
      saw_family = true;
    } else if (key == "phi") {
      once(key);
      s.phi = expr("t");
    } else if (key == "p") {
      once(key);
      s.p = expr("x");
    } else if (key == "r") {
      once(key);
      s.r = expr("x");
    } else if (key == "a") {
      once(key);
      s.a = expr("x");
    } else if (key == "singular") {
      if (toks.size() < 2) fail("'singular' needs at least one point", 1);
      for (std::size_t i = 1; i < toks.size(); ++i) {
        const double v = num_at(i);
        if (!std::isfinite(v))
          fail("singular points must be finite", toks[i].column);
        s.singular.push_back(v);
      }
    } else if (key == "x-edges" || key == "t-grid") {
      once(key);
      auto& dst = key == "x-edges" ? s.x_edges : s.t_grid;
      if (toks.size() < 3)
        fail("'" + key + "' needs at least two values", toks[0].column);
      for (std::size_t i = 1; i < toks.size(); ++i) {
        const double v = num_at(i);
        if (!dst.empty() && !(v > dst.back()))
          fail("'" + key + "' values must be strictly increasing",
               toks[i].column);
        dst.push_back(v);
      }
    } else if (key == "values") {
      if (toks.size() < 2) fail("'values' needs at least one sample", 1);
      std::vector<double> row;
      for (std::size_t i = 1; i < toks.size(); ++i) row.push_back(num_at(i));
      s.values.push_back(std::move(row));
      value_row_lines.push_back(line_no);
    } else if (key == "seed") {
      once(key);
      arity(1);
      const auto& t = toks[1];
      const char* c = t.text.c_str();
      char* end = nullptr;
      const unsigned long long v = std::strtoull(c, &end, 10);
      if (end != c + t.text.size() || t.text.empty() || t.text[0] == '-')
        fail("expected a nonnegative integer, got '" + t.text + "'",
             t.column);
      s.seed = static_cast<std::uint64_t>(v);
    } else if (key == "quad-order") {
      once(key);
      arity(1);
      s.quad_order = static_cast<int>(int_at(1, 2, 64));
    } else if (key == "quad-tol") {
      once(key);
      arity(1);
      const double v = num_at(1);
      if (!(v > 0) || !std::isfinite(v))
        fail("quad-tol must be a positive number", toks[1].column);
      s.quad_tol = v;
    } else if (key == "quad-depth") {
      once(key);
      arity(1);
      s.quad_depth = static_cast<int>(int_at(1, 1, 100));
    } else if (key == "tolerance") {
      once(key);
      arity(1);
      const std::string& t = toks[1].text;
      if (t != "strict" && t != "default" && t != "fast")
        fail("unknown tolerance profile '" + t +
                 "' (strict, default, fast)",
             toks[1].column);
      s.tolerance = t;
    } else {
      fail("'" + key + "' is not a spec key", toks[0].column);
    }
    if (pos > text.size()) break;
  }

  auto fail_at_line = [&](int line, const std::string& msg) -> void {
    std::ostringstream os;
    if (line > 0)
      os << "space file line " << line << ": " << msg;
    else
      os << "space file: " << msg;
    throw ParseError(os.str(), 0);
  };
  auto line_of = [&](const std::string& key) -> int {
    const auto it = key_line.find(key);
    return it == key_line.end() ? 0 : it->second;
  };

  if (!saw_header) fail_at_line(0, "a space file starts with 'space v1'");
  if (!saw_interval) fail_at_line(0, "missing 'interval'");
  if (!saw_family) fail_at_line(0, "missing 'family'");

  struct Slot {
    const char* key;
    bool present;
  };
  const Slot slots[] = {{"phi", !s.phi.empty()},
                        {"p", !s.p.empty()},
                        {"r", !s.r.empty()},
                        {"a", !s.a.empty()},
                        {"x-edges", !s.x_edges.empty()},
                        {"t-grid", !s.t_grid.empty()},
                        {"values", !s.values.empty()}};
  auto wants = [&](const char* key) -> bool {
    if (s.family == "orlicz") return std::string(key) == "phi";
    if (s.family == "variable-exponent") return std::string(key) == "p";
    if (s.family == "double-phase") {
      const std::string k = key;
      return k == "p" || k == "r" || k == "a";
    }
    const std::string k = key;
    return k == "x-edges" || k == "t-grid" || k == "values";
  };
  for (const auto& slot : slots) {
    if (wants(slot.key) && !slot.present)
      fail_at_line(line_of("family"),
                   "family " + s.family + " needs '" + slot.key + "'");
    if (!wants(slot.key) && slot.present)
      fail_at_line(
          slot.key == std::string("values") && !value_row_lines.empty()
              ? value_row_lines.front()
              : line_of(slot.key),
          "family " + s.family + " does not take '" + std::string(slot.key) +
              "'");
  }
  if (s.family == "tabulated") {
    if (s.values.size() + 1 != s.x_edges.size())
      fail_at_line(value_row_lines.empty() ? line_of("x-edges")
                                           : value_row_lines.back(),
                   "expected one values row per x cell (" +
                       std::to_string(s.x_edges.size() - 1) + " rows, got " +
                       std::to_string(s.values.size()) + ")");
    for (std::size_t i = 0; i < s.values.size(); ++i)
      if (s.values[i].size() != s.t_grid.size())
        fail_at_line(value_row_lines[i],
                     "values row needs one sample per t-grid point (" +
                         std::to_string(s.t_grid.size()) + ", got " +
                         std::to_string(s.values[i].size()) + ")");
  }
  return s;
}

}  // namespace mos
