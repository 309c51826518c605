#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "mos/conditions.hpp"
#include "mos/errors.hpp"
#include "mos/extended.hpp"
#include "mos/norms.hpp"
#include "mos/operators.hpp"
#include "mos/probes.hpp"
#include "mos/space_spec.hpp"

namespace mos {

enum class EmitMode { Human, Rows, Structured };

inline EmitMode emit_mode_from_text(const std::string& s) {
  if (s == "human") return EmitMode::Human;
  if (s == "rows") return EmitMode::Rows;
  if (s == "structured") return EmitMode::Structured;
  throw ArgumentError("unknown emit mode '" + s +
                      "' (human, rows, structured)");
}

/// Shortest decimal text that parses back to exactly this double. Used by
/// every emitter, so the same value renders identically in every mode and
/// identically across runs.
inline std::string num_text(double v) {
  if (std::isnan(v)) return "nan";
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// One reportable item: a typed, named record with ordered key/value
/// fields. Every emit mode renders the same records, so the modes agree
/// field by field and differ only in layout.
struct ReportRecord {
  std::string type;
  std::string name;
  std::vector<std::pair<std::string, std::string>> fields;

  ReportRecord& field(std::string key, std::string value) {
    fields.emplace_back(std::move(key), std::move(value));
    return *this;
  }
  ReportRecord& field(std::string key, const char* value) {
    return field(std::move(key), std::string(value));
  }
  ReportRecord& field(std::string key, double value) {
    return field(std::move(key), num_text(value));
  }
  ReportRecord& field(std::string key, int value) {
    return field(std::move(key), std::to_string(value));
  }
  ReportRecord& field(std::string key, bool value) {
    return field(std::move(key), std::string(value ? "true" : "false"));
  }
};

namespace detail {

/// Field values may carry free text (notes); the machine layouts reserve
/// tabs and newlines as structure.
inline std::string sanitized(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  return out;
}

}  // namespace detail

class Report {
 public:
  ReportRecord& add(std::string type, std::string name) {
    records_.push_back({std::move(type), std::move(name), {}});
    return records_.back();
  }

  const std::vector<ReportRecord>& records() const { return records_; }

  std::string render(EmitMode mode) const {
    switch (mode) {
      case EmitMode::Human: return human();
      case EmitMode::Rows: return rows();
      case EmitMode::Structured: return structured();
    }
    return human();
  }

  std::string human() const {
    std::string out;
    for (const auto& rec : records_) {
      if (!out.empty()) out += "\n";
      out += rec.type + " " + rec.name + "\n";
      for (const auto& [k, v] : rec.fields)
        out += "  " + k + ": " + detail::sanitized(v) + "\n";
    }
    return out;
  }

  std::string rows() const {
    std::string out;
    for (const auto& rec : records_) {
      out += detail::sanitized(rec.type) + "\t" + detail::sanitized(rec.name);
      for (const auto& [k, v] : rec.fields)
        out += "\t" + detail::sanitized(k) + "=" + detail::sanitized(v);
      out += "\n";
    }
    return out;
  }

  std::string structured() const {
    std::string out = "mos-report v1\n";
    for (const auto& rec : records_) {
      out += detail::sanitized(rec.type) + " " + detail::sanitized(rec.name) +
             "\n";
      for (const auto& [k, v] : rec.fields)
        out += "  " + detail::sanitized(k) + " " + detail::sanitized(v) + "\n";
    }
    return out;
  }

 private:
  std::vector<ReportRecord> records_;
};

namespace detail {

inline std::string joined(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ",";
    out += p;
  }
  return out;
}

}  // namespace detail

inline void append_space(Report& r, const SpaceSpec& s) {
  auto& rec = r.add("space", s.family);
  rec.field("alpha", s.alpha);
  rec.field("beta", s.beta);
  if (!s.phi.empty()) rec.field("phi", s.phi);
  if (!s.p.empty()) rec.field("p", s.p);
  if (!s.r.empty()) rec.field("r", s.r);
  if (!s.a.empty()) rec.field("a", s.a);
  if (!s.singular.empty()) {
    std::string pts;
    for (double v : s.singular) {
      if (!pts.empty()) pts += ",";
      pts += num_text(v);
    }
    rec.field("singular", pts);
  }
  rec.field("quad-tol", s.domain().quad.abs_tol);
}

inline void append_condition(Report& r, const std::string& name,
                             const ConditionVerdict& v) {
  auto& rec = r.add("verdict", name);
  rec.field("status", std::string(to_string(v.status)));
  rec.field("rules", detail::joined(v.justification));
  for (const auto& e : v.evidence) rec.field(e.name, e.value);
  if (!v.note.empty()) rec.field("note", v.note);
}

inline void append_space_verdicts(Report& r, const SpaceVerdict& sv) {
  append_condition(r, "delta2", sv.delta2);
  append_condition(r, "delta2-conjugate", sv.delta2_conjugate);
  append_condition(r, "condition-V", sv.condition_V);
  append_condition(r, "uniformly-convex-phi", sv.uniformly_convex_phi);
  append_condition(r, "contains-linf", sv.contains_linf);
  append_condition(r, "contains-l1", sv.contains_l1);
  append_condition(r, "reflexive", sv.reflexive);
  append_condition(r, "uniformly-convex-space", sv.uniformly_convex_space);
  append_condition(r, "superreflexive", sv.superreflexive);
  append_condition(r, "b-convex", sv.b_convex);
}

inline void append_norm(Report& r, const std::string& name,
                        const NormResult& n) {
  auto& rec = r.add("norm", name);
  rec.field("value", n.value);
  rec.field("bracket", n.bracket);
  rec.field("iterations", n.iterations);
}

inline void append_certificate(Report& r, const std::string& name,
                               const BoundednessCertificate& c) {
  auto& rec = r.add("certificate", name);
  rec.field("certified", c.certified);
  rec.field("b", c.b);
  rec.field("c1", c.c1);
  rec.field("lambda", c.lambda);
  rec.field("l", c.l);
  rec.field("kernel-modular", c.I_psi_of_kernel);
  rec.field("bound-on-norm", c.bound_on_norm);
  if (!c.note.empty()) rec.field("note", c.note);
}

inline void append_witness(Report& r, const WitnessSequence& ws) {
  auto& rec = r.add("witness", to_string(ws.kind));
  rec.field("truncation", ws.truncation);
  rec.field("members", static_cast<int>(ws.members.size()));
  for (const auto& d : ws.data) rec.field(d.name, d.value);
  rec.field("all-passed", ws.all_passed());
  for (const auto& row : ws.certified) {
    auto& c = r.add("inequality", row.name);
    c.field("lhs", row.lhs);
    c.field("rhs", row.rhs);
    c.field("tol", row.tol);
    c.field("slack", row.slack());
    c.field("passed", row.passed());
  }
}

inline void append_recheck(Report& r, const std::vector<RecheckRow>& rows) {
  for (const auto& row : rows) {
    auto& rec = r.add("recheck", row.name);
    rec.field("recorded-slack", row.recorded_slack);
    rec.field("fresh-slack", row.fresh_slack);
    rec.field("tol", row.tol);
    rec.field("matched", row.matched);
    rec.field("passed", row.passed);
  }
}

}  // namespace mos
