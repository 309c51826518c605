#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mos/conditions.hpp"
#include "mos/domain.hpp"
#include "mos/errors.hpp"
#include "mos/extended.hpp"
#include "mos/mo_function.hpp"
#include "mos/modular.hpp"
#include "mos/norms.hpp"
#include "mos/operators.hpp"
#include "mos/piecewise.hpp"
#include "mos/uc_defect.hpp"

namespace mos {

/// Scaling margin behind every "unit norm" claim: a witness f is accepted
/// only if I(f) stays within its budget while I(1.05 f) > 1, which pins
/// ||f|| into [1/1.05, 1].
inline constexpr double kUnitScalingMargin = 0.05;

enum class WitnessKind {
  NonDelta2,
  LinfEmbed,
  L1Embed,
  UCFailurePair,
  UCModulusPair
};

inline const char* to_string(WitnessKind k) {
  switch (k) {
    case WitnessKind::NonDelta2: return "non-delta2";
    case WitnessKind::LinfEmbed: return "linf-embed";
    case WitnessKind::L1Embed: return "l1-embed";
    case WitnessKind::UCFailurePair: return "uc-failure-pair";
    case WitnessKind::UCModulusPair: return "uc-modulus-pair";
  }
  return "non-delta2";
}

inline WitnessKind witness_kind_from_text(const std::string& s) {
  if (s == "non-delta2") return WitnessKind::NonDelta2;
  if (s == "linf-embed") return WitnessKind::LinfEmbed;
  if (s == "l1-embed") return WitnessKind::L1Embed;
  if (s == "uc-failure-pair") return WitnessKind::UCFailurePair;
  if (s == "uc-modulus-pair") return WitnessKind::UCModulusPair;
  throw ParseError("unknown witness kind '" + s + "'", 0);
}

/// One recorded inequality claim lhs <= rhs. A row passes when the slack
/// rhs - lhs is no worse than -tol; strict claims carry tol = 0 and a
/// positive recorded slack.
struct CertifiedInequality {
  std::string name;
  double lhs = 0;
  double rhs = 0;
  double tol = 0;

  double slack() const { return rhs - lhs; }
  bool passed() const { return rhs - lhs >= -tol; }
};

/// A finite truncation of one of the sequence constructions, together with
/// the inequality rows that certify it. Everything needed to recheck the
/// rows is in `members` and `data`, so a deserialized sequence reproduces
/// its recorded slacks.
struct WitnessSequence {
  WitnessKind kind = WitnessKind::NonDelta2;
  int truncation = 0;
  std::vector<PiecewiseFunction> members;
  std::vector<EvidenceItem> data;
  std::vector<CertifiedInequality> certified;

  bool all_passed() const {
    for (const auto& c : certified)
      if (!c.passed()) return false;
    return true;
  }

  bool has_datum(const std::string& name) const {
    for (const auto& e : data)
      if (e.name == name) return true;
    return false;
  }

  double datum(const std::string& name) const {
    for (const auto& e : data)
      if (e.name == name) return e.value;
    throw ArgumentError("witness sequence has no datum named '" + name + "'");
  }

  std::string to_text() const {
    std::ostringstream os;
    char buf[40];
    auto num = [&](double v) {
      // stream extraction cannot read back "inf"; spell extended values out
      if (v == kInf) {
        os << " inf";
        return;
      }
      if (v == -kInf) {
        os << " -inf";
        return;
      }
      std::snprintf(buf, sizeof buf, " %.17g", v);
      os << buf;
    };
    os << "witness-sequence v1\n";
    os << "kind " << mos::to_string(kind) << "\n";
    os << "truncation " << truncation << "\n";
    for (const auto& e : data) {
      os << "data " << e.name;
      num(e.value);
      os << "\n";
    }
    for (const auto& m : members)
      os << "member\n" << m.to_text() << "member-end\n";
    for (const auto& c : certified) {
      os << "certificate " << c.name;
      num(c.lhs);
      num(c.rhs);
      num(c.tol);
      os << "\n";
    }
    return os.str();
  }

  static WitnessSequence from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "witness-sequence v1")
      throw ParseError("expected 'witness-sequence v1' header", 0);
    WitnessSequence ws;
    bool have_kind = false;
    auto num = [](std::istream& is, double& out) -> bool {
      std::string tok;
      if (!(is >> tok)) return false;
      if (tok == "inf") {
        out = kInf;
        return true;
      }
      if (tok == "-inf") {
        out = -kInf;
        return true;
      }
      char* end = nullptr;
      out = std::strtod(tok.c_str(), &end);
      return end == tok.c_str() + tok.size();
    };
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::string tag;
      ls >> tag;
      if (tag == "kind") {
        std::string k;
        if (!(ls >> k)) throw ParseError("witness kind line is empty", 0);
        ws.kind = witness_kind_from_text(k);
        have_kind = true;
      } else if (tag == "truncation") {
        if (!(ls >> ws.truncation))
          throw ParseError("bad truncation line", 0);
      } else if (tag == "data") {
        EvidenceItem e;
        if (!(ls >> e.name) || !num(ls, e.value))
          throw ParseError("bad data line", 0);
        ws.data.push_back(std::move(e));
      } else if (tag == "member") {
        std::string block;
        bool closed = false;
        while (std::getline(in, line)) {
          if (line == "member-end") {
            closed = true;
            break;
          }
          block += line;
          block += '\n';
        }
        if (!closed)
          throw ParseError("unterminated member block", 0);
        ws.members.push_back(PiecewiseFunction::from_text(block));
      } else if (tag == "certificate") {
        CertifiedInequality c;
        if (!(ls >> c.name) || !num(ls, c.lhs) || !num(ls, c.rhs) ||
            !num(ls, c.tol))
          throw ParseError("bad certificate line", 0);
        ws.certified.push_back(std::move(c));
      } else {
        throw ParseError("unknown witness line tag '" + tag + "'", 0);
      }
    }
    if (!have_kind) throw ParseError("witness sequence has no kind line", 0);
    return ws;
  }
};

namespace detail {

inline std::string idx(const char* stem, int k) {
  return std::string(stem) + "[" + std::to_string(k) + "]";
}

inline double ws_datum(const std::vector<EvidenceItem>& data,
                       const std::string& name) {
  for (const auto& e : data)
    if (e.name == name) return e.value;
  throw ArgumentError("witness sequence has no datum named '" + name + "'");
}

inline double modular_or_inf(const MOFunction& phi, const PiecewiseFunction& f,
                             double scale) {
  try {
    return modular(phi, f, scale);
  } catch (const AccuracyError&) {
    return kInf;
  }
}

inline double lux_or_inf(const MOFunction& phi, const PiecewiseFunction& f) {
  try {
    return luxemburg_norm(phi, f).value;
  } catch (const NotInSpaceError&) {
    return kInf;
  } catch (const AccuracyError&) {
    return kInf;
  }
}

inline double sobolev_or_inf(const MOFunction& phi,
                             const PiecewiseFunction& f) {
  try {
    return sobolev_norm(phi, f).value;
  } catch (const NotInSpaceError&) {
    return kInf;
  } catch (const AccuracyError&) {
    return kInf;
  }
}

inline double orlicz_or_inf(const MOFunction& phi, const PiecewiseFunction& f) {
  try {
    return orlicz_norm(phi, f).value;
  } catch (const NotInSpaceError&) {
    return kInf;
  } catch (const AccuracyError&) {
    return kInf;
  }
}

/// Indicator step of (lo, hi) inside the interval; requires
/// alpha <= lo < hi <= beta.
inline PiecewiseFunction indicator_step(const Domain& dom, double lo,
                                        double hi) {
  std::vector<double> b{dom.alpha};
  std::vector<double> v;
  if (lo > b.back()) {
    b.push_back(lo);
    v.push_back(0.0);
  }
  b.push_back(hi);
  v.push_back(1.0);
  if (dom.beta > b.back()) {
    b.push_back(dom.beta);
    v.push_back(0.0);
  }
  return PiecewiseFunction::step(std::move(b), std::move(v));
}

/// Full-interval step from disjoint constant patches sorted by position.
/// Touching patches share a breakpoint; gaps are filled with zero cells.
struct Patch {
  double lo = 0, hi = 0, value = 0;
};

inline PiecewiseFunction patches_step(const Domain& dom,
                                      std::vector<Patch> patches) {
  std::sort(patches.begin(), patches.end(),
            [](const Patch& a, const Patch& b) { return a.lo < b.lo; });
  std::vector<double> b{dom.alpha};
  std::vector<double> v;
  for (const auto& p : patches) {
    if (!(p.hi > p.lo)) continue;
    if (p.lo > b.back()) {
      b.push_back(p.lo);
      v.push_back(0.0);
    }
    b.push_back(p.hi);
    v.push_back(p.value);
  }
  if (dom.beta > b.back()) {
    b.push_back(dom.beta);
    v.push_back(0.0);
  }
  return PiecewiseFunction::step(std::move(b), std::move(v));
}

inline std::pair<double, double> support_bounds(const PiecewiseFunction& f) {
  const auto& b = f.breakpoints();
  double lo = kInf, hi = -kInf;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    const double m = 0.5 * (b[i] + b[i + 1]);
    if (f(m) != 0.0) {
      lo = std::min(lo, b[i]);
      hi = std::max(hi, b[i + 1]);
    }
  }
  if (!(lo <= hi)) lo = hi = b.front();
  return {lo, hi};
}

inline PiecewiseFunction weighted_sum(const std::vector<PiecewiseFunction>& fs,
                                      const std::vector<double>& w,
                                      std::size_t offset, std::size_t n) {
  PiecewiseFunction s = fs[offset].scaled(w[0]);
  for (std::size_t i = 1; i < n; ++i) s = s + fs[offset + i].scaled(w[i]);
  return s;
}

inline std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline void require_all(const std::vector<CertifiedInequality>& rows,
                        const char* where) {
  for (const auto& r : rows)
    if (!r.passed())
      throw ConstructionFailedError(std::string(where) + ": certificate '" +
                                    r.name + "' fails (lhs=" +
                                    short_num(r.lhs) + ", rhs=" +
                                    short_num(r.rhs) + ")");
}

/// Shared rows for a disjoint family of budgeted unit-norm steps: per-member
/// modular budget 2^-k and the two scaling margins, pairwise support gaps,
/// and the unit-ball placement of the sum.
inline void budget_rows(std::vector<CertifiedInequality>& rows,
                        const MOFunction& phi,
                        const std::vector<PiecewiseFunction>& fs,
                        const std::vector<EvidenceItem>& data,
                        const std::string& prefix) {
  const int n = static_cast<int>(fs.size());
  for (int k = 1; k <= n; ++k) {
    const auto& f = fs[k - 1];
    const double eta = ws_datum(data, prefix + idx("eta", k));
    rows.push_back({prefix + idx("modular-budget", k),
                    modular_or_inf(phi, f, 1.0), std::ldexp(1.0, -k), 0.0});
    rows.push_back({prefix + idx("norm-scaling", k), 1.0,
                    modular_or_inf(phi, f, 1.0 + kUnitScalingMargin), 0.0});
    rows.push_back({prefix + idx("tight-scaling", k), 1.0,
                    modular_or_inf(phi, f, 1.0 + eta), 0.0});
  }
  std::vector<std::pair<double, double>> sup;
  sup.reserve(fs.size());
  for (const auto& f : fs) sup.push_back(support_bounds(f));
  std::sort(sup.begin(), sup.end());
  for (std::size_t i = 0; i + 1 < sup.size(); ++i)
    rows.push_back({prefix + idx("support-gap", static_cast<int>(i) + 1), 0.0,
                    sup[i + 1].first - sup[i].second, 0.0});
  PiecewiseFunction s = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) s = s + fs[i];
  rows.push_back(
      {prefix + "sum-modular", modular_or_inf(phi, s, 1.0), 1.0, 0.0});
  const double lux = lux_or_inf(phi, s);
  rows.push_back({prefix + "sum-norm-upper", lux, 1.0, 1e-9});
  rows.push_back(
      {prefix + "sum-norm-lower", 1.0 / (1.0 + kUnitScalingMargin), lux,
       1e-9});
}

inline std::vector<CertifiedInequality> certify_non_delta2(
    const MOFunction& phi, const std::vector<PiecewiseFunction>& members,
    const std::vector<EvidenceItem>& data) {
  std::vector<CertifiedInequality> rows;
  budget_rows(rows, phi, members, data, "");
  return rows;
}

inline std::vector<CertifiedInequality> certify_linf(
    const MOFunction& phi, const std::vector<PiecewiseFunction>& members,
    const std::vector<EvidenceItem>& data) {
  const int n = static_cast<int>(members.size());
  std::vector<PiecewiseFunction> fs;
  fs.reserve(members.size());
  for (const auto& g : members) fs.push_back(g.weak_derivative());
  std::vector<CertifiedInequality> rows;
  budget_rows(rows, phi, fs, data, "");

  const double l = ws_datum(data, "l");
  std::vector<double> a(n);
  double a_inf = 0, eta_worst = 0;
  for (int k = 1; k <= n; ++k) {
    a[k - 1] = ws_datum(data, idx("a", k));
    a_inf = std::max(a_inf, std::abs(a[k - 1]));
    eta_worst = std::max(eta_worst, ws_datum(data, idx("eta", k)));
  }
  const double sob = sobolev_or_inf(phi, weighted_sum(members, a, 0, n));
  rows.push_back(
      {"sandwich-lower", a_inf, sob, a_inf * (eta_worst + 1e-6) + 1e-12});
  rows.push_back({"sandwich-upper", sob, (1.0 + l) * a_inf,
                  1e-9 * std::max(1.0, (1.0 + l) * a_inf)});
  return rows;
}

inline std::vector<CertifiedInequality> certify_l1(
    const MOFunction& phi, const std::vector<PiecewiseFunction>& members,
    const std::vector<EvidenceItem>& data) {
  if (members.size() % 2 != 0)
    throw ArgumentError(
        "an l1 witness stores antiderivatives followed by the dual family; "
        "the member count must be even");
  const int n = static_cast<int>(members.size() / 2);
  const MOFunction conj = phi.conjugate_function();
  std::vector<PiecewiseFunction> duals(members.begin() + n, members.end());
  std::vector<PiecewiseFunction> gs;
  gs.reserve(n);
  for (int k = 0; k < n; ++k) gs.push_back(members[k].weak_derivative());

  std::vector<CertifiedInequality> rows;
  budget_rows(rows, conj, duals, data, "dual-");

  const double eps_dual = ws_datum(data, "eps_dual");
  const double l = ws_datum(data, "l");
  for (int k = 1; k <= n; ++k) {
    rows.push_back({idx("dual-ball", k),
                    modular_or_inf(phi, gs[k - 1], 1.0), 1.0, 0.0});
    const double n0 = orlicz_or_inf(conj, duals[k - 1]);
    const double pairing = (duals[k - 1] * gs[k - 1]).integral();
    rows.push_back({idx("near-norming", k),
                    n0 - eps_dual * std::ldexp(1.0, -k), pairing,
                    1e-9 * std::max(1.0, n0)});
  }

  std::vector<double> a(n);
  double a_1 = 0, eta_worst = 0;
  for (int k = 1; k <= n; ++k) {
    a[k - 1] = ws_datum(data, idx("a", k));
    a_1 += std::abs(a[k - 1]);
    eta_worst = std::max(eta_worst, ws_datum(data, idx("dual-eta", k)));
  }
  const double sob = sobolev_or_inf(phi, weighted_sum(members, a, 0, n));
  rows.push_back({"sandwich-lower", 0.5 * a_1 - 2.0 * eps_dual, sob,
                  a_1 * (eta_worst + 1e-9) + 1e-12});
  rows.push_back({"sandwich-upper", sob, (1.0 + l) * a_1,
                  1e-9 * std::max(1.0, (1.0 + l) * a_1)});
  return rows;
}

inline std::vector<CertifiedInequality> certify_uc_pairs(
    const MOFunction& phi, const std::vector<PiecewiseFunction>& members,
    const std::vector<EvidenceItem>& data) {
  if (members.size() % 2 != 0)
    throw ArgumentError("uc failure pairs come interleaved (f_k, g_k); the "
                        "member count must be even");
  const int kk = static_cast<int>(members.size() / 2);
  const auto& dom = phi.domain();
  const double gamma = ws_datum(data, "gamma");
  std::vector<CertifiedInequality> rows;
  for (int k = 1; k <= kk; ++k) {
    const auto& f = members[2 * k - 2];
    const auto& g = members[2 * k - 1];
    const double ck = ws_datum(data, idx("c", k));
    const double bound = std::ldexp(1.0, -k);
    const double level = lux_or_inf(
        phi, PiecewiseFunction::constant(dom.alpha, dom.beta, bound));
    const auto xt = f.weak_derivative();
    const auto yt = g.weak_derivative();
    rows.push_back({idx("unit-modular-x", k),
                    std::abs(modular_or_inf(phi, xt.abs(), 1.0) - 1.0), 2e-6,
                    0.0});
    rows.push_back({idx("unit-modular-y", k),
                    std::abs(modular_or_inf(phi, yt.abs(), 1.0) - 1.0), 2e-6,
                    0.0});
    rows.push_back({idx("sobolev-norm-x", k),
                    std::abs(sobolev_or_inf(phi, f) - 1.0), level + 1e-5,
                    0.0});
    rows.push_back({idx("sobolev-norm-y", k),
                    std::abs(sobolev_or_inf(phi, g) - 1.0), level + 1e-5,
                    0.0});
    rows.push_back({idx("midpoint-norm", k), 1.0 - ck,
                    sobolev_or_inf(phi, (f + g).scaled(0.5)), 0.0});
    rows.push_back({idx("difference-norm", k), gamma,
                    sobolev_or_inf(phi, f - g), 0.0});
    rows.push_back({idx("difference-modular", k), gamma,
                    modular_or_inf(phi, (f - g).weak_derivative().abs(), 1.0),
                    1e-9});
    rows.push_back({idx("oscillation-sup-x", k), f.max_abs(), bound, 0.0});
    rows.push_back({idx("oscillation-sup-y", k), g.max_abs(), bound, 0.0});
  }
  return rows;
}

inline std::vector<CertifiedInequality> certify_uc_modulus(
    const MOFunction& phi, const std::vector<PiecewiseFunction>& members,
    const std::vector<EvidenceItem>& data) {
  std::vector<CertifiedInequality> rows;
  if (members.empty()) return rows;  // no pair was admitted
  if (members.size() != 2)
    throw ArgumentError("a modulus witness carries exactly two members");
  const double eps = ws_datum(data, "eps");
  const double est = ws_datum(data, "estimate");
  const auto& x = members[0];
  const auto& y = members[1];
  rows.push_back(
      {"unit-norm-x", std::abs(lux_or_inf(phi, x) - 1.0), 0.0, 1e-6});
  rows.push_back(
      {"unit-norm-y", std::abs(lux_or_inf(phi, y) - 1.0), 0.0, 1e-6});
  rows.push_back({"difference-lower", eps * (1.0 - 1e-9) - 1e-12,
                  lux_or_inf(phi, x - y), 1e-9});
  rows.push_back({"modulus-upper", 1.0 - lux_or_inf(phi, (x + y).scaled(0.5)),
                  est, 1e-9});
  return rows;
}

/// Disjoint steps f_n beside a blow-up point of the profile, each with
/// I(f_n) within the 2^-n budget while already the (1+eta)-scaling leaves
/// the unit ball. Deeper cells sharpen eta down to goal_eta when the
/// arithmetic allows it.
struct DisjointFamily {
  std::vector<PiecewiseFunction> members;
  std::vector<double> height, eta, lo, hi;
  double site = 0;
  int side = 0;
};

inline DisjointFamily disjoint_witness_family(const MOFunction& phi, int n,
                                              double site, int side,
                                              double depth0, double goal_eta) {
  const Domain& dom = phi.domain();
  DisjointFamily out;
  out.site = site;
  out.side = side;
  static constexpr double kLadder[] = {1e-7, 1e-6, 1e-5, 1e-4,
                                       1e-3, 1e-2, kUnitScalingMargin};
  double depth = depth0;
  for (int k = 1; k <= n; ++k) {
    const double budget = std::ldexp(1.0, -k);
    double best_eta = kInf, best_c = 0, best_lo = 0, best_hi = 0,
           best_depth = 0;
    int stale = 0;
    for (int attempt = 0; attempt < 80; ++attempt, depth *= 0.25) {
      const double lo = side < 0 ? site - depth : site + 0.25 * depth;
      const double hi = side < 0 ? site - 0.25 * depth : site + depth;
      if (!(hi - lo > 32e-18 * std::abs(site) + 1e-300)) break;
      const auto cell = indicator_step(dom, lo, hi);
      // largest height whose modular stays within the budget
      double c_in = 0, c_out = 1;
      bool bracket = false;
      for (int d = 0; d < 2100 && !bracket; ++d) {
        if (modular_or_inf(phi, cell, c_out) > budget)
          bracket = true;
        else {
          c_in = c_out;
          c_out *= 2;
        }
      }
      if (!bracket) continue;  // the profile never leaves the budget here
      for (int it = 0; it < 240 && c_out - c_in > 1e-16 * c_out; ++it) {
        const double m = 0.5 * (c_in + c_out);
        if (modular_or_inf(phi, cell, m) > budget)
          c_out = m;
        else
          c_in = m;
      }
      if (!(c_in > 0)) continue;
      if (!(modular_or_inf(phi, cell, (1.0 + kUnitScalingMargin) * c_in) >
            1.0))
        continue;
      double eta_k = kUnitScalingMargin;
      for (double eta : kLadder)
        if (modular_or_inf(phi, cell, (1.0 + eta) * c_in) > 1.0) {
          eta_k = eta;
          break;
        }
      if (eta_k < best_eta) {
        best_eta = eta_k;
        best_c = c_in;
        best_lo = lo;
        best_hi = hi;
        best_depth = depth;
        stale = 0;
      } else {
        ++stale;
      }
      if (eta_k <= goal_eta) break;
      if (stale >= 8) break;  // deeper cells have stopped helping
    }
    if (!(best_eta <= kUnitScalingMargin))
      throw ConstructionFailedError(
          "witness " + std::to_string(k) + ": no cell beside x=" +
          short_num(site) + " meets the modular budget together with the "
          "unit-norm scaling margin before the cell width underflows");
    out.members.push_back(
        indicator_step(dom, best_lo, best_hi).scaled(best_c));
    out.height.push_back(best_c);
    out.eta.push_back(best_eta);
    out.lo.push_back(best_lo);
    out.hi.push_back(best_hi);
    depth = 0.25 * best_depth;  // the next member sits strictly deeper
  }
  return out;
}

/// Candidate blow-up sites, most promising first: for x-free profiles the
/// left endpoint (finest double spacing), then the refutation witness
/// snapped to the nearest endpoint or declared singular point, then the
/// remaining special points.
inline std::vector<std::pair<double, int>> blowup_sites(
    const Domain& dom, MOFunction::Family family,
    const ConditionVerdict& refutation) {
  std::vector<std::pair<double, int>> sites;
  const double len = dom.length();
  auto add = [&](double s) {
    auto push = [&](double x, int side) {
      for (const auto& q : sites)
        if (std::abs(q.first - x) <= 1e-12 * len && q.second == side) return;
      sites.emplace_back(x, side);
    };
    if (s <= dom.alpha + 1e-12 * len) {
      push(dom.alpha, +1);
    } else if (s >= dom.beta - 1e-12 * len) {
      push(dom.beta, -1);
    } else if (s - dom.alpha >= dom.beta - s) {
      push(s, -1);
      push(s, +1);
    } else {
      push(s, +1);
      push(s, -1);
    }
  };
  if (family == MOFunction::Family::Orlicz) add(dom.alpha);
  double wx = 0;
  bool have_wx = false;
  for (const auto& e : refutation.evidence)
    if (e.name == "witness_x") {
      wx = e.value;
      have_wx = true;
    }
  if (have_wx) {
    double snapped = wx, dist = 0.05 * len;
    for (double c : {dom.alpha, dom.beta})
      if (std::abs(wx - c) < dist) {
        snapped = c;
        dist = std::abs(wx - c);
      }
    for (double c : dom.singularities)
      if (std::abs(wx - c) < dist) {
        snapped = c;
        dist = std::abs(wx - c);
      }
    add(snapped);
    if (snapped != wx) add(wx);
  }
  for (double s : dom.singularities) add(s);
  add(dom.beta);
  add(dom.alpha);
  return sites;
}

inline DisjointFamily build_witness_family(const MOFunction& phi, int n,
                                           double goal_eta,
                                           const ConditionVerdict& refutation) {
  const Domain& dom = phi.domain();
  std::string last;
  for (const auto& [site, side] : blowup_sites(dom, phi.family(), refutation)) {
    const double room = side < 0 ? site - dom.alpha : dom.beta - site;
    if (!(room > 0)) continue;
    try {
      return disjoint_witness_family(phi, n, site, side, 0.5 * room, goal_eta);
    } catch (const ConstructionFailedError& e) {
      last = e.what();
    }
  }
  throw ConstructionFailedError(
      last.empty() ? "no usable blow-up site for the witness family" : last);
}

/// Largest height of a concave cap t*s - Phi(x, s) over s in (0, cap]:
/// the pointwise Fenchel maximizer, found by bracketed ternary search on
/// profile evaluations alone.
inline double fenchel_maximizer(const MOFunction& phi, double x, double t,
                                double cap) {
  auto value = [&](double s) {
    const double p = phi.evaluate(x, s);
    return p == kInf ? -kInf : t * s - p;
  };
  double hi = 1.0;
  double best = 0, best_v = 0;
  for (int d = 0; d < 80 && hi < cap; ++d) {
    const double v = value(hi);
    if (v > best_v) {
      best_v = v;
      best = hi;
    } else if (hi > 4 * best + 1) {
      break;  // past the peak
    }
    hi *= 2;
  }
  hi = std::min(hi, cap);
  double lo = 0;
  for (int it = 0; it < 70; ++it) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (value(m1) < value(m2))
      lo = m1;
    else
      hi = m2;
  }
  const double s = 0.5 * (lo + hi);
  return value(s) > 0 ? s : (value(best) > 0 ? best : 0.0);
}

struct NearNorming {
  PiecewiseFunction g;
  double pairing = 0, norm0 = 0, rho = 0;
};

/// Partner g with I_Phi(g) <= 1 whose pairing against f = height * chi_(lo,hi)
/// comes within eps_dual * 2^-k of the Orlicz norm of f in the conjugate
/// space. The profile follows the pointwise Fenchel maximizer at a scaling
/// rho chosen so the modular lands just under 1.
inline NearNorming near_norming_partner(const MOFunction& phi,
                                        const MOFunction& conj, double lo,
                                        double hi, double height, double site,
                                        int k, double eps_dual) {
  const Domain& dom = phi.domain();
  const double budget = eps_dual * std::ldexp(1.0, -k);
  const double window = 1.0 - 0.4 * std::min(1.0, budget);
  const PiecewiseFunction f = indicator_step(dom, lo, hi).scaled(height);
  const double n0 = orlicz_or_inf(conj, f);
  if (n0 == kInf)
    throw ConstructionFailedError(
        "l1 witness " + std::to_string(k) +
        ": the dual member has no finite Orlicz norm");

  // the field varies fastest at the cell edge closer to the blow-up point;
  // grade the sampling toward it
  const double d_lo = std::abs(lo - site), d_hi = std::abs(hi - site);
  const bool near_lo = d_lo < d_hi;
  const double d_near = std::min(d_lo, d_hi), d_far = std::max(d_lo, d_hi);

  NearNorming best{patches_step(dom, {}), 0, n0, 0};
  for (int cells = 64; cells <= 4096; cells *= 4) {
    std::vector<double> edges(cells + 1), mids(cells);
    for (int j = 0; j <= cells; ++j) {
      const double r =
          d_near * std::pow(d_far / d_near, static_cast<double>(j) / cells);
      edges[j] = near_lo ? site + r : site - r;
    }
    if (!near_lo) std::reverse(edges.begin(), edges.end());
    edges.front() = lo;
    edges.back() = hi;
    for (int j = 0; j < cells; ++j) mids[j] = 0.5 * (edges[j] + edges[j + 1]);

    auto profile = [&](double rho) {
      std::vector<Patch> patches(cells);
      for (int j = 0; j < cells; ++j)
        patches[j] = {edges[j], edges[j + 1],
                      fenchel_maximizer(phi, mids[j], rho * height, 1e12)};
      return patches_step(dom, std::move(patches));
    };
    auto consider = [&](const PiecewiseFunction& g, double rho) {
      const double pairing = (f * g).integral();
      if (pairing > best.pairing) best = {g, pairing, n0, rho};
    };

    // scaling bracket: modular crosses 1 between r_in and r_out
    double r_in = 0, r_out = 1;
    PiecewiseFunction g_in = patches_step(dom, {});
    bool bracket = false;
    for (int d = 0; d < 500 && !bracket; ++d) {
      auto g = profile(r_out);
      if (modular_or_inf(phi, g, 1.0) > 1.0)
        bracket = true;
      else {
        r_in = r_out;
        g_in = g;
        r_out *= 2;
      }
    }
    if (bracket) {
      for (int it = 0; it < 200; ++it) {
        const double h = modular_or_inf(phi, g_in, 1.0);
        if (h >= window || r_out - r_in <= 1e-15 * r_out) break;
        const double m = 0.5 * (r_in + r_out);
        auto g = profile(m);
        if (modular_or_inf(phi, g, 1.0) > 1.0) {
          r_out = m;
        } else {
          r_in = m;
          g_in = g;
        }
      }
      if (r_in > 0) consider(g_in, r_in);
      // rescue for profiles whose modular jumps over the window: rescale
      // the shape itself until the modular lands just under 1
      auto shape = r_in > 0 ? g_in : profile(r_out);
      if (shape.max_abs() > 0) {
        double t_in = 0, t_out = 1;
        if (modular_or_inf(phi, shape, 1.0) <= 1.0) {
          t_in = 1;
          while (t_out < 1e12 &&
                 modular_or_inf(phi, shape, 2 * t_out) <= 1.0)
            t_out *= 2;
          t_out *= 2;
        }
        for (int it = 0; it < 200; ++it) {
          if (t_in > 0 && modular_or_inf(phi, shape, t_in) >= window) break;
          const double m = t_in > 0 ? 0.5 * (t_in + t_out)
                                    : 0.5 * t_out;
          if (modular_or_inf(phi, shape, m) > 1.0)
            t_out = m;
          else
            t_in = m;
          if (t_out - t_in <= 1e-15 * t_out) break;
        }
        if (t_in > 0) consider(shape.scaled(t_in), r_in > 0 ? r_in : r_out);
      }
    }
    if (best.pairing >= n0 - budget) return best;
  }
  throw ConstructionFailedError(
      "l1 witness " + std::to_string(k) +
      ": the near-norming pairing stalls at " + short_num(best.pairing) +
      " against a duality target of " + short_num(n0 - budget));
}

}  // namespace detail

/// Disjoint nonnegative steps f_n with I(f_n) <= 2^-n and I(1.05 f_n) > 1,
/// giving unit norms up to the recorded per-member scaling margin eta[k]
/// while the sum stays inside the unit ball. Requires a refuted doubling
/// condition; throws ConstructionFailedError when cell widths underflow
/// before the budget and the margin can both be met.
inline WitnessSequence non_delta2_witness(const MOFunction& phi, int n,
                                          double goal_eta = 1e-7) {
  if (n < 1) throw ArgumentError("witness truncation must be at least 1");
  if (!(goal_eta > 0 && goal_eta <= kUnitScalingMargin))
    throw ArgumentError("goal_eta must lie in (0, 0.05]");
  const auto d2 = delta2_verdict(phi);
  if (!d2.fails())
    throw ArgumentError(std::string("the doubling condition is not refuted "
                                    "for this function (status: ") +
                        to_string(d2.status) + ")");
  auto fam = detail::build_witness_family(phi, n, goal_eta, d2);
  WitnessSequence ws;
  ws.kind = WitnessKind::NonDelta2;
  ws.truncation = n;
  ws.members = std::move(fam.members);
  for (int k = 1; k <= n; ++k)
    ws.data.push_back({detail::idx("eta", k), fam.eta[k - 1]});
  ws.certified = detail::certify_non_delta2(phi, ws.members, ws.data);
  detail::require_all(ws.certified, "non_delta2_witness");
  return ws;
}

/// Antiderivatives g_k of the doubling-refutation witnesses. For any
/// coefficients a the combination sum a_k g_k has Sobolev norm between
/// ||a||_inf (up to the recorded scaling margins) and (1+l) ||a||_inf,
/// where l is the level-function bound of the embedding certificate:
/// the truncated isomorphic copy of the bounded-sequence space.
inline WitnessSequence linf_embedding(const MOFunction& phi, int n,
                                      const std::vector<double>& a,
                                      double goal_eta = 1e-7) {
  if (static_cast<int>(a.size()) != n)
    throw ArgumentError("coefficient count must equal the truncation");
  WitnessSequence base = non_delta2_witness(phi, n, goal_eta);
  const auto cert = volterra_certificate(phi);
  if (!cert.certified)
    throw ConstructionFailedError(
        "the level-function certificate is unavailable: " + cert.note);
  WitnessSequence ws;
  ws.kind = WitnessKind::LinfEmbed;
  ws.truncation = n;
  ws.members.reserve(base.members.size());
  for (const auto& f : base.members) ws.members.push_back(apply_volterra(f));
  ws.data = std::move(base.data);
  ws.data.push_back({"l", cert.l});
  for (int k = 1; k <= n; ++k)
    ws.data.push_back({detail::idx("a", k), a[k - 1]});
  ws.certified = detail::certify_linf(phi, ws.members, ws.data);
  detail::require_all(ws.certified, "linf_embedding");
  return ws;
}

/// Summing-basis copy driven by the conjugate function: dual witnesses d_k
/// in the conjugate space, near-norming partners g_k in the unit modular
/// ball, and members h_k = integral of g_k. For any coefficients a,
/// ||a||_1 / 2 - 2 eps_dual <= ||sum a_k h_k||_Sobolev <= (1+l) ||a||_1.
/// Members store h_1..h_n followed by d_1..d_n.
inline WitnessSequence l1_embedding(const MOFunction& phi, int n,
                                    const std::vector<double>& a,
                                    double eps_dual, double goal_eta = 1e-7) {
  if (static_cast<int>(a.size()) != n)
    throw ArgumentError("coefficient count must equal the truncation");
  if (!(eps_dual > 0))
    throw ArgumentError("the duality slack eps_dual must be positive");
  const auto cd = conjugate_delta2_verdict(phi);
  if (!cd.fails())
    throw ArgumentError(std::string("the conjugate doubling condition is not "
                                    "refuted for this function (status: ") +
                        to_string(cd.status) + ")");
  const auto cert = volterra_certificate(phi);
  if (!cert.certified)
    throw ConstructionFailedError(
        "the level-function certificate is unavailable: " + cert.note);
  const MOFunction conj = phi.conjugate_function();
  auto dual = detail::build_witness_family(conj, n, goal_eta, cd);

  WitnessSequence ws;
  ws.kind = WitnessKind::L1Embed;
  ws.truncation = n;
  for (int k = 1; k <= n; ++k) {
    auto nn = detail::near_norming_partner(phi, conj, dual.lo[k - 1],
                                           dual.hi[k - 1], dual.height[k - 1],
                                           dual.site, k, eps_dual);
    ws.members.push_back(nn.g.antiderivative());
  }
  for (auto& d : dual.members) ws.members.push_back(std::move(d));
  for (int k = 1; k <= n; ++k)
    ws.data.push_back({detail::idx("dual-eta", k), dual.eta[k - 1]});
  ws.data.push_back({"l", cert.l});
  ws.data.push_back({"eps_dual", eps_dual});
  for (int k = 1; k <= n; ++k)
    ws.data.push_back({detail::idx("a", k), a[k - 1]});
  ws.certified = detail::certify_l1(phi, ws.members, ws.data);
  detail::require_all(ws.certified, "l1_embedding");
  return ws;
}

/// Convexity-defect scan over a decreasing improvement schedule: for each c
/// the profile is searched for pairs u > v >= 0 with u - v > eps * u whose
/// midpoint value beats the (1-c)-improved average. A defect bounded away
/// from zero on the whole schedule is the raw material for the failure
/// pairs below.
struct UCFalsifierResult {
  double eps = 0;
  std::vector<double> c;
  std::vector<UCDefectResult> run;

  double min_defect() const {
    double m = kInf;
    for (const auto& r : run) m = std::min(m, r.defect);
    return run.empty() ? 0.0 : m;
  }
};

inline UCFalsifierResult uc_falsifier(const MOFunction& phi, double eps,
                                      std::vector<double> c_schedule = {}) {
  if (!(eps > 0 && eps < 1))
    throw ArgumentError("uc_falsifier: eps must lie in (0,1)");
  if (c_schedule.empty()) c_schedule = {0.2, 0.1, 0.05};
  for (std::size_t i = 0; i < c_schedule.size(); ++i) {
    if (!(c_schedule[i] > 0 && c_schedule[i] < 1))
      throw ArgumentError("uc_falsifier: every c must lie in (0,1)");
    if (i > 0 && !(c_schedule[i] < c_schedule[i - 1]))
      throw ArgumentError("uc_falsifier: the schedule must decrease");
  }
  UCFalsifierResult out;
  out.eps = eps;
  out.c = std::move(c_schedule);
  out.run.reserve(out.c.size());
  for (double c : out.c)
    out.run.push_back(uc_defect_estimate(phi, eps, c, 48, 200, 1e-4, 1e4));
  return out;
}

/// Sobolev pairs (f_k, g_k) realizing the failure of uniform convexity:
/// both within a constant-level tolerance of unit norm, midpoints above
/// 1 - c_k, differences above a recorded gamma > 0, yet with
/// max |f_k|, max |g_k| < 2^-k, so both sequences collapse uniformly while
/// the geometry refuses to improve. Default schedule c_k = 0.4 * 2^-k.
inline WitnessSequence uc_failure_sobolev_pairs(
    const MOFunction& phi, double eps, int pair_count,
    std::vector<double> c_schedule = {}) {
  if (!(eps > 0 && eps < 1))
    throw ArgumentError("uc_failure_sobolev_pairs: eps must lie in (0,1)");
  if (pair_count < 1)
    throw ArgumentError("uc_failure_sobolev_pairs: need at least one pair");
  if (c_schedule.empty())
    for (int k = 1; k <= pair_count; ++k)
      c_schedule.push_back(0.4 * std::ldexp(1.0, -k));
  if (static_cast<int>(c_schedule.size()) != pair_count)
    throw ArgumentError(
        "uc_failure_sobolev_pairs: schedule length must match pair count");
  const auto vflag = condition_V_verdict(phi);
  if (!vflag.holds())
    throw ArgumentError(
        std::string("uc_failure_sobolev_pairs: the integral-control "
                    "condition is not certified (status: ") +
        to_string(vflag.status) + ")");
  auto fal = uc_falsifier(phi, eps, c_schedule);
  if (!(fal.min_defect() > 1e-9))
    throw ConstructionFailedError(
        "uc_failure_sobolev_pairs: the convexity defect vanishes on the "
        "requested schedule; no failure pairs exist at these levels");

  const Domain& dom = phi.domain();
  const double len = dom.length();
  const double c_edge = 0.8 * c_schedule.back();
  const double vfac = 1.0 - std::min(1.02 * eps, 0.5 * (1.0 + eps));

  // height grid and the midpoint-defect test at level c_edge
  std::vector<double> ugrid(97);
  for (int i = 0; i < 97; ++i)
    ugrid[i] = 1e-3 * std::pow(1e6, i / 96.0);
  auto defect_at = [&](double x, double u) {
    const double fu = phi.evaluate(x, u), fv = phi.evaluate(x, vfac * u);
    if (!(fu > 0) || fu == kInf || fv == kInf) return false;
    const double fm = phi.evaluate(x, 0.5 * (1.0 + vfac) * u);
    return fm < kInf && fm > 0.5 * (1.0 - c_edge) * (fu + fv);
  };

  // longest contiguous run of x-cells carrying the defect
  const int scan = 256;
  std::vector<char> ok(scan, 0);
  for (int i = 0; i < scan; ++i) {
    const double x = dom.alpha + len * (i + 0.5) / scan;
    for (double u : ugrid)
      if (defect_at(x, u)) {
        ok[i] = 1;
        break;
      }
  }
  int best_i = 0, best_n = 0;
  for (int i = 0; i < scan;) {
    if (!ok[i]) {
      ++i;
      continue;
    }
    int j = i;
    while (j < scan && ok[j]) ++j;
    if (j - i > best_n) {
      best_n = j - i;
      best_i = i;
    }
    i = j;
  }
  double r_lo, r_hi;
  if (best_n > 0) {
    r_lo = dom.alpha + len * best_i / scan;
    r_hi = dom.alpha + len * (best_i + best_n) / scan;
  } else {
    const double wx = fal.run.back().witness_x;
    r_lo = std::max(dom.alpha, wx - len / 128);
    r_hi = std::min(dom.beta, wx + len / 128);
  }

  // one defect height per cell, aimed at an even share of the gap mass
  struct Cell {
    double lo = 0, hi = 0, u = 0;
  };
  const int m_cells = 16;
  std::vector<Cell> cells;
  const double share = 0.3 / m_cells;
  for (int j = 0; j < m_cells; ++j) {
    Cell c;
    c.lo = r_lo + (r_hi - r_lo) * j / m_cells;
    c.hi = r_lo + (r_hi - r_lo) * (j + 1) / m_cells;
    const double xm = 0.5 * (c.lo + c.hi);
    double miss = kInf;
    for (double u : ugrid) {
      if (!defect_at(xm, u)) continue;
      const double mass = phi.evaluate(xm, (1.0 - vfac) * u) * (c.hi - c.lo);
      if (mass < kInf && std::abs(mass - share) < miss) {
        miss = std::abs(mass - share);
        c.u = u;
      }
    }
    if (c.u > 0) cells.push_back(c);
  }
  if (cells.empty())
    throw ConstructionFailedError(
        "uc_failure_sobolev_pairs: no x-cell carries the defect at the "
        "requested improvement level");

  auto gap_step = [&](const std::vector<Cell>& cs) {
    std::vector<detail::Patch> p;
    for (const auto& c : cs) p.push_back({c.lo, c.hi, (1.0 - vfac) * c.u});
    return detail::patches_step(dom, std::move(p));
  };
  auto top_step = [&](const std::vector<Cell>& cs, double fac) {
    std::vector<detail::Patch> p;
    for (const auto& c : cs) p.push_back({c.lo, c.hi, fac * c.u});
    return detail::patches_step(dom, std::move(p));
  };

  // trim the gap mass until the upper branch stays well inside the ball
  double mass_cap = 0.6, i_u = kInf;
  for (int round = 0; round < 14; ++round) {
    double cum = 0;
    std::vector<Cell> kept;
    for (const auto& c : cells) {
      const double m =
          detail::modular_or_inf(phi, gap_step({c}), 1.0);
      if (cum + m <= mass_cap) {
        cum += m;
        kept.push_back(c);
        continue;
      }
      // partial cell: shrink the right edge to land on the cap
      Cell part = c;
      double lo = c.lo, hi = c.hi;
      for (int it = 0; it < 50; ++it) {
        part.hi = 0.5 * (lo + hi);
        const double pm = detail::modular_or_inf(phi, gap_step({part}), 1.0);
        if (cum + pm > mass_cap)
          hi = part.hi;
        else
          lo = part.hi;
      }
      part.hi = lo;
      if (part.hi > part.lo) kept.push_back(part);
      break;
    }
    if (kept.empty())
      throw ConstructionFailedError(
          "uc_failure_sobolev_pairs: the gap mass cannot be trimmed into "
          "the unit ball");
    cells = std::move(kept);
    i_u = detail::modular_or_inf(phi, top_step(cells, 1.0), 1.0);
    if (i_u <= 0.9) break;
    mass_cap *= 0.6;
  }
  if (!(i_u <= 0.9))
    throw ConstructionFailedError(
        "uc_failure_sobolev_pairs: the upper branch keeps overflowing the "
        "unit ball");

  const double i_v = detail::modular_or_inf(phi, top_step(cells, vfac), 1.0);
  const double d_gap = detail::modular_or_inf(phi, gap_step(cells), 1.0);
  if (!(d_gap > 0))
    throw ConstructionFailedError(
        "uc_failure_sobolev_pairs: the difference carries no modular mass");
  const double swap_mass = 0.5 * (i_u + i_v);

  // equalize the two branches by swapping heights left of a split point
  const double e_lo = cells.front().lo, e_hi = cells.back().hi;
  auto branch = [&](double split, bool swapped) {
    std::vector<detail::Patch> p;
    for (const auto& c : cells) {
      const double top = c.u, low = vfac * c.u;
      const double a = swapped ? low : top, b = swapped ? top : low;
      if (c.hi <= split) {
        p.push_back({c.lo, c.hi, a});
      } else if (c.lo >= split) {
        p.push_back({c.lo, c.hi, b});
      } else {
        p.push_back({c.lo, split, a});
        p.push_back({split, c.hi, b});
      }
    }
    return detail::patches_step(dom, std::move(p));
  };
  double s_lo = e_lo, s_hi = e_hi;
  for (int it = 0; it < 60; ++it) {
    const double m = 0.5 * (s_lo + s_hi);
    if (detail::modular_or_inf(phi, branch(m, false), 1.0) > swap_mass)
      s_hi = m;
    else
      s_lo = m;
  }
  const double split = s_lo;
  const auto xhat = branch(split, false);
  const auto yhat = branch(split, true);
  const double bx = detail::modular_or_inf(phi, xhat, 1.0);
  const double by = detail::modular_or_inf(phi, yhat, 1.0);
  if (!(std::abs(bx - by) <= 1e-6))
    throw ConstructionFailedError(
        "uc_failure_sobolev_pairs: branch equalization drifted apart");

  // pad both branches up to unit modular on a cell away from the gap
  const double left_room = e_lo - dom.alpha, right_room = dom.beta - e_hi;
  const double p_lo = left_room >= right_room ? dom.alpha : e_hi;
  const double p_len = std::max(left_room, right_room);
  if (!(p_len > 1e-9 * len))
    throw ConstructionFailedError(
        "uc_failure_sobolev_pairs: no room is left for the padding cell");
  const double g_lo = p_lo + 0.02 * p_len;
  const double w_max = 0.96 * p_len;
  const double pad_target = 1.0 - 0.5 * (bx + by);
  auto pad_mass = [&](double w, double sigma) {
    return detail::modular_or_inf(
        phi, detail::indicator_step(dom, g_lo, g_lo + w), sigma);
  };
  double sig_in = 0, sig_out = 1;
  for (int d = 0; d < 600; ++d) {
    const double s = pad_mass(w_max, sig_out);
    if (s >= pad_target) break;
    sig_in = sig_out;
    sig_out *= 2;
  }
  if (!(pad_mass(w_max, sig_out) >= pad_target))
    throw ConstructionFailedError(
        "uc_failure_sobolev_pairs: the padding cell cannot absorb the "
        "missing modular mass");
  double sigma = sig_out;
  if (pad_mass(w_max, sigma) == kInf) {
    // back off to a finite padding level when the profile jumps
    double a = std::max(sig_in, 1e-300), b = sigma;
    bool found = false;
    for (int it = 0; it < 90; ++it) {
      const double m = 0.5 * (a + b);
      const double s = pad_mass(w_max, m);
      if (s == kInf)
        b = m;
      else if (s >= pad_target) {
        sigma = m;
        found = true;
        break;
      } else {
        a = m;
      }
    }
    if (!found)
      throw ConstructionFailedError(
          "uc_failure_sobolev_pairs: the padding mass jumps straight to "
          "infinity at every usable level");
  }
  double w_in = 0, w_out = w_max;
  for (int it = 0; it < 80; ++it) {
    const double m = 0.5 * (w_in + w_out);
    if (pad_mass(m, sigma) > pad_target)
      w_out = m;
    else
      w_in = m;
  }
  const double pad_w = w_in > 0 ? w_in : w_out;

  auto with_pad = [&](const PiecewiseFunction& base) {
    std::vector<detail::Patch> p;
    const auto& br = base.breakpoints();
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
      const double v = base(0.5 * (br[i] + br[i + 1]));
      if (v != 0) p.push_back({br[i], br[i + 1], v});
    }
    p.push_back({g_lo, g_lo + pad_w, sigma});
    return detail::patches_step(dom, std::move(p));
  };
  const auto xk = with_pad(xhat);
  const auto yk = with_pad(yhat);
  const double d_final =
      detail::modular_or_inf(phi, (xk - yk).abs(), 1.0);
  const double gamma = (1.0 - 1e-9) * std::min(1.0, d_final);

  // sign oscillation on shared subcells: each block integrates to zero and
  // every prefix stays under 0.7 * 2^-k
  auto alternate_pair = [&](double cap) {
    const auto& br = xk.breakpoints();
    std::vector<double> nb{br.front()};
    std::vector<double> vx, vy;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
      const double a = br[i], b = br[i + 1];
      const double ux = xk(0.5 * (a + b)), uy = yk(0.5 * (a + b));
      const double m = std::max(std::abs(ux), std::abs(uy));
      if (m * (b - a) <= 0) {
        nb.push_back(b);
        vx.push_back(ux);
        vy.push_back(uy);
        continue;
      }
      const int half = static_cast<int>(m * (b - a) / (1.4 * cap)) + 1;
      for (int j = 0; j < 2 * half; ++j) {
        nb.push_back(j + 1 == 2 * half ? b : a + (b - a) * (j + 1) /
                                                 (2.0 * half));
        vx.push_back(j % 2 ? -ux : ux);
        vy.push_back(j % 2 ? -uy : uy);
      }
    }
    return std::make_pair(PiecewiseFunction::step(nb, vx),
                          PiecewiseFunction::step(nb, vy));
  };

  WitnessSequence ws;
  ws.kind = WitnessKind::UCFailurePair;
  ws.truncation = pair_count;
  for (int k = 1; k <= pair_count; ++k) {
    auto [xt, yt] = alternate_pair(std::ldexp(1.0, -k));
    ws.members.push_back(xt.antiderivative());
    ws.members.push_back(yt.antiderivative());
  }
  ws.data.push_back({"eps", eps});
  ws.data.push_back({"gamma", gamma});
  ws.data.push_back({"swap-mass", swap_mass});
  ws.data.push_back({"pad-height", sigma});
  ws.data.push_back({"pad-lo", g_lo});
  ws.data.push_back({"pad-width", pad_w});
  ws.data.push_back({"region-lo", e_lo});
  ws.data.push_back({"region-hi", e_hi});
  for (int k = 1; k <= pair_count; ++k)
    ws.data.push_back({detail::idx("c", k), c_schedule[k - 1]});
  ws.certified = detail::certify_uc_pairs(phi, ws.members, ws.data);
  detail::require_all(ws.certified, "uc_failure_sobolev_pairs");
  return ws;
}

/// Empirical upper bound on the modulus of convexity at separation eps:
/// the best (largest) midpoint norm over unit pairs at least eps apart,
/// reported as 1 - max ||(f+g)/2||. Deterministic for a fixed seed.
struct UCModulusEstimate {
  double eps = 0;
  double estimate = 1.0;
  double best_midpoint_norm = 0;
  double best_difference = 0;
  int pairs_tested = 0;
  int pairs_admitted = 0;
  std::string best_pair;
  std::vector<PiecewiseFunction> best_members;  // the admitted pair, if any
};

inline UCModulusEstimate uc_modulus_estimate(const MOFunction& phi, double eps,
                                             int trials,
                                             std::uint64_t seed = 0x5eed) {
  if (!(eps > 0 && eps < 2))
    throw ArgumentError("uc_modulus_estimate: eps must lie in (0,2)");
  if (trials < 0)
    throw ArgumentError("uc_modulus_estimate: trials must be nonnegative");
  const Domain& dom = phi.domain();
  const double len = dom.length();
  UCModulusEstimate out;
  out.eps = eps;

  auto unit = [&](const PiecewiseFunction& f)
      -> std::optional<PiecewiseFunction> {
    if (f.max_abs() == 0) return std::nullopt;
    const double nv = detail::lux_or_inf(phi, f);
    if (!(nv > 0) || nv == kInf) return std::nullopt;
    return f.scaled(1.0 / nv);
  };
  auto consider = [&](const PiecewiseFunction& f, const PiecewiseFunction& g,
                      const char* label) {
    ++out.pairs_tested;
    const double dn = detail::lux_or_inf(phi, f - g);
    if (!(dn >= eps * (1.0 - 1e-9) - 1e-12) || dn == kInf) return;
    const double mid = detail::lux_or_inf(phi, (f + g).scaled(0.5));
    if (mid == kInf) return;
    ++out.pairs_admitted;
    if (mid > out.best_midpoint_norm) {
      out.best_midpoint_norm = mid;
      out.best_difference = dn;
      out.best_pair = label;
      out.best_members = {f, g};
    }
  };

  // two-bump pairs r1 +- b r2 on a split interval: by disjointness the
  // difference norm is exactly 2b / ||r1 + b r2||, so b can be driven onto
  // the separation target
  for (double frac : {0.25, 0.5, 0.75}) {
    const double m = dom.alpha + frac * len;
    auto r1 = unit(detail::indicator_step(dom, dom.alpha, m));
    auto r2 = unit(detail::indicator_step(dom, m, dom.beta));
    if (!r1 || !r2) continue;
    consider(*r1, *r2, "flat-disjoint");
    auto sep = [&](double b) {
      const double nv = detail::lux_or_inf(phi, *r1 + r2->scaled(b));
      return nv > 0 && nv < kInf ? 2.0 * b / nv : 0.0;
    };
    double b_lo = 0, b_hi = 0, s_prev = 0;
    for (int i = 0; i <= 48; ++i) {
      const double b = 1e-6 * std::pow(1e12, i / 48.0);
      const double s = sep(b);
      if (s >= eps * (1.0 + 2e-9)) {
        b_hi = b;
        break;
      }
      b_lo = b;
      s_prev = s;
    }
    if (b_hi == 0 || s_prev >= eps) continue;
    for (int it = 0; it < 70; ++it) {
      const double b = 0.5 * (b_lo + b_hi);
      if (sep(b) >= eps * (1.0 + 2e-9))
        b_hi = b;
      else
        b_lo = b;
    }
    const double b = b_hi;
    const double nv = detail::lux_or_inf(phi, *r1 + r2->scaled(b));
    if (!(nv > 0) || nv == kInf) continue;
    consider((*r1 + r2->scaled(b)).scaled(1.0 / nv),
             (*r1 - r2->scaled(b)).scaled(1.0 / nv), "two-bump");
  }

  // pair suggested by the defect scan, padded into shape by normalization
  try {
    const auto d = uc_defect_estimate(phi, eps, 1.0 / 32, 48, 96, 1e-4, 1e4);
    if (d.defect > 0 && d.witness_u > d.witness_v) {
      for (double w : {0.2, 0.05, 0.01}) {
        const double half = 0.5 * w * len;
        const double lo = std::max(dom.alpha, d.witness_x - half);
        const double hi = std::min(dom.beta, d.witness_x + half);
        if (!(hi > lo)) continue;
        const auto cell = detail::indicator_step(dom, lo, hi);
        auto fu = unit(cell.scaled(d.witness_u));
        auto gv = unit(cell.scaled(std::max(d.witness_v, 1e-12)));
        if (fu && gv) consider(*fu, *gv, "defect-witness");
      }
    }
  } catch (const ArgumentError&) {
  }

  // random step pairs, separation tuned by bisection along a perturbation
  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(trial));
    std::student_t_distribution<double> heavy(2.0);
    const int cells = 16;
    std::vector<double> b(cells + 1), v0(cells), dv(cells);
    for (int i = 0; i <= cells; ++i) b[i] = dom.alpha + len * i / cells;
    for (int i = 0; i < cells; ++i) {
      v0[i] = heavy(rng);
      dv[i] = heavy(rng);
    }
    const PiecewiseFunction base = PiecewiseFunction::step(b, v0);
    const PiecewiseFunction dir = PiecewiseFunction::step(b, dv);
    auto f = unit(base);
    if (!f) continue;
    auto g_raw = unit(dir);
    if (g_raw) consider(*f, *g_raw, "random-pair");
    auto diff_at = [&](double t) -> double {
      auto g = unit(base + dir.scaled(t));
      if (!g) return -1.0;
      return detail::lux_or_inf(phi, *f - *g);
    };
    double t_lo = 0, t_hi = 0;
    for (int i = 0; i < 40; ++i) {
      const double t = std::ldexp(1.0, i - 20);
      const double s = diff_at(t);
      if (s >= eps * (1.0 + 2e-9)) {
        t_hi = t;
        break;
      }
      if (s >= 0) t_lo = t;
    }
    if (t_hi == 0) continue;
    for (int it = 0; it < 25; ++it) {
      const double t = 0.5 * (t_lo + t_hi);
      if (diff_at(t) >= eps * (1.0 + 2e-9))
        t_hi = t;
      else
        t_lo = t;
    }
    auto g = unit(base + dir.scaled(t_hi));
    if (g) consider(*f, *g, "random-pair");
  }

  out.estimate = out.pairs_admitted > 0
                     ? std::max(0.0, 1.0 - out.best_midpoint_norm)
                     : 1.0;
  return out;
}

/// Packages a modulus estimate as a witness sequence: the admitted pair
/// (when one exists) next to the numbers a recheck needs to reproduce it.
inline WitnessSequence uc_modulus_witness(const MOFunction& phi,
                                          const UCModulusEstimate& est) {
  WitnessSequence ws;
  ws.kind = WitnessKind::UCModulusPair;
  ws.truncation = est.best_members.empty() ? 0 : 1;
  ws.members = est.best_members;
  ws.data = {{"eps", est.eps},
             {"estimate", est.estimate},
             {"midpoint-norm", est.best_midpoint_norm},
             {"difference-norm", est.best_difference},
             {"pairs-tested", static_cast<double>(est.pairs_tested)},
             {"pairs-admitted", static_cast<double>(est.pairs_admitted)}};
  ws.certified = detail::certify_uc_modulus(phi, ws.members, ws.data);
  return ws;
}

/// Recompute every certificate row of a (possibly deserialized) witness
/// sequence from its members and data alone.
inline std::vector<CertifiedInequality> recheck_certificates(
    const MOFunction& phi, const WitnessSequence& ws) {
  switch (ws.kind) {
    case WitnessKind::NonDelta2:
      return detail::certify_non_delta2(phi, ws.members, ws.data);
    case WitnessKind::LinfEmbed:
      return detail::certify_linf(phi, ws.members, ws.data);
    case WitnessKind::L1Embed:
      return detail::certify_l1(phi, ws.members, ws.data);
    case WitnessKind::UCFailurePair:
      return detail::certify_uc_pairs(phi, ws.members, ws.data);
    case WitnessKind::UCModulusPair:
      return detail::certify_uc_modulus(phi, ws.members, ws.data);
  }
  throw ArgumentError("unknown witness kind");
}

struct RecheckRow {
  std::string name;
  double recorded_slack = 0;
  double fresh_slack = 0;
  double tol = 0;
  bool matched = false;
  bool passed = false;
};

/// Slack-by-slack comparison of the recorded certificate rows against a
/// fresh recomputation; `matched` asks the slacks to agree within the
/// row tolerance (never tighter than machine scale).
inline std::vector<RecheckRow> recheck_witness(const MOFunction& phi,
                                               const WitnessSequence& ws) {
  const auto fresh = recheck_certificates(phi, ws);
  std::vector<RecheckRow> rows;
  rows.reserve(ws.certified.size());
  for (const auto& rec : ws.certified) {
    RecheckRow row;
    row.name = rec.name;
    row.recorded_slack = rec.slack();
    row.tol = rec.tol;
    const CertifiedInequality* hit = nullptr;
    for (const auto& f : fresh)
      if (f.name == rec.name) {
        hit = &f;
        break;
      }
    if (hit) {
      row.fresh_slack = hit->slack();
      row.passed = hit->passed();
      const double scale =
          std::max({1.0, std::abs(hit->lhs), std::abs(hit->rhs)});
      if (row.recorded_slack > 1e99 && row.fresh_slack > 1e99)
        row.matched = true;
      else
        row.matched = std::abs(row.fresh_slack - row.recorded_slack) <=
                      std::max(rec.tol, 1e-12 * scale);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mos
