#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mos/report.hpp"

namespace mos::cli {

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write '" + path + "'");
  out << text;
}

inline std::vector<double> comma_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string tok = text.substr(pos, comma - pos);
    const char* c = tok.c_str();
    char* end = nullptr;
    const double v = std::strtod(c, &end);
    if (tok.empty() || end != c + tok.size())
      throw ArgumentError("bad number '" + tok + "' in list '" + text + "'");
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

/// Deterministic coefficient vector for the embedding probes when the
/// user does not pass one: n uniform draws from [-1, 1].
inline std::vector<double> drawn_coeffs(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(static_cast<std::size_t>(n));
  for (double& v : a) v = u(rng);
  return a;
}

struct AuditArgs {
  std::string spec_path;
  std::string emit = "human";
};

struct NormArgs {
  std::string spec_path;
  std::string function_path;
  bool sobolev = false;
  bool orlicz = false;
  std::string emit = "human";
};

struct ProbeArgs {
  std::string spec_path;
  std::string kind;
  std::string verify_path;
  int terms = 4;
  double eps = 0;
  double eps_dual = 0.01;
  double goal_eta = 1e-7;
  int trials = 16;
  std::string coeffs;
  std::string c_schedule;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::string emit = "human";
};

struct OperatorArgs {
  std::string spec_path;
  std::string kernel;
  bool volterra = false;
  bool estimate = false;
  int trials = 8;
  int grid = 256;
  std::optional<std::uint64_t> seed;
  std::string emit = "human";
};

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag,
                                  const SpaceSpec& spec) {
  if (flag) return *flag;
  if (spec.seed) return *spec.seed;
  return 0x5eed;
}

inline int run_audit(const AuditArgs& args, std::ostream& out) {
  const auto spec = SpaceSpec::from_text(slurp(args.spec_path));
  const auto phi = spec.build();
  const auto sv = space_verdicts(phi);

  Report report;
  append_space(report, spec);
  append_space_verdicts(report, sv);
  out << report.render(emit_mode_from_text(args.emit));

  for (const auto& rec : report.records())
    if (rec.type == "verdict")
      for (const auto& [k, v] : rec.fields)
        if (k == "status" && v == "inconclusive") return 2;
  return 0;
}

inline int run_norm(const NormArgs& args, std::ostream& out) {
  const auto spec = SpaceSpec::from_text(slurp(args.spec_path));
  const auto phi = spec.build();
  const auto f = PiecewiseFunction::from_text(slurp(args.function_path));

  Report report;
  append_space(report, spec);
  if (args.sobolev)
    append_norm(report, "sobolev", sobolev_norm(phi, f));
  else if (args.orlicz)
    append_norm(report, "orlicz-amemiya", orlicz_norm(phi, f));
  else
    append_norm(report, "luxemburg", luxemburg_norm(phi, f));
  out << report.render(emit_mode_from_text(args.emit));
  return 0;
}

inline int run_probe(const ProbeArgs& args, std::ostream& out) {
  const auto spec = SpaceSpec::from_text(slurp(args.spec_path));
  const auto phi = spec.build();
  const auto mode = emit_mode_from_text(args.emit);
  const std::uint64_t seed = resolve_seed(args.seed, spec);

  Report report;
  append_space(report, spec);

  if (!args.verify_path.empty()) {
    const auto ws = WitnessSequence::from_text(slurp(args.verify_path));
    const auto rows = recheck_witness(phi, ws);
    append_witness(report, ws);
    append_recheck(report, rows);
    out << report.render(mode);
    for (const auto& row : rows)
      if (!row.matched || !row.passed) return 1;
    return 0;
  }

  auto coeffs = [&](bool sup_normalized) {
    auto a = args.coeffs.empty() ? drawn_coeffs(args.terms, seed)
                                 : comma_list(args.coeffs);
    if (sup_normalized) {
      double m = 0;
      for (double v : a) m = std::max(m, std::abs(v));
      if (m == 0) a.assign(a.size(), 1.0);
      else
        for (double& v : a) v /= m;
    }
    return a;
  };

  WitnessSequence ws;
  if (args.kind == "non-delta2") {
    ws = non_delta2_witness(phi, args.terms, args.goal_eta);
  } else if (args.kind == "linf") {
    ws = linf_embedding(phi, args.terms, coeffs(true), args.goal_eta);
  } else if (args.kind == "l1") {
    ws = l1_embedding(phi, args.terms, coeffs(false), args.eps_dual,
                      args.goal_eta);
  } else if (args.kind == "uc-fail") {
    if (!(args.eps > 0))
      throw ArgumentError("probe uc-fail needs --eps > 0");
    const auto sched = args.c_schedule.empty()
                           ? std::vector<double>{}
                           : comma_list(args.c_schedule);
    ws = uc_failure_sobolev_pairs(phi, args.eps, args.terms, sched);
  } else if (args.kind == "uc-modulus") {
    if (!(args.eps > 0))
      throw ArgumentError("probe uc-modulus needs --eps > 0");
    const auto est = uc_modulus_estimate(phi, args.eps, args.trials, seed);
    auto& rec = report.add("estimate", "uc-modulus");
    rec.field("eps", est.eps);
    rec.field("value", est.estimate);
    rec.field("pairs-tested", est.pairs_tested);
    rec.field("pairs-admitted", est.pairs_admitted);
    if (!est.best_pair.empty()) rec.field("source", est.best_pair);
    ws = uc_modulus_witness(phi, est);
  } else {
    throw ArgumentError("unknown probe kind '" + args.kind + "'");
  }

  const std::string path = args.out_path.empty()
                               ? "witness-" + args.kind + ".txt"
                               : args.out_path;
  spill(path, ws.to_text());
  report.add("witness-file", path);
  append_witness(report, ws);
  out << report.render(mode);
  return ws.all_passed() ? 0 : 2;
}

inline int run_operator(const OperatorArgs& args, std::ostream& out,
                        std::ostream& err) {
  const auto spec = SpaceSpec::from_text(slurp(args.spec_path));
  const auto phi = spec.build();
  const auto mode = emit_mode_from_text(args.emit);
  const std::uint64_t seed = resolve_seed(args.seed, spec);

  Report report;
  append_space(report, spec);

  BoundednessCertificate cert;
  Kernel kernel = Kernel::volterra();
  std::string name = "volterra";
  if (args.volterra) {
    const auto vc = condition_V_verdict(phi);
    if (!vc.holds()) {
      append_condition(report, "condition-V", vc);
      out << report.render(mode);
      return 2;
    }
    cert = volterra_certificate(phi);
  } else {
    kernel = Kernel::expression(args.kernel);
    name = "kernel";
    cert = kernel_certificate(phi, phi, kernel);
  }
  append_certificate(report, name, cert);

  bool lower_within_bound = true;
  if (args.estimate) {
    double est = estimate_operator_norm(phi, phi, kernel, args.trials, seed);
    try {
      const auto profile =
          power_iteration_profile(kernel, phi.domain(), args.grid);
      const double nu = luxemburg_norm(phi, profile).value;
      if (nu > 0) {
        const double nau =
            luxemburg_norm(phi, apply_kernel(kernel, profile)).value;
        est = std::max(est, nau / nu);
      }
    } catch (const NotInSpaceError&) {
    } catch (const AccuracyError&) {
    }
    auto& rec = report.add("estimate", "operator-norm-lower");
    rec.field("value", est);
    rec.field("trials", args.trials);
    rec.field("grid", args.grid);
    rec.field("seed", std::to_string(seed));
    if (cert.certified) {
      lower_within_bound =
          est <= cert.bound_on_norm +
                     1e-9 * std::max(1.0, std::abs(cert.bound_on_norm));
      rec.field("le-bound", lower_within_bound);
    }
  }

  out << report.render(mode);
  if (!cert.certified) return 2;
  if (!lower_within_bound) {
    err << "error: empirical lower bound exceeds the certified bound\n";
    return 1;
  }
  return 0;
}

/// Parses and runs one command line (without the program name). Returns
/// the process exit code: 0 for a decisive, certified result, 2 when a
/// verdict is inconclusive or a certificate is not certified, 1 on any
/// error (bad arguments, unreadable files, spaces the input does not
/// belong to, witnesses that fail their recheck).
inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"numerical toolkit for Musielak-Orlicz function spaces"};
  app.require_subcommand(1);
  app.footer(
      "The MOS_TOLERANCE_PROFILE environment variable (strict, default,\n"
      "fast) selects the quadrature tolerance used when a spec file sets\n"
      "neither quad-tol nor tolerance.");

  const auto emit_check = CLI::IsMember({"human", "rows", "structured"});

  AuditArgs audit;
  auto* audit_cmd =
      app.add_subcommand("audit", "evaluate every space condition");
  audit_cmd->add_option("spec-file", audit.spec_path, "space description file")
      ->required();
  audit_cmd->add_option("--emit", audit.emit, "output layout")
      ->check(emit_check);

  NormArgs norm;
  auto* norm_cmd =
      app.add_subcommand("norm", "norm of a piecewise function in the space");
  norm_cmd->add_option("spec-file", norm.spec_path, "space description file")
      ->required();
  norm_cmd
      ->add_option("function-file", norm.function_path,
                   "piecewise function file")
      ->required();
  auto* sob = norm_cmd->add_flag("--sobolev", norm.sobolev,
                                 "first-order Sobolev norm");
  norm_cmd
      ->add_flag("--orlicz-norm", norm.orlicz,
                 "Amemiya form instead of the Luxemburg norm")
      ->excludes(sob);
  norm_cmd->add_option("--emit", norm.emit, "output layout")
      ->check(emit_check);

  ProbeArgs probe;
  auto* probe_cmd = app.add_subcommand(
      "probe", "construct or recheck a certified witness sequence");
  probe_cmd->add_option("spec-file", probe.spec_path, "space description file")
      ->required();
  auto* kind_opt =
      probe_cmd
          ->add_option("kind", probe.kind,
                       "witness kind: non-delta2, linf, l1, uc-fail, "
                       "uc-modulus")
          ->check(CLI::IsMember(
              {"non-delta2", "linf", "l1", "uc-fail", "uc-modulus"}));
  probe_cmd
      ->add_option("--verify", probe.verify_path,
                   "recheck a previously written witness file")
      ->excludes(kind_opt);
  probe_cmd->add_option("-N,--terms", probe.terms,
                        "members or pairs to construct");
  probe_cmd->add_option("--eps", probe.eps,
                        "separation parameter for the uc kinds");
  probe_cmd->add_option("--eps-dual", probe.eps_dual,
                        "duality slack for the l1 kind");
  probe_cmd->add_option("--goal-eta", probe.goal_eta,
                        "target scaling margin for the witness heights");
  probe_cmd->add_option("--trials", probe.trials,
                        "random pairs for uc-modulus");
  probe_cmd->add_option("--coeffs", probe.coeffs,
                        "comma-separated combination coefficients");
  probe_cmd->add_option("--c-schedule", probe.c_schedule,
                        "comma-separated decreasing midpoint defects for "
                        "uc-fail");
  probe_cmd->add_option("--out", probe.out_path,
                        "witness file to write (default witness-<kind>.txt)");
  probe_cmd->add_option("--seed", probe.seed,
                        "seed override for randomized choices");
  probe_cmd->add_option("--emit", probe.emit, "output layout")
      ->check(emit_check);

  OperatorArgs op;
  auto* op_cmd = app.add_subcommand(
      "operator", "boundedness certificate for an integral operator");
  op_cmd->add_option("spec-file", op.spec_path, "space description file")
      ->required();
  auto* volt = op_cmd->add_flag("--volterra", op.volterra,
                                "the running-integral kernel");
  op_cmd->add_option("--kernel", op.kernel, "kernel expression k(x, y)")
      ->excludes(volt);
  op_cmd->add_flag("--estimate", op.estimate,
                   "add an empirical lower bound on the operator norm");
  op_cmd->add_option("--trials", op.trials, "random inputs for the estimate");
  op_cmd->add_option("--grid", op.grid,
                     "grid for the singular-profile lower bound");
  op_cmd->add_option("--seed", op.seed,
                     "seed override for randomized choices");
  op_cmd->add_option("--emit", op.emit, "output layout")->check(emit_check);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (app.got_subcommand(audit_cmd)) return run_audit(audit, out);
    if (app.got_subcommand(norm_cmd)) return run_norm(norm, out);
    if (app.got_subcommand(probe_cmd)) {
      if (probe.kind.empty() && probe.verify_path.empty())
        throw ArgumentError("probe needs a kind or --verify");
      return run_probe(probe, out);
    }
    if (app.got_subcommand(op_cmd)) {
      if (!op.volterra && op.kernel.empty())
        throw ArgumentError("operator needs --volterra or --kernel");
      return run_operator(op, out, err);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace mos::cli
