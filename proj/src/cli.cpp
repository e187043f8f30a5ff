#include "vopt/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "vopt/certificates.hpp"
#include "vopt/derivatives.hpp"
#include "vopt/oracle.hpp"
#include "vopt/parser.hpp"
#include "vopt/report.hpp"
#include "vopt/sufficiency.hpp"
#include "vopt/version.hpp"

namespace vopt {

namespace {

Eigen::VectorXd parse_csv(const std::string& text, const std::string& what) {
  std::vector<double> vals;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t comma = text.find(',', pos);
    std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                  : comma - pos);
    while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.erase(tok.begin());
    while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t')) tok.pop_back();
    char* end = nullptr;
    const double v = tok.empty() ? 0.0 : std::strtod(tok.c_str(), &end);
    if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(v))
      throw Error(what + ": bad numeric entry '" + tok + "'");
    vals.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  Eigen::VectorXd out(static_cast<int>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) out[static_cast<int>(i)] = vals[i];
  return out;
}

Box parse_box_csv(const std::string& text, int s) {
  const Eigen::VectorXd flat = parse_csv(text, "--box");
  if (flat.size() != 2 * s) throw Error("--box wants lo,hi per variable");
  Box box;
  for (int i = 0; i < s; ++i) {
    if (!(flat[2 * i] <= flat[2 * i + 1])) throw Error("--box interval with lo > hi");
    box.push_back({flat[2 * i], flat[2 * i + 1]});
  }
  return box;
}

// Default box for scans when neither a flag nor a domain pins one down.
Box fallback_box(const VectorProblem& p) {
  if (p.domain()) return *p.domain();
  return Box(static_cast<std::size_t>(p.variable_count()), {-2.0, 2.0});
}

struct Shared {
  std::string file;
  std::string point_csv;
  std::string format = "json";
  bool no_meta = false;
  std::uint64_t seed = 0;
  std::optional<double> tol_membership, tol_strict, tol_stationarity, tol_slackness,
      tol_activity, delta_strict;

  void attach(CLI::App* cmd, bool with_point) {
    cmd->add_option("file", file, "problem file (.vopt)")->required();
    if (with_point)
      cmd->add_option("--point", point_csv, "candidate point, comma-separated decimals");
    cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "text"}));
    cmd->add_flag("--no-meta", no_meta, "omit the meta block (wall time)");
    cmd->add_option("--seed", seed, "sampling seed");
    cmd->add_option("--tol-membership", tol_membership, "cone membership slack");
    cmd->add_option("--tol-strict", tol_strict, "strict interior margin");
    cmd->add_option("--tol-stationarity", tol_stationarity, "stationarity residual bound");
    cmd->add_option("--tol-slackness", tol_slackness, "slackness residual bound");
    cmd->add_option("--tol-activity", tol_activity, "slack-ray activity cut");
    cmd->add_option("--delta-strict", delta_strict, "sampled strict-inequality margin");
  }

  VectorProblem load() const {
    std::ifstream in(file);
    if (!in) throw Error("cannot open '" + file + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    VectorProblem p = parse_problem(ss.str());
    if (tol_membership) p.tolerances().membership = *tol_membership;
    if (tol_strict) p.tolerances().strict = *tol_strict;
    if (tol_stationarity) p.tolerances().stationarity = *tol_stationarity;
    if (tol_slackness) p.tolerances().slackness = *tol_slackness;
    if (tol_activity) p.tolerances().activity = *tol_activity;
    if (delta_strict) p.tolerances().strict_margin = *delta_strict;
    return p;
  }

  Eigen::VectorXd point(const VectorProblem& p) const {
    if (point_csv.empty()) throw Error("--point is required for this subcommand");
    const Eigen::VectorXd x = parse_csv(point_csv, "--point");
    if (static_cast<int>(x.size()) != p.variable_count())
      throw DimensionError("--point arity differs from the variable count");
    return x;
  }
};

struct ScheduleOpts {
  double t0 = 1e-2;
  double rho = 0.5;
  int depth = 20;
  int perturbations = 32;

  void attach(CLI::App* cmd) {
    cmd->add_option("--t0", t0, "initial step");
    cmd->add_option("--rho", rho, "step shrink factor");
    cmd->add_option("--depth", depth, "refinement levels");
    cmd->add_option("--perturbations", perturbations, "direction cloud size per level");
  }

  LimitSchedule schedule() const {
    LimitSchedule s;
    s.t0 = t0;
    s.rho = rho;
    s.depth = depth;
    s.perturbation_count = perturbations;
    s.validate();
    return s;
  }
};

Json base_report(const VectorProblem& p, const std::string& sub) {
  Json j;
  j["schema"] = kReportSchema;
  j["tool_version"] = kToolVersion;
  j["subcommand"] = sub;
  j["problem"] = problem_digest(p);
  return j;
}

// Records the point and feasibility; an infeasible candidate is itself a
// computed verdict (exit 0), not an error.
bool gate_feasible(const VectorProblem& p, const Eigen::VectorXd& x, Json& report) {
  report["point"] = vector_json(x);
  const bool ok = is_feasible(p, x);
  report["feasible"] = ok;
  if (!ok) report["verdict"] = "infeasible-candidate";
  return ok;
}

Json estimate_json(const DerivativeEstimate& e) {
  Json j;
  j["value"] = json_number(e.value);
  j["samples_used"] = e.samples_used;
  j["step_at_min"] = json_number(e.step_at_min);
  j["direction_at_min"] = vector_json(e.direction_at_min);
  return j;
}

MultiplierPair manual_pair(const VectorProblem& p, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& lambda, const Eigen::VectorXd& mu) {
  if (static_cast<int>(lambda.size()) != p.objective_count())
    throw DimensionError("--lambda arity differs from the objective count");
  if (static_cast<int>(mu.size()) != p.constraint_count())
    throw DimensionError("--mu arity differs from the constraint count");
  MultiplierPair pair;
  pair.lambda = lambda;
  pair.mu = mu;
  const EvaluatedPoint ev = evaluate(p, x, 1);
  pair.stationarity_residual =
      (lambda.transpose() * ev.jac_f + mu.transpose() * ev.jac_g).lpNorm<Eigen::Infinity>();
  pair.slackness_residual = std::abs(mu.dot(ev.g));
  return pair;
}

const char* verdict_name(CandidateCheck::Verdict v) {
  switch (v) {
    case CandidateCheck::Verdict::kRefutedFirstOrder: return "refuted-first-order";
    case CandidateCheck::Verdict::kRefutedSecondOrder: return "refuted-second-order";
    default: return "consistent";
  }
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();

  CLI::App app{"Fritz John condition checker for cone-constrained vector programs"};
  app.require_subcommand(1);

  Shared sh;

  auto* cmd_check = app.add_subcommand("check", "first-order multiplier certificate");
  Shared sh_check;
  sh_check.attach(cmd_check, true);

  auto* cmd_check2 =
      app.add_subcommand("check2", "first- plus second-order certificate over sampled directions");
  Shared sh_check2;
  sh_check2.attach(cmd_check2, true);
  int check2_directions = 64;
  cmd_check2->add_option("--directions", check2_directions, "critical directions to sample");

  auto* cmd_suff = app.add_subcommand("sufficiency", "global weak-minimality verdict via falsifiers");
  Shared sh_suff;
  sh_suff.attach(cmd_suff, true);
  int suff_order = 1;
  long suff_pairs = 10000;
  std::string suff_box, suff_lambda, suff_mu;
  cmd_suff->add_option("--order", suff_order, "1 or 2")->check(CLI::IsMember({1, 2}));
  cmd_suff->add_option("--pairs", suff_pairs, "sampled pairs per falsifier");
  cmd_suff->add_option("--box", suff_box, "sampling box lo,hi per variable");
  cmd_suff->add_option("--lambda", suff_lambda, "multiplier lambda override");
  cmd_suff->add_option("--mu", suff_mu, "multiplier mu override");

  auto* cmd_iso = app.add_subcommand("isolated", "isolated-minimum checks");
  Shared sh_iso;
  sh_iso.attach(cmd_iso, true);
  int iso_order = 1;
  long iso_pairs = 10000;
  int iso_dirs = 64;
  double iso_radius = 0.5;
  std::string iso_lambda, iso_mu;
  ScheduleOpts iso_sched;
  cmd_iso->add_option("--order", iso_order, "1 or 2")->check(CLI::IsMember({1, 2}));
  cmd_iso->add_option("--pairs", iso_pairs, "neighborhood samples");
  cmd_iso->add_option("--dirs", iso_dirs, "directions to test");
  cmd_iso->add_option("--radius", iso_radius, "neighborhood radius");
  cmd_iso->add_option("--lambda", iso_lambda, "multiplier lambda override");
  cmd_iso->add_option("--mu", iso_mu, "multiplier mu override");
  iso_sched.attach(cmd_iso);

  auto* cmd_scan = app.add_subcommand("scan", "brute-force domination scan");
  Shared sh_scan;
  sh_scan.attach(cmd_scan, true);
  double scan_radius = 0.5;
  int scan_ppa = 41;
  long scan_cap = 1000000;
  bool scan_random = false;
  long scan_count = 100000;
  bool scan_global = false;
  std::string scan_box;
  cmd_scan->add_option("--radius", scan_radius, "neighborhood radius");
  cmd_scan->add_option("--ppa", scan_ppa, "lattice points per axis");
  cmd_scan->add_option("--cap", scan_cap, "lattice point cap");
  cmd_scan->add_flag("--random", scan_random, "sample the neighborhood randomly");
  cmd_scan->add_option("--count", scan_count, "random sample count");
  cmd_scan->add_flag("--global", scan_global, "scan a whole box instead of a neighborhood");
  cmd_scan->add_option("--box", scan_box, "global scan box lo,hi per variable");

  auto* cmd_deriv = app.add_subcommand("deriv", "directional derivative estimates and the scalarized gap");
  Shared sh_deriv;
  sh_deriv.attach(cmd_deriv, true);
  std::string deriv_kind = "dini", deriv_target = "f", deriv_dir, deriv_base, deriv_x;
  int deriv_index = 0;
  ScheduleOpts deriv_sched;
  cmd_deriv->add_option("--kind", deriv_kind, "dini | hadamard | hadamard2 | gap")
      ->check(CLI::IsMember({"dini", "hadamard", "hadamard2", "gap"}));
  cmd_deriv->add_option("--target", deriv_target, "f or g")->check(CLI::IsMember({"f", "g"}));
  cmd_deriv->add_option("--index", deriv_index, "component index");
  cmd_deriv->add_option("--direction", deriv_dir, "direction, comma-separated");
  cmd_deriv->add_option("--base", deriv_base, "linear functional for hadamard2");
  cmd_deriv->add_option("--x", deriv_x, "second point for the gap");
  deriv_sched.attach(cmd_deriv);

  auto* cmd_polar = app.add_subcommand("polar", "cone representations and the polar");
  Shared sh_polar;
  sh_polar.attach(cmd_polar, false);
  std::string polar_which = "C";
  cmd_polar->add_option("--cone", polar_which, "C or K")->check(CLI::IsMember({"C", "K"}));

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  auto emit = [&](Json&& report, const Shared& opts) -> int {
    if (!opts.no_meta) {
      Json meta;
      meta["wall_ms"] =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
              .count();
      report["meta"] = meta;
    }
    if (opts.format == "text")
      out << render_text(report);
    else
      out << report.dump(2) << "\n";
    return 0;
  };

  try {
    if (cmd_check->parsed()) {
      sh = sh_check;
      const VectorProblem p = sh.load();
      Json r = base_report(p, "check");
      const Eigen::VectorXd x = sh.point(p);
      r["tolerances"] = tolerances_json(p.tolerances());
      if (!gate_feasible(p, x, r)) return emit(std::move(r), sh);
      const auto pair = first_order_certificate(p, x);
      r["verdict"] = pair ? "certified" : "refuted-first-order";
      r["first_order"] = pair ? multiplier_json(*pair) : Json(nullptr);
      return emit(std::move(r), sh);
    }

    if (cmd_check2->parsed()) {
      sh = sh_check2;
      const VectorProblem p = sh.load();
      Json r = base_report(p, "check2");
      const Eigen::VectorXd x = sh.point(p);
      r["tolerances"] = tolerances_json(p.tolerances());
      if (!gate_feasible(p, x, r)) return emit(std::move(r), sh);
      CertificateOptions opts;
      opts.direction_count = check2_directions;
      opts.seed = sh.seed;
      const CandidateCheck check = check_candidate(p, x, opts);
      r["verdict"] = verdict_name(check.verdict);
      r["check"] = candidate_check_json(check);
      return emit(std::move(r), sh);
    }

    if (cmd_suff->parsed()) {
      sh = sh_suff;
      const VectorProblem p = sh.load();
      Json r = base_report(p, "sufficiency");
      const Eigen::VectorXd x = sh.point(p);
      r["tolerances"] = tolerances_json(p.tolerances());
      if (!gate_feasible(p, x, r)) return emit(std::move(r), sh);
      MultiplierPair pair;
      if (!suff_lambda.empty() || !suff_mu.empty()) {
        const Eigen::VectorXd lambda = suff_lambda.empty()
                                           ? Eigen::VectorXd::Zero(p.objective_count()).eval()
                                           : parse_csv(suff_lambda, "--lambda");
        const Eigen::VectorXd mu = suff_mu.empty()
                                       ? Eigen::VectorXd::Zero(p.constraint_count()).eval()
                                       : parse_csv(suff_mu, "--mu");
        pair = manual_pair(p, x, lambda, mu);
      } else {
        const auto cert = first_order_certificate(p, x);
        if (!cert) {
          r["verdict"] = "refuted-first-order";
          r["first_order"] = nullptr;
          return emit(std::move(r), sh);
        }
        pair = *cert;
      }
      r["first_order"] = multiplier_json(pair);
      SamplingBudget budget;
      budget.pair_count = suff_pairs;
      budget.seed = sh.seed;
      if (!suff_box.empty()) budget.box = parse_box_csv(suff_box, p.variable_count());
      const SufficiencyVerdict v = suff_order == 1
                                       ? first_order_global_verdict(p, x, pair, budget)
                                       : second_order_global_verdict(p, x, pair, budget);
      r["verdict"] = v.label;
      r["sufficiency"] = sufficiency_json(v);
      return emit(std::move(r), sh);
    }

    if (cmd_iso->parsed()) {
      sh = sh_iso;
      const VectorProblem p = sh.load();
      Json r = base_report(p, "isolated");
      const Eigen::VectorXd x = sh.point(p);
      r["tolerances"] = tolerances_json(p.tolerances());
      if (!gate_feasible(p, x, r)) return emit(std::move(r), sh);
      Eigen::VectorXd lambda, mu;
      if (!iso_lambda.empty() || !iso_mu.empty()) {
        lambda = iso_lambda.empty() ? Eigen::VectorXd::Zero(p.objective_count()).eval()
                                    : parse_csv(iso_lambda, "--lambda");
        mu = iso_mu.empty() ? Eigen::VectorXd::Zero(p.constraint_count()).eval()
                            : parse_csv(iso_mu, "--mu");
      } else {
        const auto cert = first_order_certificate(p, x);
        if (!cert) {
          r["verdict"] = "refuted-first-order";
          r["first_order"] = nullptr;
          return emit(std::move(r), sh);
        }
        lambda = cert->lambda;
        mu = cert->mu;
      }
      SamplingBudget budget;
      budget.pair_count = iso_pairs;
      budget.seed = sh.seed;
      IsolatedVerdict v;
      if (iso_order == 1) {
        v = isolated_first_order_check(p, x, lambda, mu, budget, iso_sched.schedule(), iso_dirs,
                                       iso_radius);
      } else {
        const auto dirs = sample_critical_directions(critical_cone(p, x), iso_dirs, sh.seed);
        v = isolated_second_order_check(p, x, lambda, mu, dirs, budget, iso_radius);
      }
      r["verdict"] = v.label;
      r["isolated"] = isolated_json(v);
      return emit(std::move(r), sh);
    }

    if (cmd_scan->parsed()) {
      sh = sh_scan;
      const VectorProblem p = sh.load();
      Json r = base_report(p, "scan");
      const Eigen::VectorXd x = sh.point(p);
      r["tolerances"] = tolerances_json(p.tolerances());
      if (!gate_feasible(p, x, r)) return emit(std::move(r), sh);
      OracleResult res;
      if (scan_global) {
        const Box box =
            scan_box.empty() ? fallback_box(p) : parse_box_csv(scan_box, p.variable_count());
        res = weak_global_scan(p, x, box, scan_count, sh.seed);
      } else {
        ScanGrid grid;
        grid.radius = scan_radius;
        grid.points_per_axis = scan_ppa;
        grid.cap = scan_cap;
        grid.random_mode = scan_random;
        grid.random_count = scan_count;
        grid.seed = sh.seed;
        res = weak_local_min_oracle(p, x, grid);
      }
      r["verdict"] = res.weak_local_min ? "no-dominator-found" : "dominated";
      r["oracle"] = oracle_json(res);
      return emit(std::move(r), sh);
    }

    if (cmd_deriv->parsed()) {
      sh = sh_deriv;
      const VectorProblem p = sh.load();
      Json r = base_report(p, "deriv");
      const Eigen::VectorXd x = sh.point(p);
      r["tolerances"] = tolerances_json(p.tolerances());
      if (deriv_kind == "gap") {
        if (deriv_x.empty()) throw Error("--x is required for the gap");
        if (!gate_feasible(p, x, r)) return emit(std::move(r), sh);
        const Eigen::VectorXd target = parse_csv(deriv_x, "--x");
        if (static_cast<int>(target.size()) != p.variable_count())
          throw DimensionError("--x arity differs from the variable count");
        r["verdict"] = "computed";
        r["gap"] = json_number(scalarized_gap(p, x, target));
        return emit(std::move(r), sh);
      }
      r["point"] = vector_json(x);
      if (deriv_dir.empty()) throw Error("--direction is required for derivative estimates");
      const Eigen::VectorXd u = parse_csv(deriv_dir, "--direction");
      if (static_cast<int>(u.size()) != p.variable_count())
        throw DimensionError("--direction arity differs from the variable count");
      const auto& exprs = deriv_target == "f" ? p.objective() : p.constraint();
      if (deriv_index < 0 || deriv_index >= static_cast<int>(exprs.size()))
        throw Error("--index out of range");
      const ExprPtr expr = exprs[static_cast<std::size_t>(deriv_index)];
      // Raw tree evaluation: probes may leave the domain box near its edge.
      const ScalarFn h = [expr](const Eigen::VectorXd& z) { return expr->eval(z); };
      const LimitSchedule sched = deriv_sched.schedule();
      DerivativeEstimate est;
      if (deriv_kind == "dini") {
        est = dini_lower(h, x, u, sched);
      } else if (deriv_kind == "hadamard") {
        est = hadamard_lower(h, x, u, sched);
      } else {
        Eigen::VectorXd base;
        if (!deriv_base.empty()) {
          base = parse_csv(deriv_base, "--base");
          if (static_cast<int>(base.size()) != p.variable_count())
            throw DimensionError("--base arity differs from the variable count");
        } else {
          const EvaluatedPoint ev = evaluate(p, x, 1);
          base = deriv_target == "f" ? ev.jac_f.row(deriv_index).transpose().eval()
                                     : ev.jac_g.row(deriv_index).transpose().eval();
        }
        est = hadamard_second_lower(h, x, base, u, sched);
      }
      r["verdict"] = "computed";
      r["estimate"] = estimate_json(est);
      return emit(std::move(r), sh);
    }

    // polar
    sh = sh_polar;
    const VectorProblem p = sh.load();
    Json r = base_report(p, "polar");
    const PolyhedralCone& cone = polar_which == "K" ? p.cone_k() : p.cone_c();
    const PolyhedralCone dual = polar(cone);
    r["which"] = polar_which;
    r["cone"] = cone_json(cone);
    r["polar"] = cone_json(dual);
    r["bipolar_matches"] = rays_match(polar(dual).generators(), cone.generators());
    r["verdict"] = "computed";
    return emit(std::move(r), sh);
  } catch (const EvaluationError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const NonsmoothError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const IterationLimitError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace vopt
