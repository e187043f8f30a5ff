// Acceptance gate: ten end-to-end criteria, one pass/fail line each.
// Exits nonzero when any criterion fails. All randomness is seeded, so two
// invocations produce identical output.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "vopt/certificates.hpp"
#include "vopt/cone.hpp"
#include "vopt/derivatives.hpp"
#include "vopt/errors.hpp"
#include "vopt/oracle.hpp"
#include "vopt/parser.hpp"
#include "vopt/problem.hpp"
#include "vopt/rng.hpp"
#include "vopt/sufficiency.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Failure {
  std::string detail;
};

std::vector<std::string> g_notes;

void note(const std::string& s) { g_notes.push_back(s); }

#define ACCEPT_REQUIRE(cond, msg)                     \
  do {                                                \
    if (!(cond)) throw Failure{std::string(msg)};     \
  } while (0)

// 1. polar(polar(C)) reproduces C on random pointed full-dimensional cones
// in R^2 and R^3, within the documented runtime budget.
void criterion_bipolar() {
  const auto start = Clock::now();
  vopt::Rng rng(101);
  int done = 0;
  for (int dim = 2; dim <= 3; ++dim) {
    for (int trial = 0; trial < 25; ++trial) {
      const vopt::PolyhedralCone c = vsup::random_cone(rng, dim);
      const vopt::PolyhedralCone pp = vopt::polar(vopt::polar(c));
      ACCEPT_REQUIRE(vopt::rays_match(pp.generators(), c.generators(), 1e-9),
                     "bipolar generators diverge (dim " + std::to_string(dim) + ")");
      ACCEPT_REQUIRE(vopt::rays_match(pp.halfspace_normals(), c.halfspace_normals(), 1e-9),
                     "bipolar halfspaces diverge (dim " + std::to_string(dim) + ")");
      ++done;
    }
  }
  const double elapsed = seconds_since(start);
  ACCEPT_REQUIRE(done == 50, "wrong cone count");
  ACCEPT_REQUIRE(elapsed < 5.0, "runtime " + std::to_string(elapsed) + "s exceeds 5s");
  note("50 cones in " + std::to_string(elapsed) + "s");
}

// 2. interior_contains agrees exactly with strict positivity against the
// polar extreme rays on 1000 random (cone, point) pairs.
void criterion_interior_agreement() {
  vopt::Rng rng(102);
  for (int trial = 0; trial < 1000; ++trial) {
    const int dim = 2 + (trial % 2);
    const vopt::PolyhedralCone c = vsup::random_cone(rng, dim);
    const vopt::PolyhedralCone p = vopt::polar(c);
    // Mix of nearby and far points, both signs.
    const Eigen::VectorXd x = rng.uniform(0.1, 3.0) * rng.unit_vector(dim);
    bool strict = true;
    for (const Eigen::VectorXd& r : p.generators())
      strict = strict && r.dot(x) > vopt::kMembershipTol;
    ACCEPT_REQUIRE(c.interior_contains(x) == strict, "disagreement at trial " +
                                                         std::to_string(trial));
  }
}

// 3. The necessary-condition pipeline accepts every oracle-verified
// minimizer of the smooth corpus with residuals within tolerance and refutes
// the planted non-minimizers at the documented stage.
void criterion_corpus_soundness() {
  const auto start = Clock::now();
  int problems = 0;
  for (const vsup::CorpusEntry& entry : vsup::corpus_table()) {
    if (!entry.smooth) continue;
    ++problems;
    const vopt::VectorProblem p = vsup::load_corpus(entry.file);
    for (const Eigen::VectorXd& xbar : entry.minimizers) {
      vopt::ScanGrid grid;
      grid.radius = entry.radius;
      const vopt::OracleResult oracle = vopt::weak_local_min_oracle(p, xbar, grid);
      ACCEPT_REQUIRE(oracle.weak_local_min,
                     std::string(entry.file) + ": oracle rejects the tabled minimizer");
      const vopt::CandidateCheck check = vopt::check_candidate(p, xbar);
      ACCEPT_REQUIRE(check.verdict == vopt::CandidateCheck::Verdict::kConsistent,
                     std::string(entry.file) + ": pipeline refutes a verified minimizer");
      ACCEPT_REQUIRE(check.first_order->stationarity_residual <= 1e-8,
                     std::string(entry.file) + ": stationarity residual above 1e-8");
      ACCEPT_REQUIRE(check.first_order->slackness_residual <= 1e-8,
                     std::string(entry.file) + ": slackness residual above 1e-8");
    }
  }
  ACCEPT_REQUIRE(problems >= 10, "smooth corpus smaller than 10 problems");

  const vopt::VectorProblem e1 = vsup::load_corpus("e1.vopt");
  const vopt::CandidateCheck first = vopt::check_candidate(e1, vsup::vec1(1.0));
  ACCEPT_REQUIRE(first.verdict == vopt::CandidateCheck::Verdict::kRefutedFirstOrder,
                 "non-minimizer of the linear problem not refuted at first order");

  const vopt::VectorProblem saddle = vsup::load_corpus("saddle.vopt");
  const vopt::CandidateCheck second = vopt::check_candidate(saddle, vsup::vec1(0.0));
  ACCEPT_REQUIRE(second.verdict == vopt::CandidateCheck::Verdict::kRefutedSecondOrder,
                 "saddle origin not refuted at second order");

  const double elapsed = seconds_since(start);
  ACCEPT_REQUIRE(elapsed < 30.0, "runtime " + std::to_string(elapsed) + "s exceeds 30s");
  note(std::to_string(problems) + " smooth problems in " + std::to_string(elapsed) + "s");
}

// 4. Exact second-order multipliers: the flat quadratic keeps (1, 0) over
// directions {+1, -1}; the saddle admits no pair over the same directions.
void criterion_second_order_values() {
  const vopt::VectorProblem e6 = vsup::load_corpus("e6.vopt");
  const std::vector<Eigen::VectorXd> dirs = {vsup::vec1(1.0), vsup::vec1(-1.0)};
  const auto pair = vopt::second_order_certificate(e6, vsup::vec1(0.0), dirs);
  ACCEPT_REQUIRE(pair.has_value(), "no pair at the flat quadratic");
  ACCEPT_REQUIRE(std::abs(pair->lambda[0] - 1.0) <= 1e-9, "lambda != 1");
  ACCEPT_REQUIRE(std::abs(pair->mu[0]) <= 1e-9, "mu != 0");

  const vopt::VectorProblem saddle = vsup::load_corpus("saddle.vopt");
  const auto none = vopt::second_order_certificate(saddle, vsup::vec1(0.0), dirs);
  ACCEPT_REQUIRE(!none.has_value(), "saddle unexpectedly carries a pair");
}

// 5. The scalarization gap vanishes at each minimizer and stays above -1e-9
// over 10^4 sampled points in its verified neighborhood.
void criterion_gap_nonnegative() {
  for (const vsup::CorpusEntry& entry : vsup::corpus_table()) {
    const vopt::VectorProblem p = vsup::load_corpus(entry.file);
    for (const Eigen::VectorXd& xbar : entry.minimizers) {
      const double at_self = vopt::scalarized_gap(p, xbar, xbar);
      ACCEPT_REQUIRE(std::abs(at_self) <= 1e-12,
                     std::string(entry.file) + ": gap at the candidate is " +
                         std::to_string(at_self));
      vopt::Rng rng(105);
      std::vector<std::pair<double, double>> ball(p.variable_count());
      for (int i = 0; i < p.variable_count(); ++i) {
        double lo = xbar[i] - entry.radius, hi = xbar[i] + entry.radius;
        if (p.domain()) {
          lo = std::max(lo, (*p.domain())[i].lo);
          hi = std::min(hi, (*p.domain())[i].hi);
        }
        ball[i] = {lo, hi};
      }
      for (int k = 0; k < 10000; ++k) {
        const Eigen::VectorXd x = rng.box_point(ball);
        const double gap = vopt::scalarized_gap(p, xbar, x);
        ACCEPT_REQUIRE(gap >= -1e-9, std::string(entry.file) + ": negative gap " +
                                         std::to_string(gap));
      }
    }
  }
}

// 6. Derivative estimators against closed forms, the Hadamard/Dini ordering
// on random smooth functions, and the curvature probe.
void criterion_derivative_battery() {
  using vopt::dini_lower;
  const auto near = [](double a, double b) { return std::abs(a - b) <= 1e-3; };
  const vopt::ScalarFn square = [](const Eigen::VectorXd& z) { return z.squaredNorm(); };
  const vopt::ScalarFn norm = [](const Eigen::VectorXd& z) { return z.norm(); };
  const vopt::ScalarFn absv = [](const Eigen::VectorXd& z) { return std::abs(z[0]); };
  const vopt::ScalarFn negabs = [](const Eigen::VectorXd& z) { return -std::abs(z[0]); };
  const vopt::ScalarFn linear = [](const Eigen::VectorXd& z) {
    return 3.0 * z[0] - 2.0 * z[1];
  };

  ACCEPT_REQUIRE(near(dini_lower(square, vsup::vec1(1.0), vsup::vec1(1.0)).value, 2.0),
                 "d(x^2) at 1");
  ACCEPT_REQUIRE(near(dini_lower(square, vsup::vec1(0.0), vsup::vec1(1.0)).value, 0.0),
                 "d(x^2) at 0");
  ACCEPT_REQUIRE(near(dini_lower(absv, vsup::vec1(0.0), vsup::vec1(1.0)).value, 1.0),
                 "d|x| along +1");
  ACCEPT_REQUIRE(near(dini_lower(absv, vsup::vec1(0.0), vsup::vec1(-1.0)).value, 1.0),
                 "d|x| along -1");
  ACCEPT_REQUIRE(near(dini_lower(negabs, vsup::vec1(0.0), vsup::vec1(1.0)).value, -1.0),
                 "d(-|x|)");
  ACCEPT_REQUIRE(
      near(dini_lower(norm, vsup::vec2(0.0, 0.0), vsup::vec2(0.6, 0.8)).value, 1.0),
      "d||x|| at 0");
  ACCEPT_REQUIRE(
      near(dini_lower(linear, vsup::vec2(1.0, 1.0), vsup::vec2(0.6, 0.8)).value, 0.2),
      "linear directional derivative");

  vopt::Rng rng(106);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 1 + static_cast<int>(rng.uniform() * 3.0);
    Eigen::MatrixXd q(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) q(i, j) = rng.uniform(-1.0, 1.0);
    const Eigen::MatrixXd sym = 0.5 * (q + q.transpose());
    Eigen::VectorXd lin(dim);
    for (int i = 0; i < dim; ++i) lin[i] = rng.uniform(-1.0, 1.0);
    const double freq = rng.uniform(0.5, 2.0);
    const vopt::ScalarFn h = [sym, lin, freq](const Eigen::VectorXd& z) {
      return z.dot(sym * z) + lin.dot(z) + std::sin(freq * z.sum());
    };
    const Eigen::VectorXd x = rng.unit_vector(dim);
    const Eigen::VectorXd u = rng.unit_vector(dim);
    const double dini = vopt::dini_lower(h, x, u).value;
    const double hada = vopt::hadamard_lower(h, x, u).value;
    ACCEPT_REQUIRE(hada <= dini + 1e-9, "Hadamard exceeds Dini at trial " +
                                            std::to_string(trial));
  }

  const double curvature =
      vopt::hadamard_second_lower(square, vsup::vec1(0.0), vsup::vec1(0.0), vsup::vec1(1.0))
          .value;
  ACCEPT_REQUIRE(std::abs(curvature - 2.0) <= 1e-2,
                 "second-order probe " + std::to_string(curvature));
}

// 7. Sampling sufficiency certifies the two global examples, a wide random
// scan finds no dominator there, and the cubic yields a pseudoconvexity
// counterexample.
void criterion_sufficiency() {
  vopt::SamplingBudget budget;
  budget.pair_count = 10000;
  budget.seed = 107;

  const vopt::VectorProblem e1 = vsup::load_corpus("e1.vopt");
  budget.box = {{-2.0, 2.0}};
  const auto pair1 = vopt::first_order_certificate(e1, vsup::vec1(0.0));
  ACCEPT_REQUIRE(pair1.has_value(), "no first-order pair at the linear example");
  const vopt::SufficiencyVerdict v1 =
      vopt::first_order_global_verdict(e1, vsup::vec1(0.0), *pair1, budget);
  ACCEPT_REQUIRE(v1.certified, "linear example not certified: " + v1.detail);
  const vopt::OracleResult s1 =
      vopt::weak_global_scan(e1, vsup::vec1(0.0), {{-2.0, 2.0}}, 100000, 107);
  ACCEPT_REQUIRE(s1.weak_local_min, "global scan found a dominator for the linear example");

  const vopt::VectorProblem e2 = vsup::load_corpus("e2.vopt");
  budget.box = {{-2.0, 2.0}, {-2.0, 2.0}};
  const auto pair2 = vopt::first_order_certificate(e2, vsup::vec2(0.5, 0.5));
  ACCEPT_REQUIRE(pair2.has_value(), "no first-order pair at the bi-objective example");
  const vopt::SufficiencyVerdict v2 =
      vopt::first_order_global_verdict(e2, vsup::vec2(0.5, 0.5), *pair2, budget);
  ACCEPT_REQUIRE(v2.certified, "bi-objective example not certified: " + v2.detail);
  const vopt::OracleResult s2 = vopt::weak_global_scan(
      e2, vsup::vec2(0.5, 0.5), {{-2.0, 2.0}, {-2.0, 2.0}}, 100000, 107);
  ACCEPT_REQUIRE(s2.weak_local_min,
                 "global scan found a dominator for the bi-objective example");

  const vopt::VectorProblem cubic = vsup::load_corpus("cubic.vopt");
  budget.box = {{-2.0, 2.0}};
  const auto cube_witness = vopt::falsify_pseudoconvex(
      vopt::objective_map(cubic), cubic.cone_c(), budget);
  ACCEPT_REQUIRE(cube_witness.has_value(), "cubic pseudoconvexity not falsified");
  const auto reverify =
      vopt::pseudoconvex_violation(vopt::objective_map(cubic), cubic.cone_c(),
                                   cube_witness->xbar, cube_witness->x, 1e-9);
  ACCEPT_REQUIRE(reverify.has_value(), "cubic witness fails re-verification");
}

// 8. Isolated-minimum checks: quadratic growth at the flat quadratic with
// epsilon at least 0.4 on the half-unit neighborhood, and linear growth at
// the kink with direction minimum at least 0.99.
void criterion_isolated() {
  vopt::SamplingBudget budget;
  budget.pair_count = 2000;
  budget.box = {{-2.0, 2.0}};
  budget.seed = 108;

  const vopt::VectorProblem e6 = vsup::load_corpus("e6.vopt");
  const vopt::IsolatedVerdict second = vopt::isolated_second_order_check(
      e6, vsup::vec1(0.0), vsup::vec1(1.0), vsup::vec1(0.0),
      {vsup::vec1(1.0), vsup::vec1(-1.0)}, budget, 0.5);
  ACCEPT_REQUIRE(second.certified, "flat quadratic not certified isolated");
  ACCEPT_REQUIRE(second.epsilon >= 0.4, "quadratic growth constant " +
                                            std::to_string(second.epsilon) + " below 0.4");

  const vopt::VectorProblem absval = vsup::load_corpus("absval.vopt");
  const vopt::IsolatedVerdict first = vopt::isolated_first_order_check(
      absval, vsup::vec1(0.0), vsup::vec1(1.0), vsup::vec1(0.0), budget, {}, 32, 0.5);
  ACCEPT_REQUIRE(first.certified, "kink not certified isolated");
  ACCEPT_REQUIRE(first.direction_minimum >= 0.99,
                 "direction minimum " + std::to_string(first.direction_minimum));
}

// 9. Canonical serialization round-trips the corpus, and token deletion
// never escapes the structured error hierarchy.
void criterion_parser_robustness() {
  for (const vsup::CorpusEntry& entry : vsup::corpus_table()) {
    const std::string source = vsup::read_file(vsup::corpus_path(entry.file));
    const std::string once = vopt::serialize_problem(vopt::parse_problem(source));
    const std::string twice = vopt::serialize_problem(vopt::parse_problem(once));
    ACCEPT_REQUIRE(once == twice, std::string(entry.file) + ": round trip drifts");
  }

  vopt::Rng rng(109);
  const auto& table = vsup::corpus_table();
  long structured = 0, parsed = 0;
  for (int iter = 0; iter < 1000; ++iter) {
    const vsup::CorpusEntry& entry = table[iter % table.size()];
    const auto lines = vsup::tokenize_lines(vsup::read_file(vsup::corpus_path(entry.file)));
    const long tokens = vsup::token_count(lines);
    const long victim = static_cast<long>(rng.uniform() * static_cast<double>(tokens));
    const std::string mutated = vsup::delete_token(lines, victim);
    try {
      vopt::parse_problem(mutated);
      ++parsed;
    } catch (const vopt::Error&) {
      ++structured;
    } catch (...) {
      throw Failure{"unstructured exception at iteration " + std::to_string(iter)};
    }
  }
  ACCEPT_REQUIRE(parsed + structured == 1000, "fuzz iteration count mismatch");
  note(std::to_string(structured) + " rejections, " + std::to_string(parsed) +
       " still parseable");
}

// 10. Determinism: the full battery of report-producing invocations yields
// byte-identical output when run twice with the same seeds.
std::string run_battery() {
  const std::vector<std::vector<std::string>> invocations = {
      {"check", vsup::corpus_path("e1.vopt"), "--point", "0", "--no-meta"},
      {"check", vsup::corpus_path("e2.vopt"), "--point", "0.5,0.5", "--no-meta"},
      {"check", vsup::corpus_path("e1.vopt"), "--point", "1", "--no-meta"},
      {"check2", vsup::corpus_path("saddle.vopt"), "--point", "0", "--seed", "3", "--no-meta"},
      {"check2", vsup::corpus_path("e6.vopt"), "--point", "0", "--seed", "3", "--no-meta"},
      {"check2", vsup::corpus_path("quad2d.vopt"), "--point", "1,0", "--seed", "3",
       "--no-meta"},
      {"scan", vsup::corpus_path("saddle.vopt"), "--point", "0", "--radius", "0.6",
       "--no-meta"},
      {"scan", vsup::corpus_path("e1.vopt"), "--point", "0", "--random", "--count", "2000",
       "--seed", "3", "--no-meta"},
      {"sufficiency", vsup::corpus_path("e1.vopt"), "--point", "0", "--pairs", "2000",
       "--seed", "3", "--no-meta"},
      {"sufficiency", vsup::corpus_path("cubic.vopt"), "--point", "0", "--pairs", "2000",
       "--seed", "3", "--no-meta"},
      {"sufficiency", vsup::corpus_path("e6.vopt"), "--point", "0", "--order", "2", "--pairs",
       "2000", "--seed", "3", "--no-meta"},
      {"isolated", vsup::corpus_path("absval.vopt"), "--point", "0", "--order", "1",
       "--lambda", "1", "--mu", "0", "--pairs", "500", "--dirs", "16", "--seed", "3",
       "--no-meta"},
      {"isolated", vsup::corpus_path("e6.vopt"), "--point", "0", "--order", "2", "--lambda",
       "1", "--mu", "0", "--pairs", "500", "--seed", "3", "--no-meta"},
      {"deriv", vsup::corpus_path("absval.vopt"), "--kind", "dini", "--point", "0",
       "--direction", "1", "--no-meta"},
      {"deriv", vsup::corpus_path("e6.vopt"), "--kind", "hadamard2", "--point", "0",
       "--direction", "1", "--no-meta"},
      {"deriv", vsup::corpus_path("e1.vopt"), "--kind", "gap", "--point", "0", "--x", "0.5",
       "--no-meta"},
      {"polar", vsup::corpus_path("gencone.vopt"), "--cone", "C", "--no-meta"},
      {"polar", vsup::corpus_path("e2.vopt"), "--cone", "K", "--no-meta"},
  };
  std::string all;
  for (const auto& argv : invocations) {
    const vsup::CliCapture cap = vsup::run_cli(argv);
    ACCEPT_REQUIRE(cap.code == 0, "battery invocation failed: " + argv[0] + " " + argv[1] +
                                      " -> exit " + std::to_string(cap.code) + "\n" + cap.err);
    all += cap.out;
    all += '\x1e';  // record separator between reports
  }
  return all;
}

void criterion_determinism() {
  const std::string first = run_battery();
  const std::string second = run_battery();
  ACCEPT_REQUIRE(first == second, "battery output differs between runs");
  ACCEPT_REQUIRE(first.size() > 1000, "battery produced suspiciously little output");
  note(std::to_string(first.size()) + " bytes, twice");
}

struct Criterion {
  const char* name;
  std::function<void()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"bipolar identity on random cones", criterion_bipolar},
      {"interior test agrees with polar-ray positivity", criterion_interior_agreement},
      {"necessary-condition soundness on the corpus", criterion_corpus_soundness},
      {"exact second-order multiplier values", criterion_second_order_values},
      {"scalarization gap nonnegative near minimizers", criterion_gap_nonnegative},
      {"directional derivative battery", criterion_derivative_battery},
      {"sampling sufficiency certificates and counterexample", criterion_sufficiency},
      {"isolated-minimum growth checks", criterion_isolated},
      {"parser round trip and token-deletion fuzz", criterion_parser_robustness},
      {"byte-identical reports across repeated runs", criterion_determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    g_notes.clear();
    std::string verdict = "PASS", detail;
    try {
      criteria[i].run();
    } catch (const Failure& f) {
      verdict = "FAIL";
      detail = f.detail;
      ++failures;
    } catch (const std::exception& e) {
      verdict = "FAIL";
      detail = std::string("unexpected exception: ") + e.what();
      ++failures;
    }
    std::cout << "[" << verdict << "] " << (i + 1) << ". " << criteria[i].name;
    for (const std::string& n : g_notes) std::cout << " (" << n << ")";
    if (!detail.empty()) std::cout << " -- " << detail;
    std::cout << "\n";
  }
  if (failures > 0) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria passed\n";
  return 0;
}
