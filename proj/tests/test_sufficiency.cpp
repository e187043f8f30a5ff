#include <Eigen/Dense>
#include <cmath>
#include <optional>

#include "doctest.h"
#include "support.hpp"
#include "vopt/certificates.hpp"
#include "vopt/errors.hpp"
#include "vopt/sufficiency.hpp"

using vopt::ConvexityWitness;
using vopt::DifferentiableMap;
using vopt::MultiplierPair;
using vopt::SamplingBudget;
using vopt::SufficiencyVerdict;
using vsup::load_corpus;
using vsup::vec1;
using vsup::vec2;

namespace {

DifferentiableMap scalar_map(std::function<double(double)> h, std::function<double(double)> dh,
                             std::function<double(double)> ddh) {
  DifferentiableMap m;
  m.domain_dim = 1;
  m.range_dim = 1;
  m.value = [h](const Eigen::VectorXd& x) { return vsup::vec1(h(x[0])); };
  m.jacobian = [dh](const Eigen::VectorXd& x) {
    Eigen::MatrixXd j(1, 1);
    j(0, 0) = dh(x[0]);
    return j;
  };
  m.hessians = [ddh](const Eigen::VectorXd& x) {
    Eigen::MatrixXd hm(1, 1);
    hm(0, 0) = ddh(x[0]);
    return std::vector<Eigen::MatrixXd>{hm};
  };
  return m;
}

DifferentiableMap cube_map() {
  return scalar_map([](double t) { return t * t * t; }, [](double t) { return 3.0 * t * t; },
                    [](double t) { return 6.0 * t; });
}

DifferentiableMap square_map() {
  return scalar_map([](double t) { return t * t; }, [](double t) { return 2.0 * t; },
                    [](double) { return 2.0; });
}

DifferentiableMap linear_map() {
  return scalar_map([](double t) { return 2.0 * t; }, [](double) { return 2.0; },
                    [](double) { return 0.0; });
}

DifferentiableMap constant_map() {
  return scalar_map([](double) { return 1.0; }, [](double) { return 0.0; },
                    [](double) { return 0.0; });
}

SamplingBudget budget1d(long pairs, std::uint64_t seed = 0) {
  SamplingBudget b;
  b.pair_count = pairs;
  b.box = {{-2.0, 2.0}};
  b.seed = seed;
  return b;
}

MultiplierPair pair_for(const vopt::VectorProblem& p, const Eigen::VectorXd& xbar) {
  auto pair = vopt::first_order_certificate(p, xbar);
  REQUIRE(pair.has_value());
  return *pair;
}

}  // namespace

TEST_SUITE("sufficiency") {
  TEST_CASE("single-pair clause checks measure both implication sides") {
    const vopt::PolyhedralCone ray = vopt::PolyhedralCone::orthant(1);
    // x^3: f(-1) < f(0) but the linearization at 0 sees no descent.
    const auto bad =
        vopt::pseudoconvex_violation(cube_map(), ray, vec1(0.0), vec1(-1.0), 1e-9);
    REQUIRE(bad.has_value());
    CHECK(bad->violated_clause.find("linearization") != std::string::npos);
    CHECK(!bad->measured.empty());
    // x^2 satisfies the same clause everywhere.
    CHECK(!vopt::pseudoconvex_violation(square_map(), ray, vec1(1.0), vec1(-1.0), 1e-9)
               .has_value());
    CHECK(!vopt::pseudoconvex_violation(square_map(), ray, vec1(0.5), vec1(2.0), 1e-9)
               .has_value());
  }

  TEST_CASE("strict clause rejects flat segments") {
    // Constant map: h(x) <= h(xbar) holds while the gradient term is zero.
    const auto w = vopt::strict_pseudoconvex_violation(constant_map(), vec1(0.0), vec1(1.0));
    REQUIRE(w.has_value());
    // x^2 passes: equal or smaller values only occur strictly inside.
    CHECK(!vopt::strict_pseudoconvex_violation(square_map(), vec1(1.0), vec1(-1.0)).has_value());
    CHECK(!vopt::strict_pseudoconvex_violation(square_map(), vec1(1.0), vec1(0.5)).has_value());
  }

  TEST_CASE("falsifiers do not flag genuinely pseudoconvex maps") {
    const vopt::PolyhedralCone ray = vopt::PolyhedralCone::orthant(1);
    CHECK(!vopt::falsify_pseudoconvex(linear_map(), ray, budget1d(2000)).has_value());
    CHECK(!vopt::falsify_pseudoconvex(square_map(), ray, budget1d(2000)).has_value());
    CHECK(!vopt::falsify_strict_pseudoconvex(square_map(), budget1d(2000)).has_value());
    CHECK(!vopt::falsify_second_order_pseudoconvex(linear_map(), ray, budget1d(2000))
               .has_value());
    CHECK(!vopt::falsify_second_order_strict_pseudoconvex(square_map(), budget1d(2000))
               .has_value());
  }

  TEST_CASE("falsifiers find the cubic inflection via the anchored stream") {
    const vopt::PolyhedralCone ray = vopt::PolyhedralCone::orthant(1);
    const auto w = vopt::falsify_pseudoconvex(cube_map(), ray, budget1d(2000));
    REQUIRE(w.has_value());
    CHECK(w->xbar[0] == doctest::Approx(0.0));  // the box-center anchor
    // The witness re-verifies through the single-pair checker.
    CHECK(vopt::pseudoconvex_violation(cube_map(), ray, w->xbar, w->x, 1e-9).has_value());
  }

  TEST_CASE("constant maps fail the strict falsifier immediately") {
    const auto w = vopt::falsify_strict_pseudoconvex(constant_map(), budget1d(100));
    REQUIRE(w.has_value());
    CHECK(vopt::strict_pseudoconvex_violation(constant_map(), w->xbar, w->x).has_value());
  }

  TEST_CASE("concave quadratic fails the second-order clauses") {
    const vopt::PolyhedralCone ray = vopt::PolyhedralCone::orthant(1);
    const auto neg_square =
        scalar_map([](double t) { return -t * t; }, [](double t) { return -2.0 * t; },
                   [](double) { return -2.0; });
    const auto w = vopt::falsify_second_order_pseudoconvex(neg_square, ray, budget1d(2000));
    REQUIRE(w.has_value());
    CHECK(vopt::second_order_pseudoconvex_violation(neg_square, ray, w->xbar, w->x, 1e-9)
              .has_value());
    const auto ws = vopt::falsify_second_order_strict_pseudoconvex(neg_square, budget1d(2000));
    REQUIRE(ws.has_value());
  }

  TEST_CASE("witness search is deterministic and prefix-monotone") {
    const vopt::PolyhedralCone ray = vopt::PolyhedralCone::orthant(1);
    const auto a = vopt::falsify_pseudoconvex(cube_map(), ray, budget1d(500, 13));
    const auto b = vopt::falsify_pseudoconvex(cube_map(), ray, budget1d(500, 13));
    const auto c = vopt::falsify_pseudoconvex(cube_map(), ray, budget1d(1000, 13));
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    REQUIRE(c.has_value());
    CHECK((a->xbar - b->xbar).norm() == 0.0);
    CHECK((a->x - b->x).norm() == 0.0);
    // Doubling the budget keeps the same (first-in-stream) witness.
    CHECK((a->x - c->x).norm() == 0.0);
  }

  TEST_CASE("first-order global verdict certifies the linear example") {
    const vopt::VectorProblem p = load_corpus("e1.vopt");
    const SufficiencyVerdict v =
        vopt::first_order_global_verdict(p, vec1(0.0), pair_for(p, vec1(0.0)), budget1d(3000));
    CHECK(v.certified);
    CHECK(v.label == "certified (modulo sampling)");
    CHECK(!v.witness.has_value());
    CHECK(v.samples_examined > 0);
  }

  TEST_CASE("first-order global verdict rejects the cubic") {
    const vopt::VectorProblem p = load_corpus("cubic.vopt");
    const SufficiencyVerdict v =
        vopt::first_order_global_verdict(p, vec1(0.0), pair_for(p, vec1(0.0)), budget1d(3000));
    CHECK(!v.certified);
    CHECK(v.label == "hypotheses violated");
    REQUIRE(v.witness.has_value());
  }

  TEST_CASE("verdict hypotheses include the constraint part only when mu is nonzero") {
    // e3 at 0 carries (lambda, mu) = (0, 1); mu.g = x^2 is strictly
    // pseudoconvex, so the verdict passes with the constraint clause active.
    const vopt::VectorProblem p = load_corpus("e3.vopt");
    const SufficiencyVerdict v =
        vopt::first_order_global_verdict(p, vec1(0.0), pair_for(p, vec1(0.0)), budget1d(3000));
    CHECK(v.certified);
  }

  TEST_CASE("precondition failures are reported, not sampled around") {
    const vopt::VectorProblem p = load_corpus("e1.vopt");
    MultiplierPair pair = pair_for(p, vec1(0.0));
    pair.mu[0] = 0.4;  // breaks stationarity
    CHECK_THROWS_AS(
        vopt::first_order_global_verdict(p, vec1(0.0), pair, budget1d(100)),
        vopt::PreconditionError);
    MultiplierPair infeasible = pair_for(p, vec1(0.0));
    CHECK_THROWS_AS(
        vopt::first_order_global_verdict(p, vec1(1.5), infeasible, budget1d(100)),
        vopt::PreconditionError);
  }

  TEST_CASE("second-order global verdict certifies the flat quadratic") {
    const vopt::VectorProblem p = load_corpus("e6.vopt");
    const SufficiencyVerdict v =
        vopt::second_order_global_verdict(p, vec1(0.0), pair_for(p, vec1(0.0)), budget1d(3000));
    CHECK(v.certified);
  }

  TEST_CASE("second-order global verdict rejects the saddle maximum side") {
    const vopt::VectorProblem p = load_corpus("saddle.vopt");
    const SufficiencyVerdict v =
        vopt::second_order_global_verdict(p, vec1(1.0), pair_for(p, vec1(1.0)), budget1d(3000));
    CHECK(!v.certified);
    REQUIRE(v.witness.has_value());
  }

  TEST_CASE("isolated first-order check certifies the kink") {
    const vopt::VectorProblem p = load_corpus("absval.vopt");
    const vopt::IsolatedVerdict v = vopt::isolated_first_order_check(
        p, vec1(0.0), vec1(1.0), vec1(0.0), budget1d(400), {}, 16, 0.5);
    CHECK(v.certified);
    CHECK(v.direction_minimum == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(v.epsilon == doctest::Approx(1.0).epsilon(0.05));
    CHECK(v.direction_count >= 2);
    CHECK(v.neighborhood_samples > 0);
  }

  TEST_CASE("isolated first-order check fails when slopes cancel") {
    const vopt::VectorProblem p = load_corpus("e1.vopt");
    const MultiplierPair pair = pair_for(p, vec1(0.0));
    const vopt::IsolatedVerdict v = vopt::isolated_first_order_check(
        p, vec1(0.0), pair.lambda, pair.mu, budget1d(400), {}, 16, 0.5);
    CHECK(!v.certified);
    CHECK(v.direction_minimum <= 1e-4);
  }

  TEST_CASE("isolated second-order check certifies strict curvature") {
    const vopt::VectorProblem p = load_corpus("e6.vopt");
    const vopt::IsolatedVerdict v = vopt::isolated_second_order_check(
        p, vec1(0.0), vec1(1.0), vec1(0.0), {vec1(1.0), vec1(-1.0)}, budget1d(400), 0.5);
    CHECK(v.certified);
    CHECK(v.direction_minimum == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(v.epsilon == doctest::Approx(1.0).epsilon(0.05));
  }

  TEST_CASE("isolated second-order check rejects flat quartic growth") {
    const vopt::VectorProblem p = vopt::parse_problem(
        "vars x\nobjective [x^4]\nconstraint [-1]\nconeC orthant(1)\nconeK orthant(1)\n"
        "box [[-2, 2]]\n");
    const vopt::IsolatedVerdict v = vopt::isolated_second_order_check(
        p, vec1(0.0), vec1(1.0), vec1(0.0), {vec1(1.0), vec1(-1.0)}, budget1d(400), 0.5);
    CHECK(!v.certified);
    CHECK(v.direction_minimum == doctest::Approx(0.0));
  }

  TEST_CASE("isolated checks validate the multiplier pair") {
    const vopt::VectorProblem p = load_corpus("e6.vopt");
    // mu.g != 0 breaks complementary slackness (g = -1 at every point).
    CHECK_THROWS_AS(vopt::isolated_second_order_check(p, vec1(0.0), vec1(1.0), vec1(0.5),
                                                      {vec1(1.0)}, budget1d(50), 0.5),
                    vopt::PreconditionError);
    // A non-critical direction is rejected.
    const vopt::VectorProblem e1 = load_corpus("e1.vopt");
    CHECK_THROWS_AS(vopt::isolated_second_order_check(e1, vec1(0.0), vec1(0.5), vec1(0.5),
                                                      {vec1(1.0)}, budget1d(50), 0.5),
                    vopt::DirectionError);
  }

  TEST_CASE("empty direction set certifies vacuously") {
    const vopt::VectorProblem p = load_corpus("e1.vopt");
    const vopt::IsolatedVerdict v = vopt::isolated_second_order_check(
        p, vec1(0.0), vec1(0.5), vec1(0.5), {}, budget1d(50), 0.5);
    CHECK(v.certified);
    CHECK(v.direction_count == 0);
    CHECK(std::isinf(v.direction_minimum));
  }

  TEST_CASE("problem maps expose values and derivatives consistently") {
    const vopt::VectorProblem p = load_corpus("e2.vopt");
    const DifferentiableMap f = vopt::objective_map(p);
    CHECK(f.range_dim == 2);
    CHECK(f.value(vec2(0.25, 0.5))[0] == doctest::Approx(0.25));
    CHECK(f.jacobian(vec2(0.25, 0.5))(1, 1) == doctest::Approx(1.0));
    const DifferentiableMap g = vopt::constraint_map(p);
    CHECK(g.value(vec2(0.25, 0.5))[0] == doctest::Approx(0.25));
    const DifferentiableMap w = vopt::weighted_map(f, vec2(2.0, 3.0));
    CHECK(w.range_dim == 1);
    CHECK(w.value(vec2(0.25, 0.5))[0] == doctest::Approx(2.0));
    CHECK(w.jacobian(vec2(0.25, 0.5))(0, 0) == doctest::Approx(2.0));
  }
}
