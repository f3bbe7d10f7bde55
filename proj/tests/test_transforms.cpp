#include <gtest/gtest.h>

#include <random>

#include "builders.hpp"
#include "ontopt/errors.hpp"
#include "ontopt/solvers.hpp"
#include "ontopt/transforms.hpp"
#include "oracles.hpp"

using namespace ontopt;
using build::C;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<long>(v.size()));
  long i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Constraint soc(const Mat& a, const Vec& b, const Vec& c, double d, const VarSlot& x) {
  return {Expr::norm2(a, b, {Expr::var(x)}), Relation::kInCone,
          Expr::add(Expr::dot(c, {Expr::var(x)}), C(d)), Cone::kSecondOrder};
}

// min x₁ + x₂ s.t. x₁⁻¹x₂⁻¹ ≤ 1, x > 0
Problem gp_example() {
  Problem p;
  const VarSlot x = p.add_variable({"x", VarKind::kVector, 2, VarDomain::kStrictlyPositive});
  p.objective = Expr::add(Expr::element(x, 0), Expr::element(x, 1));
  p.constraints.push_back(build::le(Expr::monomial(1, vec({-1, -1}), {Expr::var(x)}), C(1)));
  return p;
}

// Rejection-sampled feasible points of p in [lo, hi]^n.
std::vector<Vec> feasible_points(const Problem& p, int count, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Vec> out;
  for (int tries = 0; tries < 200000 && static_cast<int>(out.size()) < count; ++tries) {
    const Vec x = build::uniform(rng, p.dimension(), lo, hi);
    if (is_feasible(p, x, 0.0)) out.push_back(x);
  }
  return out;
}

void expect_maps_preserve_feasibility(const TransformResult& r, const Problem& src, double lo, double hi) {
  ASSERT_TRUE(r.forward && r.backward);
  const auto pts = feasible_points(src, 100, lo, hi, 99);
  ASSERT_EQ(pts.size(), 100u);
  for (const Vec& x : pts) {
    const Vec y = r.forward->apply(x);
    EXPECT_LE(max_violation(r.transformed, y), 1e-9);
    const Vec back = r.backward->apply(y);
    EXPECT_LE((back - x).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(max_violation(src, back), 1e-9);
    if (r.value_map.comparable) {
      const double mapped = r.value_map.apply(eval(r.transformed.objective, y, r.transformed.param_map()));
      const double direct = eval(src.objective, x, src.param_map());
      EXPECT_NEAR(mapped, direct, 1e-9 * std::max(1.0, std::abs(direct)));
    }
  }
}

}  // namespace

TEST(EqToIneq, SingleEqualityBecomesPair) {
  Problem p;
  const VarSlot x = p.add_variable({"x", VarKind::kVector, 2, VarDomain::kFree});
  p.objective = Expr::dot(vec({1, 0}), {Expr::var(x)});
  p.constraints.push_back(build::eq(Expr::dot(vec({1, 1}), {Expr::var(x)}), C(1)));
  const TransformResult r = eq_to_ineq_pair(p);
  EXPECT_EQ(r.rule, "eq2ineq");
  ASSERT_EQ(r.transformed.constraints.size(), 2u);
  for (const Constraint& c : r.transformed.constraints) EXPECT_EQ(c.relation, Relation::kLe);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 100; ++k) {
    const double t = build::uniform(rng, 1, -5, 5)(0);
    const Vec on = vec({t, 1 - t});
    const Vec off = vec({t, 1.01 - t});
    EXPECT_TRUE(is_feasible(r.transformed, on, 1e-12));
    EXPECT_FALSE(is_feasible(r.transformed, off, 1e-6));
  }
}

TEST(EqToIneq, NoEqualitiesIsIdentity) {
  const Problem p = build::lp(Mat::Identity(2, 2), Vec::Ones(2), Vec::Ones(2));
  EXPECT_EQ(serialize_problem(eq_to_ineq_pair(p).transformed), serialize_problem(p));
}

TEST(EqToIneq, CountsAndNeverDowngradesConvexity) {
  Problem p = build::lp(Mat::Identity(3, 3), Vec::Ones(3), Vec::Ones(3));
  const VarSlot x = *p.slot("x");
  p.constraints.push_back(build::eq(Expr::dot(vec({1, 1, 0}), {Expr::var(x)}), C(1)));
  p.constraints.push_back(build::eq(Expr::dot(vec({0, 1, 1}), {Expr::var(x)}), C(0)));
  const TransformResult r = eq_to_ineq_pair(p);
  EXPECT_EQ(r.transformed.constraints.size(), 7u);
  EXPECT_EQ(classify(r.transformed).convexity, Convexity::kConvex);
  EXPECT_EQ(classify(r.transformed).problem_class, ProblemClass::kLP);
  expect_maps_preserve_feasibility(eq_to_ineq_pair(load_problem(std::string(ONTOPT_TEST_DATA) + "/qcqp.optproblem.json")),
                                   load_problem(std::string(ONTOPT_TEST_DATA) + "/qcqp.optproblem.json"), -3, 3);
}

TEST(SocpToLp, ZeroConeBecomesNonnegativeBound) {
  Problem p;
  const VarSlot x = p.add_variable({"x", VarKind::kVector, 2, VarDomain::kFree});
  p.objective = Expr::dot(vec({1, 1}), {Expr::var(x)});
  p.constraints.push_back(soc(Mat::Zero(2, 2), Vec::Zero(2), vec({1, 0}), 0, x));
  p.constraints.push_back(soc(Mat::Zero(2, 2), Vec::Zero(2), vec({0, 1}), 0, x));
  const TransformResult r = socp_to_lp(p);
  EXPECT_EQ(r.certificate, "Proposition 1");
  EXPECT_EQ(classify(r.transformed).problem_class, ProblemClass::kLP);
  const Constraint& c = r.transformed.constraints[0];
  EXPECT_EQ(eval(c.lhs, Vec::Zero(2)), 0.0);
  EXPECT_EQ(c.relation, Relation::kLe);
  const Solution s = solve_simplex(r.transformed);
  EXPECT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_NEAR(s.value, 0.0, 1e-9);
  expect_maps_preserve_feasibility(r, p, -3, 3);
}

TEST(SocpToLp, OffsetNormBecomesFive) {
  Problem p;
  const VarSlot x = p.add_variable({"x", VarKind::kVector, 2, VarDomain::kNonnegative});
  p.objective = Expr::dot(vec({1, 2}), {Expr::var(x)});
  p.constraints.push_back(soc(Mat::Zero(2, 2), vec({3, 4}), vec({1, 1}), 0, x));
  const TransformResult r = socp_to_lp(p);
  EXPECT_DOUBLE_EQ(eval(r.transformed.constraints[0].lhs, Vec::Zero(2)), 5.0);
  // min x₁ + 2x₂ s.t. x₁ + x₂ ≥ 5, x ≥ 0 → 5 at (5, 0)
  const Solution s = solve_simplex(r.transformed);
  EXPECT_NEAR(s.value, 5.0, 1e-9);
  const Solution g = solve_grid_oracle(p, {Vec::Zero(2), Vec::Constant(2, 6), 0.05});
  EXPECT_NEAR(g.value, s.value, 1e-6);
  expect_maps_preserve_feasibility(r, p, 0, 6);
}

TEST(SocpToLp, NonzeroMatrixIsNotReducible) {
  Problem p;
  const VarSlot x = p.add_variable({"x", VarKind::kVector, 2, VarDomain::kFree});
  p.objective = Expr::dot(vec({1, 1}), {Expr::var(x)});
  p.constraints.push_back(soc(Mat::Identity(2, 2), Vec::Zero(2), vec({1, 0}), 1, x));
  try {
    socp_to_lp(p);
    FAIL() << "expected NotReducible";
  } catch (const InapplicableError& e) {
    EXPECT_EQ(e.kind(), "NotReducible");
    EXPECT_NE(std::string(e.what()).find("cone constraint 1"), std::string::npos);
  }
}

TEST(GpLog, ExampleOptimumTwoAtOrigin) {
  const Problem p = gp_example();
  const TransformResult r = gp_log_transform(p);
  EXPECT_EQ(r.certificate, "Lemma 4");
  const Classification c = classify(r.transformed);
  EXPECT_EQ(c.convexity, Convexity::kConvex);
  EXPECT_EQ(eval(r.transformed.objective, Vec::Zero(2)), 2.0);
  EXPECT_TRUE(is_feasible(r.transformed, Vec::Zero(2), 0.0));
  // the affine constraint reads −y₁ − y₂ ≤ 0
  EXPECT_DOUBLE_EQ(eval(r.transformed.constraints[0].lhs, vec({0.5, 0.25})), -0.75);
  const oracle::GridAnswer x_space = oracle::grid_min(
      [&](const Vec& x) { return eval(p.objective, x); }, [&](const Vec& x) { return is_feasible(p, x, 1e-9); },
      Vec::Constant(2, 0.1), Vec::Constant(2, 10), 0.01);
  ASSERT_TRUE(x_space.found);
  EXPECT_NEAR(x_space.value, 2.0, 0.05);
  const Solution y_space =
      solve_grid_oracle(r.transformed, {Vec::Constant(2, -2), Vec::Constant(2, 2), 0.01});
  EXPECT_NEAR(y_space.value, 2.0, 1e-9);
  EXPECT_NEAR(r.backward->apply(*y_space.point)(0), 1.0, 1e-9);
  expect_maps_preserve_feasibility(r, p, 0.05, 5);
}

TEST(GpLog, MonomialEqualityBecomesAffine) {
  Problem p = gp_example();
  const VarSlot x = *p.slot("x");
  p.constraints.push_back(build::eq(Expr::monomial(1, vec({1, 1}), {Expr::var(x)}), C(1)));
  const TransformResult r = gp_log_transform(p);
  const Constraint& e = r.transformed.constraints.back();
  EXPECT_EQ(e.relation, Relation::kEq);
  EXPECT_TRUE(curvature(e.lhs).is_affine());
  EXPECT_NEAR(eval(e.lhs, vec({0.3, -0.3})), 0.0, 1e-15);
  EXPECT_NEAR(eval(e.lhs, vec({0.5, 0.25})), 0.75, 1e-15);
}

TEST(GpLog, NegativeObjectiveTermIsNotGp) {
  Problem p = gp_example();
  const VarSlot x = *p.slot("x");
  p.objective = Expr::add(p.objective, Expr::neg(Expr::element(x, 0)));
  try {
    gp_log_transform(p);
    FAIL() << "expected NotGP";
  } catch (const InapplicableError& e) {
    EXPECT_EQ(e.kind(), "NotGP");
  }
}

TEST(LpDual, OneByOneSymmetricPair) {
  const Problem p = build::lp(Mat::Ones(1, 1), Vec::Ones(1), Vec::Ones(1), Sense::kMaximize, VarDomain::kNonnegative);
  const TransformResult r = lp_dual(p);
  EXPECT_EQ(r.rule, "dual");
  EXPECT_EQ(r.transformed.sense, Sense::kMinimize);
  ASSERT_EQ(r.transformed.constraints.size(), 1u);
  EXPECT_EQ(r.transformed.constraints[0].relation, Relation::kGe);
  const Solution primal = solve_simplex(p);
  const Solution dual = solve_simplex(r.transformed);
  EXPECT_NEAR(primal.value, 1.0, 1e-9);
  EXPECT_NEAR(dual.value, 1.0, 1e-9);
  // oracle: max x ⇔ min −x over x ≤ 1, −x ≤ 0; dual min y over −y ≤ −1, −y ≤ 0
  const auto po = oracle::vertex_enumeration((Mat(2, 1) << 1, -1).finished(), vec({1, 0}), vec({-1}));
  const auto dor = oracle::vertex_enumeration((Mat(2, 1) << -1, -1).finished(), vec({-1, 0}), vec({1}));
  EXPECT_NEAR(-po.value, primal.value, 1e-9);
  EXPECT_NEAR(dor.value, dual.value, 1e-9);
}

TEST(LpDual, ZeroObjectiveHasZeroDual) {
  const Problem p = build::lp(Mat::Identity(2, 2), Vec::Ones(2), Vec::Zero(2), Sense::kMaximize, VarDomain::kNonnegative);
  const TransformResult r = lp_dual(p);
  EXPECT_TRUE(is_feasible(r.transformed, Vec::Zero(2), 0.0));
  EXPECT_EQ(eval(r.transformed.objective, Vec::Zero(2)), 0.0);
  EXPECT_NEAR(solve_simplex(p).value, 0.0, 1e-12);
  EXPECT_NEAR(solve_simplex(r.transformed).value, 0.0, 1e-12);
}

TEST(LpDual, AlternativeFormUsesEqualities) {
  // max x₁ + x₂ s.t. x₁ ≤ 1, x₂ ≤ 2, −x₁ − x₂ ≤ 5 (free x)
  const Problem p = build::lp((Mat(3, 2) << 1, 0, 0, 1, -1, -1).finished(), vec({1, 2, 5}), vec({1, 1}));
  const TransformResult r = lp_dual(p);
  ASSERT_EQ(r.transformed.constraints.size(), 2u);
  for (const Constraint& c : r.transformed.constraints) EXPECT_EQ(c.relation, Relation::kEq);
  EXPECT_NEAR(solve_simplex(p).value, 3.0, 1e-9);
  EXPECT_NEAR(solve_simplex(r.transformed).value, 3.0, 1e-9);
}

TEST(LpDual, ShapeMismatch) {
  const Problem minimize = build::lp(Mat::Identity(1, 1), Vec::Ones(1), Vec::Ones(1), Sense::kMinimize);
  EXPECT_THROW(lp_dual(minimize), InapplicableError);
  Problem with_eq = build::lp(Mat::Identity(1, 1), Vec::Ones(1), Vec::Ones(1));
  with_eq.constraints.push_back(build::eq(Expr::var(*with_eq.slot("x")), C(0)));
  try {
    lp_dual(with_eq);
    FAIL();
  } catch (const InapplicableError& e) {
    EXPECT_EQ(e.kind(), "ShapeMismatch");
  }
  const Problem qp = build::scalar_problem(Sense::kMaximize, [](const Expr& x) { return Expr::neg(Expr::pow(x, 2)); });
  EXPECT_THROW(lp_dual(qp), InapplicableError);
}

TEST(LpDual, WeakDualityOnRandomFeasiblePairs) {
  std::mt19937_64 rng(31);
  int pairs = 0;
  for (int inst = 0; inst < 10; ++inst) {
    const int n = build::randint(rng, 1, 3), m = build::randint(rng, 1, 3);
    Mat a = Mat::NullaryExpr(m, n, [&]() { return static_cast<double>(build::randint(rng, 0, 5)); });
    a.row(0).setOnes();
    const Vec b = Vec::NullaryExpr(m, [&]() { return static_cast<double>(build::randint(rng, 1, 6)); });
    const Vec c = Vec::NullaryExpr(n, [&]() { return static_cast<double>(build::randint(rng, -3, 5)); });
    const Problem p = build::lp(a, b, c, Sense::kMaximize, VarDomain::kNonnegative);
    const TransformResult r = lp_dual(p);
    const auto xs = feasible_points(p, 30, 0, 6, 100 + inst);
    const auto ys = feasible_points(r.transformed, 30, 0, 10, 200 + inst);
    for (const Vec& x : xs) {
      for (const Vec& y : ys) {
        EXPECT_LE(objective_value(p, x), objective_value(r.transformed, y) + 1e-9);
        ++pairs;
      }
    }
  }
  EXPECT_GT(pairs, 1000);
}

TEST(Phase1, FeasibleLpHasNonpositiveOptimum) {
  const Problem p = build::lp((Mat(2, 2) << 1, 1, -1, 0).finished(), vec({2, 0}), vec({1, 1}));
  const TransformResult r = phase1_slack(p);
  EXPECT_FALSE(r.value_map.comparable);
  const Solution s = solve_simplex(r.transformed);
  ASSERT_EQ(s.status, SolveStatus::kUnbounded);  // free directions push s to −∞
  const auto o = oracle::vertex_enumeration((Mat(2, 2) << 1, 1, -1, 0).finished(), vec({2, 0}), vec({0, 0}));
  EXPECT_EQ(o.status, oracle::LpStatus::kOptimal);
  expect_maps_preserve_feasibility(r, p, -3, 3);
}

TEST(Phase1, BoundedFeasibleLp) {
  // 0 ≤ x ≤ 1 as rows: phase-1 optimum −0.5 at x = 0.5
  const Problem p = build::lp((Mat(2, 1) << 1, -1).finished(), vec({1, 0}), vec({1}));
  const Solution s = solve_simplex(phase1_slack(p).transformed);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_LE(s.value, 0.0);
  EXPECT_NEAR(s.value, -0.5, 1e-9);
}

TEST(Phase1, InfeasiblePairHasPositiveOptimum) {
  const Problem p = build::lp((Mat(2, 1) << 1, -1).finished(), vec({-1, 0}), vec({1}));
  const TransformResult r = phase1_slack(p);
  const Solution s = solve_simplex(r.transformed);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_NEAR(s.value, 0.5, 1e-9);
  EXPECT_NEAR((*s.point)(0), -0.5, 1e-9);
  EXPECT_NEAR((*s.point)(1), 0.5, 1e-9);
  const oracle::GridAnswer g = oracle::grid_min(
      [&](const Vec& x) { return std::max(x(0) + 1, -x(0)); }, [](const Vec&) { return true; }, Vec::Constant(1, -3),
      Vec::Constant(1, 3), 0.001);
  EXPECT_NEAR(g.value, 0.5, 1e-9);
}

TEST(Phase1, EmptyConstraintsIsUnbounded) {
  const Problem p = build::scalar_problem(Sense::kMinimize, [](const Expr& x) { return x; });
  const TransformResult r = phase1_slack(p);
  EXPECT_EQ(solve_simplex(r.transformed).status, SolveStatus::kUnbounded);
}

TEST(Phase1, EqualitiesNeedRewriteFirst) {
  Problem p = build::lp(Mat::Identity(1, 1), Vec::Ones(1), Vec::Ones(1));
  p.constraints.push_back(build::eq(Expr::var(*p.slot("x")), C(0)));
  EXPECT_THROW(phase1_slack(p), InapplicableError);
  EXPECT_NO_THROW(phase1_slack(eq_to_ineq_pair(p).transformed));
}

TEST(ToConvexMin, MaximizeNegativeSquare) {
  const Problem p = build::scalar_problem(Sense::kMaximize, [](const Expr& x) { return Expr::neg(Expr::pow(x, 2)); });
  const TransformChain chain = to_convex_min(p);
  ASSERT_EQ(chain.steps.size(), 1u);
  EXPECT_EQ(chain.steps[0].rule, "sense");
  EXPECT_EQ(chain.result.sense, Sense::kMinimize);
  EXPECT_DOUBLE_EQ(eval(chain.result.objective, Vec::Constant(1, 3.0)), 9.0);
  EXPECT_DOUBLE_EQ(chain.value_map.apply(9.0), -9.0);
  EXPECT_EQ(chain.classification.convexity, Convexity::kConvex);
}

TEST(ToConvexMin, LeastSquaresBecomesQp) {
  Problem p;
  const VarSlot x = p.add_variable({"x", VarKind::kVector, 2, VarDomain::kFree});
  p.objective = Expr::norm2(Mat::Identity(2, 2), vec({-1, -1}), {Expr::var(x)});
  const TransformChain chain = to_convex_min(p);
  ASSERT_EQ(chain.steps.size(), 1u);
  EXPECT_EQ(chain.steps[0].rule, "least-squares");
  EXPECT_EQ(chain.classification.problem_class, ProblemClass::kQP);
  const StructureVerdict s = analyze_structure(chain.result.objective, 2);
  ASSERT_TRUE(s.is_quadratic);
  EXPECT_LE((s.quadratic.q - 2 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((s.quadratic.c - vec({-2, -2})).cwiseAbs().maxCoeff(), 1e-15);
  const Solution g = solve_grid_oracle(chain.result, {Vec::Constant(2, -2), Vec::Constant(2, 3), 0.01});
  EXPECT_NEAR((*g.point)(0), 1.0, 1e-9);
  EXPECT_NEAR((*g.point)(1), 1.0, 1e-9);
  EXPECT_NEAR(chain.value_map.apply(-2.0), 0.0, 1e-12);
  const Vec probe = vec({0.3, 2.5});
  EXPECT_NEAR(chain.value_map.apply(eval(chain.result.objective, probe)), eval(p.objective, probe), 1e-12);
}

TEST(ToConvexMin, GpChainIsConvex) {
  const TransformChain chain = to_convex_min(gp_example());
  ASSERT_EQ(chain.steps.size(), 1u);
  EXPECT_EQ(chain.steps[0].rule, "gp-log");
  EXPECT_EQ(chain.classification.convexity, Convexity::kConvex);
  EXPECT_EQ(chain.backward.description, "x = exp(y)");
}

TEST(ToConvexMin, NothingAppliesGivesIdentityChain) {
  const Problem p = build::scalar_problem(Sense::kMinimize, [](const Expr& x) { return Expr::exp(x); });
  const TransformChain chain = to_convex_min(p);
  EXPECT_TRUE(chain.steps.empty());
  EXPECT_TRUE(chain.value_map.is_identity());
  EXPECT_EQ(chain.forward.apply(Vec::Constant(1, 4.0))(0), 4.0);
}

TEST(Compose, ValueMapsApplyLastStepFirst) {
  // least squares, then a sense flip of its QP: the flip's negation runs
  // first, then the least-squares add and sqrt.
  Problem p;
  const VarSlot x = p.add_variable({"x", VarKind::kVector, 2, VarDomain::kFree});
  p.sense = Sense::kMinimize;
  p.objective = Expr::norm2(Mat::Identity(2, 2), vec({-1, -1}), {Expr::var(x)});
  TransformResult ls = least_squares_to_qp(p);
  TransformResult neg = sense_transform([&] {
    Problem q = ls.transformed;
    q.sense = Sense::kMaximize;
    return q;
  }());
  const TransformChain chain = compose(p, {ls, neg});
  EXPECT_EQ(chain.value_map.describe(), "negate then add 2 then sqrt");
  EXPECT_NEAR(chain.value_map.apply(2.0), 0.0, 1e-12);
}
