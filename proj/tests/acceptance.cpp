// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "builders.hpp"
#include "ontopt/certificates.hpp"
#include "ontopt/classify.hpp"
#include "ontopt/errors.hpp"
#include "ontopt/solvers.hpp"
#include "ontopt/transforms.hpp"
#include "oracles.hpp"

using namespace ontopt;
using build::C;
namespace fs = std::filesystem;

namespace {

std::string data(const std::string& name) { return std::string(ONTOPT_TEST_DATA) + "/" + name + ".optproblem.json"; }

struct Verdict {
  bool pass = true;
  std::string detail;
};

// Optimal solutions carrying multipliers, kept for the closure check.
struct Emitted {
  std::string origin;
  Problem problem;
  Solution solution;
};
std::vector<Emitted> g_emitted;

// Problems whose certified-convex expressions get chord-sampled.
std::vector<std::pair<std::string, Problem>> g_sampled;

void emit(const std::string& origin, const Problem& p, const Solution& s) {
  if (s.status == SolveStatus::kOptimal && s.point && s.multipliers) g_emitted.push_back({origin, p, s});
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------- 1

struct Golden {
  const char* file;
  ProblemClass cls;
  const char* summary;
};

const Golden kGolden[] = {
    {"lp_canonical", ProblemClass::kLP, "LP ⊨ ConicProgram ⊨ ConvexOptima [Lemma 1]"},
    {"lp_standard", ProblemClass::kLP, "LP ⊨ ConicProgram ⊨ ConvexOptima [Lemma 1]"},
    {"socp", ProblemClass::kSOCP, "SOCP ⊨ ConicProgram ⊨ ConvexOptima [Lemma 2]"},
    {"socp_reducible", ProblemClass::kSOCP, "SOCP ⊨ LP ⊨ ConicProgram ⊨ ConvexOptima [Proposition 1]"},
    {"sdp", ProblemClass::kSDP, "SDP ⊨ ConicProgram ⊨ ConvexOptima [Lemma 3]"},
    {"gp", ProblemClass::kGP, "GP ⊨ ConvexOptima [Lemma 4]"},
    {"qp_convex", ProblemClass::kQP, "QP ⊨ ConvexOptima [Lemma 5]"},
    {"qp_nonconvex", ProblemClass::kQP, "QP [Definition 7]"},
    {"qcqp", ProblemClass::kQCQP, "QCQP ⊨ ConvexOptima [Proposition 2]"},
    {"conic", ProblemClass::kConicProgram, "ConicProgram ⊨ ConvexOptima [Definition 5]"},
    {"nlp_convex", ProblemClass::kConvexNLP, "ConvexNLP ⊨ ConvexOptima [Definition 1]"},
    {"nlp_nonconvex", ProblemClass::kNLP, "NLP [Definition 8]"},
};

Verdict classification_corpus() {
  int matched = 0;
  std::string misses;
  for (const Golden& g : kGolden) {
    const Problem p = load_problem(data(g.file));
    const Classification c = classify(p);
    if (c.problem_class == g.cls && chain_summary(c) == g.summary) {
      ++matched;
    } else {
      misses += std::string(" ") + g.file;
    }
    g_sampled.push_back({g.file, p});
  }
  const int total = static_cast<int>(std::size(kGolden));
  return {matched == total, std::to_string(matched) + "/" + std::to_string(total) + " exact" + misses};
}

// ---------------------------------------------------------------- 2

// Offsets with integer norms keep the reduced rows on a half-integer lattice.
const std::vector<Vec> kOffsets = {
    (Vec(2) << 3, 4).finished(),    (Vec(2) << 5, 12).finished(), (Vec(1) << 0).finished(),
    (Vec(1) << 2).finished(),       (Vec(3) << 1, 2, 2).finished(), (Vec(3) << 2, 3, 6).finished(),
};

Verdict socp_reduction() {
  std::mt19937_64 rng(202);
  int matched = 0;
  double worst = 0;
  const int count = 20;
  for (int inst = 0; inst < count; ++inst) {
    const int n = build::randint(rng, 1, 3);
    Problem p;
    const VarSlot x = p.add_variable({"x", VarKind::kVector, n, VarDomain::kFree});
    p.objective = Expr::dot(Vec::NullaryExpr(n, [&]() { return double(build::randint(rng, -3, 3)); }), {Expr::var(x)});
    for (int j = 0; j < n; ++j) {
      p.constraints.push_back(build::le(Expr::element(x, j), C(3)));
      p.constraints.push_back(build::ge(Expr::element(x, j), C(-3)));
    }
    const int cones = build::randint(rng, 1, 2);
    for (int k = 0; k < cones; ++k) {
      const Vec& b = kOffsets[build::randint(rng, 0, static_cast<int>(kOffsets.size()) - 1)];
      const Vec c = Vec::NullaryExpr(n, [&]() { return double(build::randint(rng, -1, 1)); });
      const double d = std::round(b.norm()) + build::randint(rng, 0, 2);
      p.constraints.push_back({Expr::norm2(Mat::Zero(b.size(), n), b, {Expr::var(x)}), Relation::kInCone,
                               Expr::add(Expr::dot(c, {Expr::var(x)}), C(d)), Cone::kSecondOrder});
    }
    const TransformResult r = socp_to_lp(p);
    const Solution lp = solve_simplex(r.transformed);
    emit("socp->lp #" + std::to_string(inst), r.transformed, lp);
    const Solution grid = solve_grid_oracle(p, {Vec::Constant(n, -3), Vec::Constant(n, 3), 0.25});
    g_sampled.push_back({"socp #" + std::to_string(inst), p});
    g_sampled.push_back({"socp->lp #" + std::to_string(inst), r.transformed});
    if (lp.status != SolveStatus::kOptimal || grid.status != SolveStatus::kOptimal) continue;
    const double gap = std::abs(r.value_map.apply(lp.value) - grid.value);
    worst = std::max(worst, gap);
    if (gap <= 1e-6) ++matched;
  }
  return {matched == count, std::to_string(matched) + "/" + std::to_string(count) + " within 1e-6, worst gap " + fmt(worst)};
}

// ---------------------------------------------------------------- 3

std::vector<Vec> rejection_sample(const Problem& p, int count, double lo, double hi, std::mt19937_64& rng) {
  std::vector<Vec> out;
  for (int tries = 0; tries < 20000 && static_cast<int>(out.size()) < count; ++tries) {
    const Vec x = build::uniform(rng, p.dimension(), lo, hi);
    if (is_feasible(p, x, 0.0)) out.push_back(x);
  }
  return out;
}

std::vector<std::pair<Problem, Solution>> g_duality_primals;

Verdict lp_duality() {
  std::mt19937_64 rng(303);
  int strong = 0, weak_violations = 0, pairs = 0;
  const int count = 30;
  for (int inst = 0; inst < count; ++inst) {
    const int n = build::randint(rng, 1, 3), m = build::randint(rng, 1, 4);
    Mat a = Mat::NullaryExpr(m, n, [&]() { return double(build::randint(rng, 0, 5)); });
    a.row(0).setOnes();
    const Vec b = Vec::NullaryExpr(m, [&]() { return double(build::randint(rng, 1, 8)); });
    const Vec c = Vec::NullaryExpr(n, [&]() { return double(build::randint(rng, -3, 6)); });
    const Problem primal = build::lp(a, b, c, Sense::kMaximize, VarDomain::kNonnegative);
    const Problem dual = lp_dual(primal).transformed;
    const Solution sp = solve_simplex(primal);
    const Solution sd = solve_simplex(dual);
    emit("dual primal #" + std::to_string(inst), primal, sp);
    emit("dual dual #" + std::to_string(inst), dual, sd);
    g_sampled.push_back({"primal #" + std::to_string(inst), primal});
    g_sampled.push_back({"dual #" + std::to_string(inst), dual});
    if (sp.status == SolveStatus::kOptimal) g_duality_primals.push_back({primal, sp});

    // independent value: max cᵀx ⇔ min −cᵀx over [A; −I]x ≤ [b; 0]
    Mat rows(m + n, n);
    rows << a, -Mat::Identity(n, n);
    Vec rhs(m + n);
    rhs << b, Vec::Zero(n);
    const oracle::LpAnswer o = oracle::vertex_enumeration(rows, rhs, -c);
    const bool optimal = sp.status == SolveStatus::kOptimal && sd.status == SolveStatus::kOptimal &&
                         o.status == oracle::LpStatus::kOptimal;
    if (optimal && std::abs(sp.value - sd.value) <= 1e-6 && std::abs(sp.value + o.value) <= 1e-6) ++strong;

    // feasible samples: box rejection plus shrunk optima (A ≥ 0, b > 0)
    std::vector<Vec> xs = rejection_sample(primal, 20, 0, b.maxCoeff(), rng);
    std::vector<Vec> ys = rejection_sample(dual, 20, 0, 2 * std::max(1.0, c.maxCoeff()), rng);
    if (optimal) {
      for (int k = 0; k < 20; ++k) {
        xs.push_back((build::uniform(rng, n, 0, 1).array() * sp.point->array()).matrix());
        ys.push_back(*sd.point + build::uniform(rng, m, 0, 3));
      }
    }
    for (const Vec& x : xs) {
      if (!is_feasible(primal, x, 1e-12)) continue;
      for (const Vec& y : ys) {
        if (!is_feasible(dual, y, 1e-12)) continue;
        ++pairs;
        if (c.dot(x) > b.dot(y) + 1e-9) ++weak_violations;
      }
    }
  }
  return {strong == count && weak_violations == 0 && pairs > 0,
          "strong " + std::to_string(strong) + "/" + std::to_string(count) + ", weak violations " +
              std::to_string(weak_violations) + " over " + std::to_string(pairs) + " pairs"};
}

// ---------------------------------------------------------------- 4

std::vector<std::pair<Problem, Solution>> g_gp_solutions;

Verdict gp_log() {
  std::mt19937_64 rng(404);
  int matched = 0;
  double worst = 0;
  const int count = 10;
  for (int inst = 0; inst < count; ++inst) {
    const Vec coef = build::uniform(rng, 3, 0.5, 2.0);
    const Vec expo = build::uniform(rng, 4, 0.5, 2.0);  // p, q, r, s
    Problem p;
    const VarSlot x = p.add_variable({"x", VarKind::kVector, 2, VarDomain::kStrictlyPositive});
    p.objective = Expr::sum({Expr::monomial(coef(0), (Vec(2) << expo(0), 0).finished(), {Expr::var(x)}),
                             Expr::monomial(coef(1), (Vec(2) << 0, expo(1)).finished(), {Expr::var(x)}),
                             Expr::monomial(coef(2), (Vec(2) << -expo(2), -expo(3)).finished(), {Expr::var(x)})});
    const TransformResult r = gp_log_transform(p);
    const Solution s = solve_newton(r.transformed);
    emit("gp log #" + std::to_string(inst), r.transformed, s);
    g_sampled.push_back({"gp #" + std::to_string(inst), p});
    g_sampled.push_back({"gp log #" + std::to_string(inst), r.transformed});
    if (s.status != SolveStatus::kOptimal) continue;
    g_gp_solutions.push_back({r.transformed, s});

    // x-space grid: coarse sweep, then a fine sweep around the coarse argmin
    auto f = [&](const Vec& v) { return eval(p.objective, v); };
    auto any = [](const Vec&) { return true; };
    const oracle::GridAnswer coarse = oracle::grid_min(f, any, Vec::Constant(2, 0.02), Vec::Constant(2, 10), 0.02);
    const Vec lo = (coarse.x.array() - 0.04).max(0.001).matrix();
    const oracle::GridAnswer fine = oracle::grid_min(f, any, lo, coarse.x.array() + 0.04, 4e-4);
    const double mapped = r.value_map.apply(s.value);
    const double back = eval(p.objective, r.backward->apply(*s.point));
    const double gap = std::max(std::abs(mapped - fine.value), std::abs(back - fine.value));
    worst = std::max(worst, gap);
    if (gap <= 1e-3) ++matched;
  }
  return {matched == count, std::to_string(matched) + "/" + std::to_string(count) + " within 1e-3, worst gap " + fmt(worst)};
}

// ---------------------------------------------------------------- 5

Verdict solver_cross_check() {
  std::mt19937_64 rng(505);
  int simplex_ok = 0, barrier_cmp = 0, barrier_ok = 0;
  int statuses[3] = {0, 0, 0};
  const int count = 50;
  for (int inst = 0; inst < count; ++inst) {
    const int n = build::randint(rng, 1, 3), m = build::randint(rng, 1, 5);
    const Mat a = Mat::NullaryExpr(m, n, [&]() { return double(build::randint(rng, -5, 5)); });
    const Vec b = Vec::NullaryExpr(m, [&]() { return double(build::randint(rng, -3, 6)); });
    const Vec c = Vec::NullaryExpr(n, [&]() { return double(build::randint(rng, -5, 5)); });
    const Problem p = build::lp(a, b, c, Sense::kMinimize);
    const Solution s = solve_simplex(p);
    emit("random lp #" + std::to_string(inst), p, s);
    g_sampled.push_back({"random lp #" + std::to_string(inst), p});
    const oracle::LpAnswer o = oracle::vertex_enumeration(a, b, c);
    bool ok = false;
    switch (o.status) {
      case oracle::LpStatus::kOptimal:
        ++statuses[0];
        ok = s.status == SolveStatus::kOptimal && std::abs(s.value - o.value) <= 1e-6;
        break;
      case oracle::LpStatus::kUnbounded:
        ++statuses[1];
        ok = s.status == SolveStatus::kUnbounded;
        break;
      case oracle::LpStatus::kInfeasible:
        ++statuses[2];
        ok = s.status == SolveStatus::kInfeasible;
        break;
    }
    if (ok) ++simplex_ok;
    if (o.status != oracle::LpStatus::kOptimal) continue;

    // strict feasibility from the oracle: max σ s.t. Ax + σ ≤ b, σ ≤ 1
    Mat rows(m + 1, n + 1);
    rows << a, Vec::Ones(m), Mat::Zero(1, n), Mat::Ones(1, 1);
    Vec rhs(m + 1);
    rhs << b, 1.0;
    Vec obj = Vec::Zero(n + 1);
    obj(n) = -1;
    const oracle::LpAnswer margin = oracle::vertex_enumeration(rows, rhs, obj);
    if (margin.status != oracle::LpStatus::kOptimal || -margin.value <= 1e-5) continue;
    ++barrier_cmp;
    try {
      const Solution sb = solve_barrier(p);
      emit("random lp barrier #" + std::to_string(inst), p, sb);
      if (sb.status == SolveStatus::kOptimal && std::abs(sb.value - s.value) <= 1e-6) ++barrier_ok;
    } catch (const std::exception& e) {
      std::cerr << "  barrier #" << inst << ": " << e.what() << "\n";
    }
  }
  return {simplex_ok == count && barrier_ok == barrier_cmp,
          "simplex " + std::to_string(simplex_ok) + "/" + std::to_string(count) + " (optimal " +
              std::to_string(statuses[0]) + ", unbounded " + std::to_string(statuses[1]) + ", infeasible " +
              std::to_string(statuses[2]) + "), barrier " + std::to_string(barrier_ok) + "/" +
              std::to_string(barrier_cmp)};
}

// ---------------------------------------------------------------- 6

Verdict certificate_closure() {
  int accepted = 0;
  for (const Emitted& e : g_emitted) {
    const KktReport r = check_kkt(e.problem, *e.solution.point, {1.0, *e.solution.multipliers}, 1e-6);
    if (r.accepted) {
      ++accepted;
    } else {
      std::cerr << "  kkt reject " << e.origin << ": " << r.failed_clause << "\n";
    }
  }
  // five LP primals and five GP log-space optima, each pushed 0.1 along a random unit direction
  std::mt19937_64 rng(606);
  int rejected = 0, perturbed = 0;
  auto perturb = [&](const Problem& p, const Solution& s) {
    Vec d = build::uniform(rng, p.dimension(), -1, 1);
    d /= d.norm();
    const Vec x = *s.point + 0.1 * d;
    ++perturbed;
    if (!check_kkt(p, x, {1.0, *s.multipliers}, 1e-6).accepted) ++rejected;
  };
  for (std::size_t i = 0; i < g_duality_primals.size() && i < 5; ++i) perturb(g_duality_primals[i].first, g_duality_primals[i].second);
  for (std::size_t i = 0; i < g_gp_solutions.size() && i < 5; ++i) perturb(g_gp_solutions[i].first, g_gp_solutions[i].second);
  const int total = static_cast<int>(g_emitted.size());
  return {accepted == total && total > 0 && perturbed == 10 && rejected == perturbed,
          "kkt accept " + std::to_string(accepted) + "/" + std::to_string(total) + ", perturbed rejected " +
              std::to_string(rejected) + "/" + std::to_string(perturbed)};
}

// ---------------------------------------------------------------- 7

Verdict envelope_suite() {
  std::mt19937_64 rng(707);
  int ok = 0, checks = 0;
  double worst_ratio = 0;
  for (int inst = 0; inst < 10; ++inst) {
    const int n = build::randint(rng, 2, 3);
    const Mat mm = Mat::NullaryExpr(n, n, [&]() { return build::uniform(rng, 1, -1, 1)(0); });
    const Mat q = mm.transpose() * mm + 0.5 * Mat::Identity(n, n);
    Problem p;
    const VarSlot x = p.add_variable({"x", VarKind::kVector, n, VarDomain::kFree});
    p.parameters.push_back({"r", 0.0});
    // ½xᵀQx + qᵀx + r·gᵀx, optionally s.t. aᵀx = a₀ + β·r
    p.objective = Expr::sum({Expr::quad(q, {Expr::var(x)}), Expr::dot(build::uniform(rng, n, -2, 2), {Expr::var(x)}),
                             Expr::scale("r", Expr::dot(build::uniform(rng, n, -2, 2), {Expr::var(x)}))});
    if (inst % 2 == 1) {
      const double beta = build::uniform(rng, 1, -1, 1)(0);
      p.constraints.push_back(build::eq(Expr::dot(build::uniform(rng, n, -2, 2), {Expr::var(x)}),
                                        Expr::add(C(build::uniform(rng, 1, -1, 1)(0)), Expr::scale(beta, Expr::parameter("r")))));
    }
    for (double r0 : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
      ++checks;
      try {
        const SensitivityReport s = envelope_sensitivity(p, "r", r0, 1e-4);
        const double bound = std::max(1e-4, 1e-3 * std::abs(s.lhs));
        worst_ratio = std::max(worst_ratio, s.discrepancy / bound);
        if (s.discrepancy <= bound) ++ok;
      } catch (const std::exception& e) {
        std::cerr << "  envelope #" << inst << " r=" << r0 << ": " << e.what() << "\n";
      }
    }
  }
  return {ok == checks, std::to_string(ok) + "/" + std::to_string(checks) + " within bound, worst discrepancy/bound " +
                            fmt(worst_ratio)};
}

// ---------------------------------------------------------------- 8

Verdict multistart() {
  std::mt19937_64 rng(808);
  int agreeing = 0;
  double worst = 0;
  const int count = 10;
  for (int inst = 0; inst < count; ++inst) {
    const int n = build::randint(rng, 1, 4);
    const Mat mm = Mat::NullaryExpr(n, n, [&]() { return build::uniform(rng, 1, -1, 1)(0); });
    Problem p;
    const VarSlot x = p.add_variable({"x", VarKind::kVector, n, VarDomain::kFree});
    p.objective = Expr::add(Expr::quad(mm.transpose() * mm + 0.2 * Mat::Identity(n, n), {Expr::var(x)}),
                            Expr::dot(build::uniform(rng, n, -5, 5), {Expr::var(x)}));
    std::vector<Vec> ends;
    bool all_optimal = true;
    for (int k = 0; k < 20; ++k) {
      SolverConfig cfg;
      cfg.start = build::uniform(rng, n, -10, 10);
      const Solution s = solve_newton(p, cfg);
      all_optimal = all_optimal && s.status == SolveStatus::kOptimal;
      if (s.point) ends.push_back(*s.point);
    }
    double spread = 0;
    for (const Vec& u : ends) {
      for (const Vec& v : ends) spread = std::max(spread, (u - v).norm());
    }
    worst = std::max(worst, spread);
    if (all_optimal && ends.size() == 20 && spread <= 1e-6) ++agreeing;
  }
  return {agreeing == count, std::to_string(agreeing) + "/" + std::to_string(count) + " agree, widest spread " + fmt(worst)};
}

// ---------------------------------------------------------------- 9

Vec domain_point(std::mt19937_64& rng, const Problem& p) {
  Vec x(p.dimension());
  int k = 0;
  for (const VariableSpec& v : p.variables) {
    const double lo = v.domain == VarDomain::kFree ? -5.0 : v.domain == VarDomain::kNonnegative ? 0.0 : 0.05;
    for (int i = 0; i < v.flat_size(); ++i) x(k++) = build::uniform(rng, 1, lo, 5)(0);
  }
  return x;
}

Verdict curvature_soundness() {
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> theta(0.0, 1.0);
  int expressions = 0, violations = 0;
  long chords = 0;
  for (const auto& [origin, p] : g_sampled) {
    const Classification c = classify(p);
    if (c.convexity != Convexity::kConvex) continue;
    const ParamMap params = p.param_map();
    // GP certificates live in log coordinates, which are unconstrained
    const bool log_space = c.problem_class == ProblemClass::kGP;
    for (const Expr& f : c.certified_convex) {
      ++expressions;
      for (int k = 0; k < 200; ++k) {
        const Vec u = log_space ? build::uniform(rng, p.dimension(), -3, 3) : domain_point(rng, p);
        const Vec v = log_space ? build::uniform(rng, p.dimension(), -3, 3) : domain_point(rng, p);
        const double t = theta(rng);
        double lhs = 0, rhs = 0;
        try {
          lhs = eval(f, t * u + (1 - t) * v, params);
          rhs = t * eval(f, u, params) + (1 - t) * eval(f, v, params);
        } catch (const DomainError&) {
          continue;
        }
        ++chords;
        if (lhs > rhs + 1e-9 * std::max(1.0, std::abs(rhs))) {
          ++violations;
          std::cerr << "  chord violation in " << origin << "\n";
        }
      }
    }
  }
  return {violations == 0 && expressions > 0,
          std::to_string(violations) + " violations over " + std::to_string(chords) + " chords on " +
              std::to_string(expressions) + " expressions"};
}

// ---------------------------------------------------------------- 10

std::string run_cli(const std::string& args) {
  const std::string cmd = std::string(ONTOPT_CLI) + " " + args + " 2>&1";
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return "popen failed";
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return out + "\n[exit " + std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1) + "]\n";
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string cli_suite(const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "square.json") << R"({"variables": [{"name": "x", "kind": "scalar"}], "sense": "minimize",
  "objective": {"op": "pow", "exponent": 2, "args": [{"op": "var", "name": "x"}]}, "constraints": []})";
  std::ofstream(dir / "bad.json") << "{\n  \"variables\": [\n    {\"name\": x}\n";
  const std::string sq = (dir / "square.json").string();
  std::vector<std::string> cmds;
  for (const Golden& g : kGolden) {
    cmds.push_back("classify " + data(g.file));
    cmds.push_back("classify --json " + data(g.file));
  }
  cmds.push_back("classify " + (dir / "bad.json").string());
  cmds.push_back("transform --json " + data("socp_reducible") + " --rule socp2lp -o " + (dir / "lp.json").string());
  cmds.push_back("transform " + data("lp_standard") + " --rule dual -o " + (dir / "dual.json").string());
  cmds.push_back("transform " + data("gp") + " --rule gp-log -o " + (dir / "gp_log.json").string());
  cmds.push_back("transform " + data("lp_standard") + " --rule eq2ineq -o " + (dir / "eq.json").string());
  cmds.push_back("transform " + data("nlp_convex") + " --rule gp-log -o " + (dir / "never.json").string());
  cmds.push_back("solve --json " + (dir / "lp.json").string() + " --method simplex");
  cmds.push_back("solve --json " + data("lp_standard") + " --method simplex");
  cmds.push_back("solve --json " + data("lp_standard") + " --method barrier");
  cmds.push_back("solve --json " + data("nlp_convex") + " --method newton");
  cmds.push_back("solve --json " + sq + " --method grid --grid-box=-1:2 --grid-res 0.001 --threads 4");
  cmds.push_back("certify --json " + sq + " --point 0.5 --delta 0.5 --samples 500");
  cmds.push_back("certify --json " + data("lp_standard") + " --point 2,6 --multipliers 0,1.5,1,0,0");
  std::string transcript;
  for (const std::string& c : cmds) transcript += "$ " + c + "\n" + run_cli(c);
  for (const char* f : {"lp.json", "lp.json.chain.json", "dual.json", "gp_log.json", "eq.json"}) {
    transcript += std::string("== ") + f + "\n" + slurp(dir / f);
  }
  return transcript;
}

Verdict determinism() {
  const fs::path dir = fs::temp_directory_path() / "ontopt_acceptance_cli";
  const std::string first = cli_suite(dir);
  const std::string second = cli_suite(dir);
  fs::remove_all(dir);
  return {first == second && !first.empty(), std::to_string(first.size()) + " bytes, " + (first == second ? "identical" : "differ")};
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  struct Criterion {
    const char* name;
    Verdict (*run)();
  };
  const Criterion criteria[] = {
      {"classification corpus", classification_corpus},
      {"SOCP to LP equivalence", socp_reduction},
      {"LP duality", lp_duality},
      {"GP log transform", gp_log},
      {"solver cross-check", solver_cross_check},
      {"certificate closure", certificate_closure},
      {"envelope sensitivity", envelope_suite},
      {"convex multistart", multistart},
      {"curvature soundness", curvature_soundness},
      {"CLI determinism", determinism},
  };
  int failed = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::cout << (v.pass ? "PASS" : "FAIL") << " " << index << " " << c.name << ": " << v.detail << std::endl;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "elapsed " << fmt(seconds) << " s, " << failed << " failed" << std::endl;
  return failed == 0 ? 0 : 1;
}
