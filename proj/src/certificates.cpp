#include "ontopt/certificates.hpp"

#include <cmath>
#include <cstdlib>
#include <random>

#include "ontopt/errors.hpp"

namespace ontopt {

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(long i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// A point with every gᵢ < 0: x itself, or an LP phase-1 solution when the
// whole system is affine.
bool strictly_feasible_exists(const std::vector<Expr>& gs, const Vec& x, int dim, const ParamMap& params) {
  bool strict_at_x = true;
  for (const Expr& g : gs) {
    try {
      strict_at_x = strict_at_x && eval(g, x, params) < 0.0;
    } catch (const Error&) {
      strict_at_x = false;
    }
  }
  if (strict_at_x) return true;
  LpData ph;
  ph.c = Vec::Zero(dim + 1);
  ph.c(dim) = 1.0;
  for (const Expr& g : gs) {
    const StructureVerdict s = analyze_structure(g, dim, params);
    if (!s.is_affine) return false;
    Vec row(dim + 1);
    row << s.quadratic.c, -1.0;
    ph.rows.push_back({row, -s.quadratic.k, false, -1});
  }
  Vec lower = Vec::Zero(dim + 1);
  lower(dim) = -1.0;
  ph.rows.push_back({lower, 1.0, false, -1});
  const LpResult r = simplex_lp(ph);
  return r.status == SolveStatus::kOptimal && r.value < -1e-9;
}

}  // namespace

std::uint64_t sampling_seed() {
  if (const char* env = std::getenv("OPT_ONTOLOGY_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 0);
    if (end && *end == '\0') return v;
  }
  return kDefaultSeed;
}

bool check_stationarity(const Problem& p, const Vec& x, double tol) {
  return max_abs(gradient(min_objective(p), x, GradientMode::kAnalytic, 1e-5, p.param_map())) <= tol;
}

KktReport check_kkt(const Problem& p, const Vec& x, const Multipliers& m, double tol) {
  const ParamMap params = p.param_map();
  const int dim = p.dimension();
  if (x.size() != dim) {
    throw DimensionError("point has " + std::to_string(x.size()) + " entries, expected " + std::to_string(dim));
  }
  const std::vector<Expr> gs = inequality_system(p);
  if (m.lambdas.size() != static_cast<long>(gs.size())) {
    throw DimensionError(std::to_string(m.lambdas.size()) + " multipliers for " + std::to_string(gs.size()) +
                         " inequality constraints");
  }
  KktReport r;
  r.lambda0 = m.lambda0;

  Vec grad_l = m.lambda0 * gradient(min_objective(p), x, GradientMode::kAnalytic, 1e-5, params);
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const double gi = eval(gs[i], x, params);
    const double li = m.lambdas(static_cast<long>(i));
    if (li != 0.0) grad_l += li * gradient(gs[i], x, GradientMode::kAnalytic, 1e-5, params);
    r.complementary_slackness_residual = std::max(r.complementary_slackness_residual, std::abs(li * gi));
    r.primal_violation = std::max(r.primal_violation, gi);
  }
  r.stationarity_residual = max_abs(grad_l);

  bool some_positive = m.lambda0 > 1e-12;
  bool nonnegative = m.lambda0 >= 0.0;
  for (long i = 0; i < m.lambdas.size(); ++i) {
    nonnegative = nonnegative && m.lambdas(i) >= 0.0;
    some_positive = some_positive || m.lambdas(i) > 1e-12;
  }
  r.multiplier_signs_ok = nonnegative && some_positive;
  r.strictly_feasible_point = strictly_feasible_exists(gs, x, dim, params);

  if (r.stationarity_residual > tol) {
    r.failed_clause = "(a) stationarity";
  } else if (!r.multiplier_signs_ok) {
    r.failed_clause = "(b) multiplier signs";
  } else if (r.strictly_feasible_point && std::abs(m.lambda0 - 1.0) > tol) {
    r.failed_clause = "(b) lambda0 = 1 required";
  } else if (r.complementary_slackness_residual > tol) {
    r.failed_clause = "(c) complementary slackness";
  } else if (r.primal_violation > tol) {
    r.failed_clause = "primal feasibility";
  }
  r.accepted = r.failed_clause.empty();
  return r;
}

LocalOptimumReport check_local_optimum(const Problem& p, const Vec& x, double delta, int samples, std::uint64_t seed) {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  if (samples < 1) throw DomainError("samples must be at least 1");
  const int n = p.dimension();
  if (x.size() != n) throw DimensionError("point has " + std::to_string(x.size()) + " entries, expected " + std::to_string(n));
  if (n > static_cast<int>(std::size(kPrimes))) throw DimensionError("local optimum sampling supports at most 16 coordinates");
  const Expr f = min_objective(p);
  const ParamMap params = p.param_map();
  LocalOptimumReport r;
  r.value = eval(f, x, params);
  r.witness_value = r.value;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec shift(n);
  for (int j = 0; j < n; ++j) shift(j) = unit(rng);

  for (int k = 1; k <= samples; ++k) {
    Vec z(n);
    for (int j = 0; j < n; ++j) {
      const double u = std::fmod(radical_inverse(k, kPrimes[j]) + shift(j), 1.0);
      z(j) = delta * (2.0 * u - 1.0);
    }
    if (z.norm() > delta) continue;
    const Vec y = x + z;
    if (max_violation(p, y) > 1e-9) continue;
    double v;
    try {
      v = eval(f, y, params);
    } catch (const Error&) {
      continue;
    }
    ++r.feasible_samples;
    if (v < r.value - 1e-12 && v < r.witness_value) {
      r.refuted = true;
      r.witness = y;
      r.witness_value = v;
    }
  }
  return r;
}

SensitivityReport envelope_sensitivity(const Problem& p, const std::string& parameter, double r0, double h,
                                       const SolverConfig& cfg) {
  bool declared = false;
  for (const auto& [name, value] : p.parameters) declared = declared || name == parameter;
  if (!declared) {
    throw ValidationError("undeclared parameter " + parameter, {"UNDECLARED_PARAMETER"});
  }
  if (!(h > 0.0)) throw DomainError("step h must be positive");

  auto solve_at = [&](double r) {
    const Solution s = solve_auto(p.with_parameter(parameter, r), cfg);
    if (s.status != SolveStatus::kOptimal) {
      throw NumericalError("solver status " + std::string(status_name(s.status)) + " at " + parameter + " = " +
                           std::to_string(r));
    }
    return s;
  };
  const Solution lo = solve_at(r0 - h);
  const Solution mid = solve_at(r0);
  const Solution hi = solve_at(r0 + h);

  SensitivityReport rep;
  rep.parameter = parameter;
  rep.r0 = r0;
  rep.h = h;
  rep.lhs = (hi.value - lo.value) / (2.0 * h);
  rep.x_star = *mid.point;
  rep.lambdas = mid.multipliers ? *mid.multipliers : Vec(0);

  const Expr f = min_objective(p);
  const std::vector<Expr> gs = inequality_system(p);
  if (rep.lambdas.size() != static_cast<long>(gs.size())) {
    throw NumericalError("solver returned " + std::to_string(rep.lambdas.size()) + " multipliers for " +
                         std::to_string(gs.size()) + " constraints");
  }
  auto lagrangian = [&](double r) {
    ParamMap params = p.with_parameter(parameter, r).param_map();
    double l = eval(f, rep.x_star, params);
    for (std::size_t i = 0; i < gs.size(); ++i) l += rep.lambdas(static_cast<long>(i)) * eval(gs[i], rep.x_star, params);
    return l;
  };
  rep.rhs = original_value(p, (lagrangian(r0 + h) - lagrangian(r0 - h)) / (2.0 * h));
  rep.discrepancy = std::abs(rep.lhs - rep.rhs);
  return rep;
}

SublinearReport check_sublinear(const Expr& f, int dim, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  auto draw = [&] {
    Vec v(dim);
    for (int j = 0; j < dim; ++j) v(j) = coord(rng);
    return v;
  };
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a) + std::abs(b)); };
  SublinearReport r;
  for (int k = 0; k < samples; ++k) {
    const Vec x = draw();
    const Vec y = draw();
    const double fx = eval(f, x);
    for (double gamma : {0.5, 1.0, 2.0, 3.0}) {
      const double lhs = eval(f, Vec(gamma * x));
      if (!close(lhs, gamma * fx)) {
        return {false, "homogeneity", x, Vec(), gamma, lhs, gamma * fx};
      }
    }
    const double lhs = eval(f, Vec(x + y));
    const double rhs = fx + eval(f, y);
    if (lhs > rhs + 1e-9 * (1.0 + std::abs(rhs))) {
      return {false, "subadditivity", x, y, 0.0, lhs, rhs};
    }
  }
  return r;
}

}  // namespace ontopt
