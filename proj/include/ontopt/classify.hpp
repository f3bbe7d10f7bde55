#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ontopt/linalg.hpp"
#include "ontopt/problem.hpp"

namespace ontopt {

enum class ProblemClass { kLP, kQP, kQCQP, kSOCP, kSDP, kConicProgram, kGP, kConvexNLP, kNLP };
enum class Convexity { kConvex, kNonconvex, kUnknown };

const char* class_name(ProblemClass c);
const char* convexity_name(Convexity c);

/// One row aᵀx ≤ b (or = b) of a linear program.
struct LpRow {
  Vec a;
  double b = 0.0;
  bool equality = false;
  // coordinate j when the row is the domain bound −xⱼ ≤ 0, else -1
  int bound_of = -1;
};

/// min cᵀx + c0 over the rows, in the order of inequality_system() with each
/// equality kept as a single row.
struct LpData {
  Vec c;
  double c0 = 0.0;
  std::vector<LpRow> rows;
};

/// ‖Ax + b‖₂ ≤ cᵀx + d over the flat variable vector.
struct SocBlock {
  Mat a;
  Vec b;
  Vec c;
  double d = 0.0;
  int source = 0;
};

/// Posynomial tables after dividing every constraint into the "≤ 1" / "= 1" form.
struct GpData {
  std::vector<MonomialTerm> objective;
  std::vector<std::vector<MonomialTerm>> inequalities;
  std::vector<MonomialTerm> equalities;
  // source constraint index of each inequality / equality
  std::vector<int> inequality_sources;
  std::vector<int> equality_sources;
};

struct Evidence {
  std::optional<LpData> lp;
  std::optional<QuadraticForm> objective_quadratic;
  std::vector<QuadraticForm> quadratic_constraints;
  std::vector<SocBlock> soc;
  std::optional<GpData> gp;
  /// Smallest eigenvalue found by a failed PSD premise.
  std::optional<double> min_eigenvalue;
  /// Point pair whose midpoint violates the chord inequality of the objective.
  std::optional<std::pair<Vec, Vec>> chord_witness;
};

struct ChainLink {
  std::string node;
  std::string justification;
};

struct Classification {
  ProblemClass problem_class = ProblemClass::kNLP;
  Convexity convexity = Convexity::kUnknown;
  std::vector<ChainLink> chain;
  Evidence evidence;
  std::vector<std::string> flags;
  /// Functions whose convexity the verdict rests on (minimize-sense objective
  /// and every gᵢ of gᵢ ≤ 0). For GP these are the log-space forms.
  std::vector<Expr> certified_convex;
};

/// Most specific class in LP ≺ QP ≺ QCQP ≺ SOCP ≺ SDP ≺ ConicProgram and
/// LP ≺ GP; NLP is the fallback. Requires a valid problem.
Classification classify(const Problem& p);

/// One line per chain node: "<node> [<justification>]".
std::string ontology_chain(const Classification& c);

/// Single-line form: "LP ⊨ ConicProgram ⊨ ConvexOptima [Lemma 1]".
std::string chain_summary(const Classification& c);

/// "<class>, <convexity>" with the failed eigenvalue when there is one.
std::string verdict_summary(const Classification& c);

/// Σₖ exp(aₖᵀy + log cₖ) over all problem variables (a bare affine form when
/// there is a single term and `affine_single` is set).
Expr log_space_expr(const std::vector<MonomialTerm>& terms, const Problem& p, bool affine_single);

/// LP rows and objective, when the minimize-sense objective and every
/// constraint are affine. Second-order cone or PSD constraints yield nullopt.
std::optional<LpData> extract_lp(const Problem& p);

}  // namespace ontopt
