#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ontopt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using ParamMap = std::map<std::string, double>;

enum class Op { kConst, kVar, kAdd, kNeg, kScale, kDot, kQuad, kNorm2, kExp, kLog, kPow, kMonomial, kSum };

/// File-format name of an op ("const", "var", ...).
const char* op_name(Op op);
std::optional<Op> op_from_name(const std::string& name);

/// A declared variable's position in the flat point vector.
struct VarSlot {
  std::string name;
  int offset = 0;
  int size = 1;
};

class Expr;

struct ExprNode {
  Op op = Op::kConst;
  // const value, scale coefficient, pow exponent, monomial coefficient
  double scalar = 0.0;
  // parameter name for const/scale nodes bound to a problem parameter
  std::string param;
  // variable reference
  VarSlot var;
  int element = -1;
  // dot coefficients, norm2 offset, monomial exponents
  Vec vec;
  // quad matrix (symmetrized), norm2 matrix
  Mat mat;
  // max |Q - Q^T| of the quad matrix as supplied, before symmetrization
  double asymmetry = 0.0;
  std::vector<Expr> args;
  // flat indices gathered from the variable arguments of dot/quad/norm2/monomial
  std::vector<int> indices;
};

/// Immutable scalar expression tree. Copies share the underlying node.
class Expr {
 public:
  static Expr constant(double value);
  /// Leaf whose value is the named problem parameter.
  static Expr parameter(std::string name);
  /// Reference to a whole variable. Scalar-valued only when slot.size == 1;
  /// larger references are valid solely as arguments of dot/quad/norm2/monomial.
  static Expr var(const VarSlot& slot);
  static Expr element(const VarSlot& slot, int index);

  static Expr add(Expr a, Expr b);
  static Expr sum(std::vector<Expr> terms);
  static Expr neg(Expr a);
  static Expr scale(double coef, Expr a);
  static Expr scale(std::string param, Expr a);

  /// coefᵀx over the concatenation of the variable arguments.
  static Expr dot(Vec coef, std::vector<Expr> vars);
  /// ½xᵀQx. Q is symmetrized; asymmetry above 1e-12 is reported through the
  /// warning handler and kept on the node for validation.
  static Expr quad(Mat q, std::vector<Expr> vars);
  /// ‖Ax + b‖₂.
  static Expr norm2(Mat a, Vec b, std::vector<Expr> vars);
  static Expr exp(Expr a);
  static Expr log(Expr a);
  static Expr pow(Expr a, double exponent);
  /// c·x₁^a₁···xₙ^aₙ on the positive orthant.
  static Expr monomial(double coef, Vec exponents, std::vector<Expr> vars);

  const ExprNode& node() const { return *node_; }
  Op op() const { return node_->op; }
  const std::vector<Expr>& args() const { return node_->args; }

  /// Number of scalars the node produces: 1 except for whole-vector variable refs.
  int width() const;
  /// One past the largest flat index referenced anywhere in the tree.
  int min_dimension() const;

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  static Expr make(ExprNode node);

  std::shared_ptr<const ExprNode> node_;
};

using WarningHandler = std::function<void(const std::string&)>;
/// Installs the sink for construction-time warnings. Returns the previous one.
WarningHandler set_warning_handler(WarningHandler handler);

double eval(const Expr& expr, const Vec& point, const ParamMap& params = {});

enum class GradientMode { kAnalytic, kFiniteDifference };

Vec gradient(const Expr& expr, const Vec& point, GradientMode mode = GradientMode::kAnalytic,
             double step = 1e-5, const ParamMap& params = {});

/// Analytic Hessian for the same atom set as gradient().
Mat hessian(const Expr& expr, const Vec& point, const ParamMap& params = {});

enum class Curvature { kConstant, kAffine, kConvex, kConcave, kUnknown };

const char* curvature_name(Curvature c);

struct CurvatureVerdict {
  Curvature curvature = Curvature::kUnknown;
  /// Rule applied at each node, post-order.
  std::vector<std::string> rules;

  bool is_convex() const;   // constant, affine, or convex
  bool is_concave() const;  // constant, affine, or concave
  bool is_affine() const;   // constant or affine
};

/// Sound, incomplete disciplined-convexity analysis. Parameter values (when
/// given) decide the sign of parameter-scaled terms.
CurvatureVerdict curvature(const Expr& expr, const ParamMap& params = {});

struct MonomialTerm {
  double coef = 1.0;
  Vec exponents;
};

/// ½xᵀQx + cᵀx + k over the flat variable vector.
struct QuadraticForm {
  Mat q;
  Vec c;
  double k = 0.0;
};

struct StructureVerdict {
  bool is_affine = false;
  bool is_monomial = false;
  bool is_posynomial = false;
  bool is_quadratic = false;
  // populated when is_quadratic (and hence when is_affine, with q == 0)
  QuadraticForm quadratic;
  // populated when is_posynomial; a single term when is_monomial
  std::vector<MonomialTerm> terms;
};

/// Recognizes affine, quadratic, monomial and posynomial trees. `dim` is the
/// flat problem dimension the payloads are expressed over.
StructureVerdict analyze_structure(const Expr& expr, int dim, const ParamMap& params = {});

/// Value of a posynomial term table at a point.
double eval_terms(const std::vector<MonomialTerm>& terms, const Vec& point);

}  // namespace ontopt
