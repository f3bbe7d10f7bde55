#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ontopt/errors.hpp"
#include "ontopt/problem.hpp"
#include "internal.hpp"

namespace ontopt {



namespace {

// ---------------------------------------------------------------------------
// Reading

class Reader {
 public:
  Problem read(const Json& doc) {
    expect_object(doc, "");
    allow_keys(doc, "", {"variables", "sense", "objective", "constraints", "parameters"});
    Problem p;

    const Json& vars = required(doc, "variables", "");
    expect_array(vars, "/variables");
    for (std::size_t i = 0; i < vars.size(); ++i) p.add_variable(read_variable(vars[i], "/variables/" + std::to_string(i)));

    if (doc.contains("parameters")) {
      const Json& params = doc["parameters"];
      expect_object(params, "/parameters");
      for (const auto& [name, value] : params.items()) {
        if (!value.is_number()) throw ParseError("parameter value must be a number", "/parameters/" + name);
        p.parameters.emplace_back(name, value.get<double>());
      }
    }
    problem_ = &p;

    const std::string sense = string_field(doc, "sense", "");
    if (sense == "minimize") {
      p.sense = Sense::kMinimize;
    } else if (sense == "maximize") {
      p.sense = Sense::kMaximize;
    } else {
      throw ParseError("sense must be \"minimize\" or \"maximize\"", "/sense");
    }

    p.objective = read_expr(required(doc, "objective", ""), "/objective");

    if (doc.contains("constraints")) {
      const Json& cons = doc["constraints"];
      expect_array(cons, "/constraints");
      for (std::size_t i = 0; i < cons.size(); ++i) {
        p.constraints.push_back(read_constraint(cons[i], "/constraints/" + std::to_string(i)));
      }
    }
    return p;
  }

 private:
  static void expect_object(const Json& j, const std::string& at) {
    if (!j.is_object()) throw ParseError("expected an object", at);
  }
  static void expect_array(const Json& j, const std::string& at) {
    if (!j.is_array()) throw ParseError("expected an array", at);
  }
  static void allow_keys(const Json& j, const std::string& at, std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : j.items()) {
      bool known = false;
      for (const char* key : keys) known = known || k == key;
      if (!known) throw ParseError("unknown field \"" + k + "\"", at + "/" + k);
    }
  }
  static const Json& required(const Json& j, const char* key, const std::string& at) {
    if (!j.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"", at);
    return j[key];
  }
  static std::string string_field(const Json& j, const char* key, const std::string& at) {
    const Json& v = required(j, key, at);
    if (!v.is_string()) throw ParseError("expected a string", at + "/" + key);
    return v.get<std::string>();
  }
  static double number_field(const Json& j, const char* key, const std::string& at) {
    const Json& v = required(j, key, at);
    if (!v.is_number()) throw ParseError("expected a number", at + "/" + key);
    return v.get<double>();
  }
  static Vec vector_field(const Json& j, const char* key, const std::string& at) {
    const Json& v = required(j, key, at);
    if (!v.is_array()) throw ParseError("expected an array of numbers", at + "/" + key);
    Vec out(static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ParseError("expected a number", at + "/" + key + "/" + std::to_string(i));
      out(static_cast<int>(i)) = v[i].get<double>();
    }
    return out;
  }
  static Mat matrix_field(const Json& j, const char* key, const std::string& at) {
    const Json& v = required(j, key, at);
    const std::string where = at + "/" + key;
    if (!v.is_array()) throw ParseError("expected an array of rows", where);
    const std::size_t rows = v.size();
    const std::size_t cols = rows ? (v[0].is_array() ? v[0].size() : 0) : 0;
    Mat out(static_cast<int>(rows), static_cast<int>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
      if (!v[r].is_array()) throw ParseError("expected a row array", where + "/" + std::to_string(r));
      if (v[r].size() != cols) throw ParseError("ragged matrix rows", where + "/" + std::to_string(r));
      for (std::size_t c = 0; c < cols; ++c) {
        const Json& e = v[r][c];
        if (!e.is_number()) throw ParseError("expected a number", where + "/" + std::to_string(r) + "/" + std::to_string(c));
        out(static_cast<int>(r), static_cast<int>(c)) = e.get<double>();
      }
    }
    return out;
  }

  static VariableSpec read_variable(const Json& j, const std::string& at) {
    expect_object(j, at);
    allow_keys(j, at, {"name", "kind", "size", "domain"});
    VariableSpec v;
    v.name = string_field(j, "name", at);
    const std::string kind = string_field(j, "kind", at);
    if (kind == "scalar") {
      v.kind = VarKind::kScalar;
      if (j.contains("size")) throw ParseError("scalar variables take no size", at + "/size");
    } else if (kind == "vector" || kind == "symmetric-matrix") {
      v.kind = kind == "vector" ? VarKind::kVector : VarKind::kSymmetricMatrix;
      const Json& size = required(j, "size", at);
      if (!size.is_number_integer()) throw ParseError("size must be an integer", at + "/size");
      v.n = size.get<int>();
    } else {
      throw ParseError("kind must be scalar, vector or symmetric-matrix", at + "/kind");
    }
    if (j.contains("domain")) {
      const std::string d = string_field(j, "domain", at);
      if (d == "free") {
        v.domain = VarDomain::kFree;
      } else if (d == "nonnegative") {
        v.domain = VarDomain::kNonnegative;
      } else if (d == "strictly-positive") {
        v.domain = VarDomain::kStrictlyPositive;
      } else {
        throw ParseError("domain must be free, nonnegative or strictly-positive", at + "/domain");
      }
    }
    return v;
  }

  Constraint read_constraint(const Json& j, const std::string& at) {
    expect_object(j, at);
    allow_keys(j, at, {"lhs", "relation", "rhs", "cone"});
    Constraint c;
    c.lhs = read_expr(required(j, "lhs", at), at + "/lhs");
    c.rhs = read_expr(required(j, "rhs", at), at + "/rhs");
    const std::string rel = string_field(j, "relation", at);
    if (rel == "<=") {
      c.relation = Relation::kLe;
    } else if (rel == "=") {
      c.relation = Relation::kEq;
    } else if (rel == ">=") {
      c.relation = Relation::kGe;
    } else if (rel == "in-cone") {
      c.relation = Relation::kInCone;
    } else {
      throw ParseError("relation must be <=, =, >= or in-cone", at + "/relation");
    }
    if (j.contains("cone")) {
      const std::string cone = string_field(j, "cone", at);
      if (cone == "second-order") {
        c.cone = Cone::kSecondOrder;
      } else if (cone == "positive-semidefinite") {
        c.cone = Cone::kPositiveSemidefinite;
      } else {
        throw ValidationError("bad cone tag \"" + cone + "\" at " + at + "/cone", {"BAD_CONE"});
      }
    }
    return c;
  }

  std::vector<Expr> read_args(const Json& j, const std::string& at) {
    const Json& args = required(j, "args", at);
    expect_array(args, at + "/args");
    std::vector<Expr> out;
    for (std::size_t i = 0; i < args.size(); ++i) out.push_back(read_expr(args[i], at + "/args/" + std::to_string(i)));
    return out;
  }

  Expr read_expr(const Json& j, const std::string& at) {
    expect_object(j, at);
    const std::string name = string_field(j, "op", at);
    const auto op = op_from_name(name);
    if (!op) throw ParseError("unknown op \"" + name + "\"", at + "/op");
    switch (*op) {
      case Op::kConst:
        allow_keys(j, at, {"op", "value", "param"});
        if (j.contains("param") == j.contains("value")) throw ParseError("const needs exactly one of value or param", at);
        if (j.contains("param")) return Expr::parameter(string_field(j, "param", at));
        return Expr::constant(number_field(j, "value", at));
      case Op::kVar: {
        allow_keys(j, at, {"op", "name", "index"});
        const std::string var = string_field(j, "name", at);
        auto slot = problem_->slot(var);
        if (!slot) throw ValidationError("undeclared variable " + var + " at " + at, {"UNDECLARED_VARIABLE"});
        if (j.contains("index")) {
          const Json& idx = j["index"];
          if (!idx.is_number_integer() || idx.get<long long>() < 0) throw ParseError("index must be a nonnegative integer", at + "/index");
          return Expr::element(*slot, idx.get<int>());
        }
        return Expr::var(*slot);
      }
      case Op::kAdd:
      case Op::kSum:
      case Op::kNeg:
      case Op::kExp:
      case Op::kLog: {
        allow_keys(j, at, {"op", "args"});
        auto args = read_args(j, at);
        if (*op == Op::kSum) return Expr::sum(std::move(args));
        if (*op == Op::kAdd) {
          if (args.size() != 2) throw ParseError("add takes exactly two args", at + "/args");
          return Expr::add(args[0], args[1]);
        }
        if (args.size() != 1) throw ParseError(name + " takes exactly one arg", at + "/args");
        if (*op == Op::kNeg) return Expr::neg(args[0]);
        return *op == Op::kExp ? Expr::exp(args[0]) : Expr::log(args[0]);
      }
      case Op::kScale: {
        allow_keys(j, at, {"op", "coef", "param", "args"});
        auto args = read_args(j, at);
        if (args.size() != 1) throw ParseError("scale takes exactly one arg", at + "/args");
        if (j.contains("param") == j.contains("coef")) throw ParseError("scale needs exactly one of coef or param", at);
        if (j.contains("param")) return Expr::scale(string_field(j, "param", at), args[0]);
        return Expr::scale(number_field(j, "coef", at), args[0]);
      }
      case Op::kPow: {
        allow_keys(j, at, {"op", "exponent", "args"});
        auto args = read_args(j, at);
        if (args.size() != 1) throw ParseError("pow takes exactly one arg", at + "/args");
        return Expr::pow(args[0], number_field(j, "exponent", at));
      }
      case Op::kDot:
        allow_keys(j, at, {"op", "coef", "args"});
        return Expr::dot(vector_field(j, "coef", at), read_args(j, at));
      case Op::kQuad:
        allow_keys(j, at, {"op", "matrix", "args"});
        return Expr::quad(matrix_field(j, "matrix", at), read_args(j, at));
      case Op::kNorm2:
        allow_keys(j, at, {"op", "matrix", "offset", "args"});
        return Expr::norm2(matrix_field(j, "matrix", at), vector_field(j, "offset", at), read_args(j, at));
      case Op::kMonomial:
        allow_keys(j, at, {"op", "coef", "exponents", "args"});
        return Expr::monomial(number_field(j, "coef", at), vector_field(j, "exponents", at), read_args(j, at));
    }
    throw ParseError("unhandled op", at);
  }

  const Problem* problem_ = nullptr;
};

// ---------------------------------------------------------------------------
// Writing

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json mat_json(const Mat& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json expr_json(const Expr& e) {
  const ExprNode& n = e.node();
  Json j;
  j["op"] = op_name(n.op);
  switch (n.op) {
    case Op::kConst:
      if (n.param.empty()) {
        j["value"] = n.scalar;
      } else {
        j["param"] = n.param;
      }
      return j;
    case Op::kVar:
      j["name"] = n.var.name;
      if (n.element >= 0) j["index"] = n.element;
      return j;
    case Op::kScale:
      if (n.param.empty()) {
        j["coef"] = n.scalar;
      } else {
        j["param"] = n.param;
      }
      break;
    case Op::kPow:
      j["exponent"] = n.scalar;
      break;
    case Op::kDot:
      j["coef"] = vec_json(n.vec);
      break;
    case Op::kQuad:
      j["matrix"] = mat_json(n.mat);
      break;
    case Op::kNorm2:
      j["matrix"] = mat_json(n.mat);
      j["offset"] = vec_json(n.vec);
      break;
    case Op::kMonomial:
      j["coef"] = n.scalar;
      j["exponents"] = vec_json(n.vec);
      break;
    default:
      break;
  }
  Json args = Json::array();
  for (const Expr& a : n.args) args.push_back(expr_json(a));
  j["args"] = std::move(args);
  return j;
}

const char* kind_name(VarKind k) {
  switch (k) {
    case VarKind::kScalar:
      return "scalar";
    case VarKind::kVector:
      return "vector";
    case VarKind::kSymmetricMatrix:
      break;
  }
  return "symmetric-matrix";
}

const char* domain_name(VarDomain d) {
  switch (d) {
    case VarDomain::kFree:
      return "free";
    case VarDomain::kNonnegative:
      return "nonnegative";
    case VarDomain::kStrictlyPositive:
      break;
  }
  return "strictly-positive";
}

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::kLe:
      return "<=";
    case Relation::kEq:
      return "=";
    case Relation::kGe:
      return ">=";
    case Relation::kInCone:
      break;
  }
  return "in-cone";
}

// 1-based line/column of a byte offset.
std::pair<std::size_t, std::size_t> locate(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

Json problem_to_json(const Problem& p) {
  Json doc;
  Json vars = Json::array();
  for (const VariableSpec& v : p.variables) {
    Json jv;
    jv["name"] = v.name;
    jv["kind"] = kind_name(v.kind);
    if (v.kind != VarKind::kScalar) jv["size"] = v.n;
    jv["domain"] = domain_name(v.domain);
    vars.push_back(std::move(jv));
  }
  doc["variables"] = std::move(vars);
  doc["sense"] = p.sense == Sense::kMinimize ? "minimize" : "maximize";
  doc["objective"] = expr_json(p.objective);
  Json cons = Json::array();
  for (const Constraint& c : p.constraints) {
    Json jc;
    jc["lhs"] = expr_json(c.lhs);
    jc["relation"] = relation_name(c.relation);
    jc["rhs"] = expr_json(c.rhs);
    if (c.cone != Cone::kNone) jc["cone"] = c.cone == Cone::kSecondOrder ? "second-order" : "positive-semidefinite";
    cons.push_back(std::move(jc));
  }
  doc["constraints"] = std::move(cons);
  Json params = Json::object();
  for (const auto& [name, value] : p.parameters) params[name] = value;
  doc["parameters"] = std::move(params);
  return doc;
}

Problem parse_problem(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is one past the offending character
    const auto [line, col] = locate(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string what = e.what();
    if (auto pos = what.find("syntax error while parsing value - "); pos != std::string::npos) {
      what = what.substr(pos + 35);
    }
    throw ParseError(what, line, col);
  }
  Problem p = Reader().read(doc);
  require_valid(p);
  return p;
}

std::string serialize_problem(const Problem& p) { return problem_to_json(p).dump(2) + "\n"; }

Problem load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

void save_problem(const Problem& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << serialize_problem(p);
}

}  // namespace ontopt
