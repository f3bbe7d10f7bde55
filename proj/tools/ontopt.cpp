#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "ontopt/certificates.hpp"
#include "ontopt/classify.hpp"
#include "ontopt/errors.hpp"
#include "ontopt/report.hpp"
#include "ontopt/solvers.hpp"
#include "ontopt/transforms.hpp"

using namespace ontopt;

namespace {

enum Exit { kOk = 0, kParse = 2, kValidation = 3, kInapplicable = 4, kNumerical = 5 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string g_hint;

struct Input {
  std::string path;
  std::string content;
  Problem problem;
};

Input read_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  Input input{path, buf.str(), {}};
  input.problem = parse_problem(input.content);
  return input;
}

Vec parse_vector(const std::string& text, const char* flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": not a number: '" + item + "'");
    }
  }
  return Eigen::Map<Vec>(values.data(), static_cast<long>(values.size()));
}

GridBox parse_box(const std::string& text, double step, int dim) {
  GridBox box;
  std::vector<std::pair<double, double>> ranges;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw UsageError("--grid-box expects lo:hi[,lo:hi...], got '" + item + "'");
    const Vec lohi = parse_vector(item.substr(0, colon) + "," + item.substr(colon + 1), "--grid-box");
    ranges.emplace_back(lohi(0), lohi(1));
  }
  if (ranges.size() == 1) ranges.resize(dim, ranges.front());
  if (static_cast<int>(ranges.size()) != dim) {
    throw DimensionError("--grid-box has " + std::to_string(ranges.size()) + " ranges for " + std::to_string(dim) +
                         " coordinates");
  }
  box.lo.resize(dim);
  box.hi.resize(dim);
  for (int j = 0; j < dim; ++j) {
    box.lo(j) = ranges[j].first;
    box.hi(j) = ranges[j].second;
  }
  box.step = step;
  return box;
}

std::string hint_for(const Problem& p) {
  const Classification c = classify(p);
  switch (c.problem_class) {
    case ProblemClass::kSOCP:
      return "hint: try 'transform --rule socp2lp' then simplex";
    case ProblemClass::kGP:
      return "hint: try 'transform --rule gp-log' then newton";
    case ProblemClass::kLP:
      return "hint: simplex applies to this LP";
    default:
      return "hint: try 'transform --rule to-convex', or grid for up to 3 coordinates";
  }
}

void emit(const Report& r, bool json) { std::cout << (json ? r.json() : r.text()); }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

struct Options {
  std::string file;
  bool json = false;
  std::string rule;
  std::string output;
  std::string method;
  std::string grid_box;
  double grid_res = 1e-2;
  double tol = -1.0;
  int max_iter = -1;
  int threads = 1;
  std::string start;
  std::string point;
  std::string multipliers;
  double lambda0 = 1.0;
  double delta = -1.0;
  int samples = 1000;
  std::string param;
  double h = 1e-3;
  double cert_tol = 1e-6;
};

int cmd_classify(const Options& o) {
  const Input in = read_input(o.file);
  Report r("classify", o.file, in.content, sampling_seed());
  r.add_classification(classify(in.problem));
  emit(r, o.json);
  return kOk;
}

int cmd_transform(const Options& o) {
  const Input in = read_input(o.file);
  Report r("transform", o.file, in.content, sampling_seed());
  r.add_classification(classify(in.problem));
  std::vector<TransformResult> steps;
  if (o.rule == "to-convex") {
    steps = to_convex_min(in.problem).steps;
  } else if (o.rule == "dual") {
    steps.push_back(lp_dual(in.problem));
  } else if (o.rule == "eq2ineq") {
    steps.push_back(eq_to_ineq_pair(in.problem));
  } else if (o.rule == "gp-log") {
    steps.push_back(gp_log_transform(in.problem));
  } else if (o.rule == "socp2lp") {
    steps.push_back(socp_to_lp(in.problem));
  } else if (o.rule == "phase1") {
    steps.push_back(phase1_slack(in.problem));
  }
  const Problem& out = steps.empty() ? in.problem : steps.back().transformed;
  write_file(o.output, serialize_problem(out));
  write_file(o.output + ".chain.json", transform_chain_json(steps));
  r.add_transform(o.rule, steps, o.output, classify(out));
  emit(r, o.json);
  return kOk;
}

SolverConfig config_from(const Options& o) {
  SolverConfig cfg;
  if (o.max_iter > 0) cfg.max_iterations = o.max_iter;
  cfg.grid_threads = o.threads;
  if (o.tol > 0) {
    if (o.method == "simplex") cfg.simplex_tol = o.tol;
    if (o.method == "newton") cfg.newton_grad_tol = o.tol;
    if (o.method == "barrier") cfg.barrier_gap = o.tol;
    if (o.method == "grid") cfg.grid_feasibility_tol = o.tol;
  }
  if (!o.start.empty()) cfg.start = parse_vector(o.start, "--start");
  return cfg;
}

int cmd_solve(const Options& o) {
  const Input in = read_input(o.file);
  const Problem& p = in.problem;
  Report r("solve", o.file, in.content, sampling_seed());
  r.add_classification(classify(p));
  const SolverConfig cfg = config_from(o);
  Solution s;
  try {
    if (o.method == "simplex") {
      s = solve_simplex(p, cfg);
    } else if (o.method == "newton") {
      s = solve_newton(p, cfg);
    } else if (o.method == "barrier") {
      s = solve_barrier(p, cfg);
    } else {
      if (o.grid_box.empty()) throw InapplicableError("NotApplicable", "grid needs --grid-box");
      s = solve_grid_oracle(p, parse_box(o.grid_box, o.grid_res, p.dimension()), cfg);
    }
  } catch (const InapplicableError&) {
    g_hint = hint_for(p);
    throw;
  }
  r.add_solution(s);
  if (s.status == SolveStatus::kOptimal && s.multipliers) {
    r.add_kkt(check_kkt(p, *s.point, {1.0, *s.multipliers}, o.cert_tol));
  }
  emit(r, o.json);
  return kOk;
}

int cmd_certify(const Options& o) {
  const Input in = read_input(o.file);
  const Problem& p = in.problem;
  const std::uint64_t seed = sampling_seed();
  Report r("certify", o.file, in.content, seed);
  r.add_classification(classify(p));
  if (!o.point.empty()) {
    const Vec x = parse_vector(o.point, "--point");
    if (x.size() != p.dimension()) {
      throw DimensionError("--point has " + std::to_string(x.size()) + " entries, expected " +
                           std::to_string(p.dimension()));
    }
    try {
      const Vec g = gradient(min_objective(p), x, GradientMode::kAnalytic, 1e-5, p.param_map());
      const double res = g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
      r.add_stationarity(res <= o.cert_tol, res, o.cert_tol);
    } catch (const NondifferentiableError& e) {
      r.add_note(std::string("stationarity skipped: ") + e.what());
    }
    bool unconstrained = p.constraints.empty();
    for (const VariableSpec& v : p.variables) unconstrained = unconstrained && v.domain == VarDomain::kFree;
    if (!o.multipliers.empty() || unconstrained) {
      const Vec lambdas = o.multipliers.empty() ? Vec(0) : parse_vector(o.multipliers, "--multipliers");
      r.add_kkt(check_kkt(p, x, {o.lambda0, lambdas}, o.cert_tol));
    }
    if (o.delta > 0) r.add_local_optimum(check_local_optimum(p, x, o.delta, o.samples, seed), o.delta, o.samples);
  } else if (o.delta > 0 || !o.multipliers.empty()) {
    throw UsageError("--delta and --multipliers need --point");
  }
  if (!o.param.empty()) {
    std::string name = o.param;
    double r0 = 0.0;
    bool have_value = false;
    if (const auto eq = name.find('='); eq != std::string::npos) {
      r0 = parse_vector(name.substr(eq + 1), "--param")(0);
      name = name.substr(0, eq);
      have_value = true;
    }
    if (!have_value) {
      for (const auto& [pn, pv] : p.parameters) {
        if (pn == name) r0 = pv;
      }
    }
    SolverConfig cfg;
    r.add_envelope(envelope_sensitivity(p, name, r0, o.h, cfg));
  }
  emit(r, o.json);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classify, transform, solve and certify small optimization problems"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);
  Options o;

  auto* classify_cmd = app.add_subcommand("classify", "print class, convexity and ontology chain");
  classify_cmd->add_option("file", o.file, "problem file (.optproblem.json)")->required();
  classify_cmd->add_flag("--json", o.json, "JSON report");

  auto* transform_cmd = app.add_subcommand("transform", "apply a certified rewrite");
  transform_cmd->add_option("file", o.file, "problem file")->required();
  transform_cmd->add_option("--rule", o.rule, "rewrite rule")
      ->required()
      ->check(CLI::IsMember({"dual", "eq2ineq", "gp-log", "socp2lp", "phase1", "to-convex"}));
  transform_cmd->add_option("-o,--output", o.output, "output problem file")->required();
  transform_cmd->add_flag("--json", o.json, "JSON report");

  auto* solve_cmd = app.add_subcommand("solve", "solve with one of the built-in methods");
  solve_cmd->add_option("file", o.file, "problem file")->required();
  solve_cmd->add_option("--method", o.method, "solver")
      ->required()
      ->check(CLI::IsMember({"simplex", "newton", "barrier", "grid"}));
  solve_cmd->add_option("--grid-box", o.grid_box, "lo:hi per coordinate, comma separated (one range broadcasts)");
  solve_cmd->add_option("--grid-res", o.grid_res, "grid step")->capture_default_str();
  solve_cmd->add_option("--tol", o.tol, "main tolerance of the chosen method");
  solve_cmd->add_option("--max-iter", o.max_iter, "iteration cap");
  solve_cmd->add_option("--start", o.start, "newton start point, comma separated");
  solve_cmd->add_option("--threads", o.threads, "grid worker threads")->capture_default_str();
  solve_cmd->add_flag("--json", o.json, "JSON report");

  auto* certify_cmd = app.add_subcommand("certify", "check optimality conditions at a point");
  certify_cmd->set_help_flag("--help", "print this help message and exit");
  certify_cmd->add_option("file", o.file, "problem file")->required();
  certify_cmd->add_option("--point", o.point, "candidate point, comma separated");
  certify_cmd->add_option("--multipliers", o.multipliers, "lambda_1..lambda_m, comma separated");
  certify_cmd->add_option("--lambda0", o.lambda0, "objective multiplier")->capture_default_str();
  certify_cmd->add_option("--delta", o.delta, "radius of the local-optimum ball");
  certify_cmd->add_option("--samples", o.samples, "local-optimum samples")->capture_default_str();
  certify_cmd->add_option("--param", o.param, "parameter for the envelope check, name or name=value");
  certify_cmd->add_option("--h", o.h, "envelope finite-difference step")->capture_default_str();
  certify_cmd->add_option("--tol", o.cert_tol, "certificate tolerance")->capture_default_str();
  certify_cmd->add_flag("--json", o.json, "JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParse;
  }

  try {
    if (*classify_cmd) return cmd_classify(o);
    if (*transform_cmd) return cmd_transform(o);
    if (*solve_cmd) return cmd_solve(o);
    return cmd_certify(o);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const ValidationError& e) {
    std::cerr << "error:";
    for (const std::string& code : e.codes()) std::cerr << " " << code;
    std::cerr << ": " << e.what() << "\n";
    return kValidation;
  } catch (const InapplicableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (!g_hint.empty()) std::cerr << g_hint << "\n";
    return kInapplicable;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
}
