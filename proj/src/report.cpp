#include "ontopt/report.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <iomanip>
#include <sstream>

#include "internal.hpp"

#ifndef ONTOPT_VERSION
#define ONTOPT_VERSION "0.0.0"
#endif

namespace ontopt {

namespace {

Json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return 0.0;
  return v;
}

Json vector(const Vec& v) {
  Json out = Json::array();
  for (long i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

Json classification_json(const Classification& c) {
  Json out;
  out["class"] = class_name(c.problem_class);
  out["convexity"] = convexity_name(c.convexity);
  out["verdict"] = verdict_summary(c);
  out["chain_summary"] = chain_summary(c);
  Json chain = Json::array();
  for (const ChainLink& link : c.chain) chain.push_back({{"node", link.node}, {"justification", link.justification}});
  out["chain"] = std::move(chain);
  out["flags"] = c.flags;
  if (c.evidence.min_eigenvalue) out["min_eigenvalue"] = number(*c.evidence.min_eigenvalue);
  if (c.evidence.chord_witness) {
    out["chord_witness"] = {vector(c.evidence.chord_witness->first), vector(c.evidence.chord_witness->second)};
  }
  return out;
}

Json chain_steps(const std::vector<TransformResult>& steps) {
  Json out = Json::array();
  for (const TransformResult& s : steps) {
    out.push_back({{"rule", s.rule}, {"certificate", s.certificate}, {"value_map", s.value_map.describe()}});
  }
  return out;
}

Json solution_block(const Solution& s) {
  Json out;
  out["status"] = status_name(s.status);
  out["point"] = s.point ? vector(*s.point) : Json(nullptr);
  out["value"] = number(s.value);
  out["multipliers"] = s.multipliers ? vector(*s.multipliers) : Json(nullptr);
  out["iterations"] = s.iterations;
  out["method"] = s.method;
  return out;
}

void render(std::ostringstream& out, const Json& j, const std::string& indent) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const Json& v = it.value();
    if (v.is_object()) {
      out << indent << it.key() << ":\n";
      render(out, v, indent + "  ");
    } else if (v.is_array() && !v.empty() && v.front().is_object()) {
      out << indent << it.key() << ":\n";
      for (const Json& item : v) {
        std::string line;
        for (auto f = item.begin(); f != item.end(); ++f) {
          if (!line.empty()) line += "  ";
          line += f.value().is_string() ? f.value().get<std::string>() : f.value().dump();
        }
        out << indent << "  " << line << "\n";
      }
    } else {
      out << indent << it.key() << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    }
  }
}

}  // namespace

const char* tool_version() { return ONTOPT_VERSION; }

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

std::string transform_chain_json(const std::vector<TransformResult>& steps) { return chain_steps(steps).dump(2) + "\n"; }

std::string solution_json(const Solution& s) { return solution_block(s).dump(2) + "\n"; }

struct Report::Impl {
  Json doc;
  Json certificate = Json::object();
};

Report::Report(const std::string& command, const std::string& file, std::string_view content, std::uint64_t seed)
    : impl_(std::make_unique<Impl>()) {
  Json& d = impl_->doc;
  d["tool"] = "ontopt";
  d["version"] = tool_version();
  d["command"] = command;
  d["input"] = {{"file", file}, {"sha256", sha256_hex(content)}};
  d["seed"] = seed;
}

Report::Report(Report&&) noexcept = default;
Report& Report::operator=(Report&&) noexcept = default;
Report::~Report() = default;

void Report::add_classification(const Classification& c) { impl_->doc["classification"] = classification_json(c); }

void Report::add_transform(const std::string& rule, const std::vector<TransformResult>& steps, const std::string& output,
                           const Classification& result) {
  Json t;
  t["rule"] = rule;
  t["steps"] = chain_steps(steps);
  t["output"] = output;
  t["result_class"] = class_name(result.problem_class);
  t["result_convexity"] = convexity_name(result.convexity);
  impl_->doc["transform"] = std::move(t);
}

void Report::add_solution(const Solution& s) { impl_->doc["solution"] = solution_block(s); }

void Report::add_stationarity(bool stationary, double residual, double tol) {
  impl_->certificate["stationarity"] = {{"stationary", stationary}, {"gradient_inf_norm", number(residual)}, {"tol", tol}};
}

void Report::add_kkt(const KktReport& k) {
  Json j;
  j["stationarity_residual"] = number(k.stationarity_residual);
  j["multiplier_signs_ok"] = k.multiplier_signs_ok;
  j["complementary_slackness_residual"] = number(k.complementary_slackness_residual);
  j["primal_violation"] = number(k.primal_violation);
  j["lambda0"] = number(k.lambda0);
  j["strictly_feasible_point"] = k.strictly_feasible_point;
  j["verdict"] = k.accepted ? "accept" : "reject";
  if (!k.accepted) j["failed_clause"] = k.failed_clause;
  impl_->certificate["kkt"] = std::move(j);
}

void Report::add_local_optimum(const LocalOptimumReport& r, double delta, int samples) {
  Json j;
  j["delta"] = delta;
  j["samples"] = samples;
  j["feasible_samples"] = r.feasible_samples;
  j["value"] = number(r.value);
  j["verdict"] = r.refuted ? "refuted" : "consistent";
  if (r.witness) {
    j["witness"] = vector(*r.witness);
    j["witness_value"] = number(r.witness_value);
  }
  impl_->certificate["local_optimum"] = std::move(j);
}

void Report::add_envelope(const SensitivityReport& r) {
  Json j;
  j["parameter"] = r.parameter;
  j["r0"] = r.r0;
  j["h"] = r.h;
  j["lhs"] = number(r.lhs);
  j["rhs"] = number(r.rhs);
  j["discrepancy"] = number(r.discrepancy);
  j["x_star"] = vector(r.x_star);
  j["multipliers"] = vector(r.lambdas);
  impl_->certificate["envelope"] = std::move(j);
}

void Report::add_note(const std::string& note) { impl_->doc["notes"].push_back(note); }

std::string Report::json() const {
  const Json& d = impl_->doc;
  Json ordered;
  for (const char* key : {"tool", "version", "command", "input", "seed", "classification", "transform", "solution"}) {
    if (d.contains(key)) ordered[key] = d[key];
  }
  if (!impl_->certificate.empty()) ordered["certificate"] = impl_->certificate;
  if (d.contains("notes")) ordered["notes"] = d["notes"];
  return ordered.dump(2) + "\n";
}

std::string Report::text() const {
  std::ostringstream out;
  render(out, Json::parse(json()), "");
  return out.str();
}

}  // namespace ontopt
