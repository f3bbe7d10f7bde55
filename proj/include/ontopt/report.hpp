#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ontopt/certificates.hpp"
#include "ontopt/classify.hpp"
#include "ontopt/solvers.hpp"
#include "ontopt/transforms.hpp"

namespace ontopt {

const char* tool_version();

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

/// [{rule, certificate, value_map}, ...] as pretty JSON.
std::string transform_chain_json(const std::vector<TransformResult>& steps);

/// Solution block: {status, point, value, multipliers, iterations, method}.
std::string solution_json(const Solution& s);

/// CLI report. Blocks appear in a fixed order and only when added; the JSON
/// form is byte-stable for identical inputs.
class Report {
 public:
  Report(const std::string& command, const std::string& file, std::string_view content, std::uint64_t seed);
  Report(Report&&) noexcept;
  Report& operator=(Report&&) noexcept;
  ~Report();

  void add_classification(const Classification& c);
  void add_transform(const std::string& rule, const std::vector<TransformResult>& steps, const std::string& output,
                     const Classification& result);
  void add_solution(const Solution& s);
  void add_stationarity(bool stationary, double residual, double tol);
  void add_kkt(const KktReport& k);
  void add_local_optimum(const LocalOptimumReport& r, double delta, int samples);
  void add_envelope(const SensitivityReport& r);
  void add_note(const std::string& note);

  std::string json() const;
  std::string text() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ontopt
