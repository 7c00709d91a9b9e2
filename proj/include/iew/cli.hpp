#pragma once

// Batch front-end: strict JSON problem configs, dispatch to the solvers, and
// deterministic CSV / JSON artifacts.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "iew/errors.hpp"
#include "iew/types.hpp"

namespace iew::cli {

inline constexpr const char* version = "0.1.0";

using Json = nlohmann::ordered_json;

/// Schema violation; what() carries the offending field path.
class ConfigError : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};

/// Read-only view of a JSON object that records which keys were consumed so
/// unknown keys can be rejected after parsing.
class Fields {
 public:
  Fields(const Json& object, std::string path);

  const std::string& path() const { return path_; }
  bool has(const std::string& key) const;
  const Json& raw(const std::string& key);

  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  int integer(const std::string& key);
  int integer(const std::string& key, int fallback);
  std::string string(const std::string& key);
  std::string string(const std::string& key, const std::string& fallback);
  bool boolean(const std::string& key, bool fallback);
  cplx complex(const std::string& key, cplx fallback);
  Vec3 vec3(const std::string& key, const Vec3& fallback);
  std::vector<double> numbers(const std::string& key);
  Fields object(const std::string& key);

  /// Throws ConfigError naming the first key that was never read.
  void finish() const;

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const Json* json_;
  std::string path_;
  std::set<std::string> used_;
};

/// Sum of catalog terms c x^p, c cos(w x), c sin(w x), c exp(r x),
/// c cosh(w x), c sinh(w x) with analytic derivatives.
class FunctionSpec {
 public:
  struct Term {
    std::string name;
    cplx c = 1.0;
    double p = 0.0;  ///< power, frequency or rate depending on name
  };

  static FunctionSpec parse(const Json& value, const std::string& path);

  cplx operator()(double x) const { return eval(x, 0); }
  /// order-th derivative, order <= 2
  cplx eval(double x, int order) const;
  ComplexFunction function() const;
  RealFunction real_part(int order = 0) const;
  bool real_valued() const;
  const std::vector<Term>& terms() const { return terms_; }

 private:
  std::vector<Term> terms_;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  std::string to_csv() const;
};

/// Result of one solver dispatch.
struct Outcome {
  Table table;
  Json diagnostics = Json::object();
  bool failed = false;  ///< solver-reported failure, exit code 2
  std::string message;
};

struct ProblemConfig {
  std::string kind;
  Json document;  ///< the parsed config, echoed into the report
};

ProblemConfig parse_config(const std::string& text);
ProblemConfig load_config(const std::filesystem::path& path);

/// Runs one problem. The seed overrides any seed in the config.
Outcome run_problem(const ProblemConfig& config, std::optional<std::uint64_t> seed);

/// Runs the parameter ladder declared under "study".
Outcome run_study(const ProblemConfig& config);

/// Entry points used by the executable; return the process exit code.
int run_command(const std::filesystem::path& config, const std::filesystem::path& out,
                std::optional<std::uint64_t> seed);
int study_command(const std::filesystem::path& config, const std::filesystem::path& out);

}  // namespace iew::cli
