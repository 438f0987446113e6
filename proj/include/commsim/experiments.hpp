#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace commsim::experiments {

/// key=value experiment parameters. Every key must be read by the
/// experiment; leftovers are reported as errors by finish().
class Params {
 public:
  Params() = default;
  /// Parses "key=value" words; throws std::invalid_argument on a malformed word.
  static Params parse(std::span<const std::string> words);
  /// Scalar members of a JSON object, converted to text.
  static Params from_json(const nlohmann::json& object);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  /// Entries of `other` override ours.
  void merge(const Params& other);
  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string text(const std::string& key, const std::string& fallback);
  std::size_t size(const std::string& key, std::size_t fallback);
  double real(const std::string& key, double fallback);

  /// Throws std::invalid_argument naming any key nobody read.
  void finish() const;

  /// Resolved values, defaults included, in the order they were read.
  [[nodiscard]] const nlohmann::json& resolved() const { return resolved_; }

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
  nlohmann::json resolved_ = nlohmann::json::object();
};

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Report {
  std::string experiment;
  nlohmann::json parameters = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  nlohmann::json statistics = nlohmann::json::object();
  std::vector<Check> checks;
  std::vector<std::string> csv_columns;
  std::vector<std::vector<std::string>> csv_rows;
  /// Extra files (name -> contents) written next to the report.
  std::map<std::string, std::string> attachments;

  /// At least one check, and all of them pass.
  [[nodiscard]] bool pass() const;
};

struct RunOptions {
  std::uint64_t seed = 1;
  std::size_t parallel = 1;
};

std::vector<std::string> experiment_ids();
bool is_experiment(std::string_view id);

/// Claim, parameters and pass condition. Throws std::invalid_argument for an
/// unknown id.
std::string describe(std::string_view id);

/// Throws std::invalid_argument for an unknown id or bad parameters.
Report run_experiment(std::string_view id, Params params, const RunOptions& options);

nlohmann::json to_json(const Report& report);
void write_csv(std::ostream& out, const Report& report);
std::string csv_text(const Report& report);

}  // namespace commsim::experiments
