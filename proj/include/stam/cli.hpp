#ifndef STAM_CLI_HPP_
#define STAM_CLI_HPP_

#include "stam/fock.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stam::cli {

/// Bad or missing configuration; what() starts with the field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` document. `#` starts a comment. Numbers use C syntax,
/// complex values are `re im` pairs (a single number is real), lists are
/// whitespace or comma separated, booleans are true/false.
///
/// Every accessor records the value it resolved, defaults included, so the
/// manifest echoes exactly what the run used.
class Config {
 public:
  Config() = default;

  static Config parse(std::istream& is, const std::string& source = "config");
  static Config load(const std::string& path);

  /// Field paths in errors read `<scope>.<key>`.
  void set_scope(std::string scope) { scope_ = std::move(scope); }
  const std::string& scope() const { return scope_; }

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string string(const std::string& key) const;
  std::string string(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  /// Absent or `none` gives nullopt.
  std::optional<double> optional_number(const std::string& key) const;
  int integer(const std::string& key) const;
  int integer(const std::string& key, int fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  Complex complex(const std::string& key) const;
  Complex complex(const std::string& key, Complex fallback) const;
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<int> integers(const std::string& key, const std::vector<int>& fallback) const;

  /// Frequency given in Hz under `key`, returned in rad/s.
  double angular_frequency(const std::string& key) const;
  double angular_frequency(const std::string& key, double fallback_hz) const;

  /// Throws ConfigError naming the first key no accessor has read.
  void reject_unused() const;

  /// Resolved keys in sorted order, same syntax as the input.
  void write_manifest(std::ostream& os) const;
  const std::map<std::string, std::string>& resolved() const { return resolved_; }

 private:
  std::string path(const std::string& key) const;
  const std::string* raw(const std::string& key) const;
  [[noreturn]] void fail(const std::string& key, const std::string& why) const;

  std::string scope_ = "config";
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, std::string> resolved_;
};

struct RunOptions {
  std::optional<int> dim;
  std::optional<int> pulses;
  bool allow_unconverged = false;
};

enum ExitCode { kOk = 0, kAcceptanceFailure = 1, kUsageError = 2, kNumericalFailure = 3 };

/// Artifacts are kept in memory and written once by the caller.
struct RunResult {
  int exit_code = kOk;
  std::map<std::string, std::string> files;
  std::string message;
};

const std::vector<std::string>& experiment_names();

/// Runs one named experiment. Configuration problems come back as
/// kUsageError, propagation failures as kNumericalFailure; in both cases
/// `message` says why.
RunResult run_experiment(const std::string& experiment, Config config, const RunOptions& options = {});

/// Writes every artifact into dir (created if missing).
void write_artifacts(const RunResult& result, const std::string& dir);

}  // namespace stam::cli

#endif  // STAM_CLI_HPP_
