#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fpl/solver.hpp"

namespace fpl {

/**
 * Flat `key = value` configuration with `#` comments.
 *
 * Keys are checked against a fixed vocabulary on insertion; values are kept
 * as text and converted on demand, so every conversion error names its key.
 */
class Config
{
public:
  static Config parse(std::string_view text, const std::string& origin = "<inline>");
  static Config load(const std::filesystem::path& path);

  static const std::vector<std::string>& known_keys();

  /// Throws ConfigError for unknown keys.
  void set(const std::string& key, const std::string& value);
  /// Applies `key=value`.
  void apply_override(std::string_view assignment);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  /// Comma-separated list.
  std::vector<std::string> get_list(const std::string& key) const;

private:
  std::map<std::string, std::string> entries_;
};

/**
 * Builds and validates a problem. Malformed values raise ConfigError naming the
 * key; admissibility failures raise GateViolation. `default_max_exponent` sets
 * the schedule when `n_max_exp` is absent.
 */
ProblemSpec make_problem_spec(const Config& config, int default_max_exponent = 10);

} // namespace fpl
