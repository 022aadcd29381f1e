#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fpl {

/// Malformed input: wrong dimensions, bad indices, out-of-range arguments.
class InputError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// An operation evaluated outside the set where it is defined.
class DomainError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

/// A configuration file or tag that cannot be parsed. `key` names the offending entry.
class ConfigError : public std::runtime_error
{
public:
  ConfigError(std::string key, const std::string& what)
    : std::runtime_error(what), key_(std::move(key))
  {}

  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

/// A parameter combination rejected by an admissibility gate (p-range, weight range, data sign).
class GateViolation : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// An iterative method stopped without meeting its tolerance. Carries the last iterate.
class ConvergenceFailure : public std::runtime_error
{
public:
  ConvergenceFailure(const std::string& what, std::vector<double> last_iterate, double residual)
    : std::runtime_error(what), last_iterate_(std::move(last_iterate)), residual_(residual)
  {}

  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
  double residual() const noexcept { return residual_; }

private:
  std::vector<double> last_iterate_;
  double residual_;
};

} // namespace fpl
