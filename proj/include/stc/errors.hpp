#pragma once

#include <stdexcept>
#include <string>

namespace stc {

/// Caller broke a documented precondition (dimension mismatch, bad argument order).
class ContractViolation : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Argument lies outside the domain the model or certificate is valid on.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Malformed or inconsistent configuration (JSON scenario, estimator options).
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Statistic requested from too little data.
class StatisticsError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Integration produced a non-finite state.
class DivergenceError : public std::runtime_error {
  public:
    DivergenceError(const std::string& what, double time) : std::runtime_error(what), time_(time) {}

    [[nodiscard]] double time() const noexcept { return time_; }

  private:
    double time_;
};

}  // namespace stc
