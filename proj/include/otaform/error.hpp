#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace otaform {

// Input violates a mathematical precondition (non-stochastic matrix, sigma out of range, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Scenario or generator configuration is unusable. key() names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// A flow interval produced a non-finite state.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(std::size_t instant, std::size_t agent, const std::string& what)
      : std::runtime_error("instant " + std::to_string(instant) + ", agent " +
                           std::to_string(agent) + ": " + what),
        instant_(instant),
        agent_(agent) {}

  std::size_t instant() const noexcept { return instant_; }
  std::size_t agent() const noexcept { return agent_; }

 private:
  std::size_t instant_;
  std::size_t agent_;
};

}  // namespace otaform
