#pragma once

#include <stdexcept>
#include <string>

namespace kslab {

// bad or missing run configuration; `key` names the offending entry ("model.mu")
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// non-finite field value (or similar breakdown) during time stepping
class NumericalAbort : public std::runtime_error {
 public:
  NumericalAbort(long step_index, const std::string& what)
      : std::runtime_error("step " + std::to_string(step_index) + ": " + what),
        step_index_(step_index) {}
  long step_index() const { return step_index_; }

 private:
  long step_index_;
};

// weight construction cannot proceed (tail profile not decaying, march step too coarse, ...)
class ConstructionError : public std::runtime_error {
 public:
  explicit ConstructionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kslab
