#pragma once

#include <stdexcept>
#include <string>

namespace tpsim {

/// Invalid configuration value; `field()` is the dotted path of the offender.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  [[nodiscard]] const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace tpsim
