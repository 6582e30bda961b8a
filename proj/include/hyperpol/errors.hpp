#pragma once

#include <stdexcept>
#include <string>

namespace hyperpol {

/// Invalid or unreadable run configuration. Carries the offending key path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key_path, const std::string& what)
      : std::runtime_error(key_path.empty() ? what : key_path + ": " + what),
        key_path_(std::move(key_path)) {}

  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

/// A numerical procedure could not produce a trustworthy result
/// (integrator step failure, unsolvable calibration, singular formula).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hyperpol
