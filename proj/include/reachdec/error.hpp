#pragma once

#include <stdexcept>
#include <string>

namespace reachdec {

/// Error raised by every module. `module` and `kind` are short machine-readable
/// tags; the CLI prints them as `error:<module>:<kind>: <message>`.
class Error : public std::runtime_error {
 public:
  Error(std::string module, std::string kind, const std::string& message)
      : std::runtime_error(message), module_(std::move(module)), kind_(std::move(kind)) {}

  const std::string& module() const noexcept { return module_; }
  const std::string& kind() const noexcept { return kind_; }

  /// True for failures caused by arithmetic rather than by malformed input.
  bool is_numerical() const noexcept {
    return kind_ == "nonfinite" || kind_ == "nonconvergence" || kind_ == "degenerate" ||
           kind_ == "unbounded" || kind_ == "containment";
  }

 private:
  std::string module_;
  std::string kind_;
};

}  // namespace reachdec
