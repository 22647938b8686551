#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace foc {

/// Input outside an operation's domain (invalid order, t < tau, position outside G, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numerical failure inside a solver. Carries the module and grid node where it happened.
class SolverError : public std::runtime_error {
 public:
  SolverError(std::string module, std::size_t node, const std::string& what)
      : std::runtime_error(module + " (node " + std::to_string(node) + "): " + what),
        module_(std::move(module)),
        node_(node) {}

  const std::string& module() const noexcept { return module_; }
  std::size_t node() const noexcept { return node_; }

 private:
  std::string module_;
  std::size_t node_;
};

/// Configuration rejected by the scenario parser; one entry per offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& errors) {
    std::string out;
    for (const auto& e : errors) {
      if (!out.empty()) out += "; ";
      out += e;
    }
    return out;
  }

  std::vector<std::string> errors_;
};

}  // namespace foc
