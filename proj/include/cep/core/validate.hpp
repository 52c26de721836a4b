#pragma once

#include <string>
#include <vector>

#include "cep/core/system_case.hpp"

namespace cep {

struct Violation {
  std::string code;     // stable machine key, e.g. "recourse"
  std::string message;  // human readable, names the offending item

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(const std::string& code) const;
  std::string summary() const;

  bool operator==(const ValidationReport&) const = default;
};

// Checks structural consistency and the recourse guard that keeps every
// operational subproblem feasible for any investment proposal. Pure.
ValidationReport validate_case(const SystemCase& sc);

}  // namespace cep
