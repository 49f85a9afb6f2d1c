#pragma once

#include <stdexcept>
#include <string>

namespace leolat {

// Input outside a model's valid band, or an infeasible problem. CLI exit code 1.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed text input (CSV, config, TLE). CLI exit code 2.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace leolat
