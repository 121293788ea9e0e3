#ifndef EQODDS_ERRORS_H_
#define EQODDS_ERRORS_H_

#include <stdexcept>
#include <string>

namespace eqodds {

// Error families. The CLI maps each to a documented exit code.

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke a documented precondition (dimension mismatch, stale cache,
// age below the cohort floor, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A metric is not defined for the given input (single class, empty set, zero
// mean for a coefficient of variation).
class UndefinedMetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace eqodds

#endif  // EQODDS_ERRORS_H_
