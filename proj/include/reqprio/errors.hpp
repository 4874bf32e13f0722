#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace reqprio {

/// A single finding from validation. `location` is a path into the input
/// document (e.g. "/dependencies/2/depends_on"), or empty when not applicable.
struct Issue {
  std::string location;
  std::string message;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a structural invariant (duplicate id, dangling reference...).
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Issue> issues);
  ValidationError(std::string location, std::string message);

  const std::vector<Issue>& issues() const noexcept { return issues_; }

 private:
  std::vector<Issue> issues_;
};

/// Hard (non-retractable) constraints contain a cycle.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(std::vector<std::string> cycle);

  /// Requirement ids along the cycle; the last one precedes the first.
  const std::vector<std::string>& cycle() const noexcept { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

/// Operation not allowed in the current session state.
class StateError : public Error {
 public:
  using Error::Error;
};

/// Malformed document syntax.
class ParseError : public Error {
 public:
  using Error::Error;
};

class UnsupportedVersionError : public Error {
 public:
  using Error::Error;
};

}  // namespace reqprio
