#pragma once

#include <stdexcept>
#include <string>

namespace pidq {

// Input data fails a representation invariant (negative mass, bad
// normalization, malformed file, out-of-range code).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A call was made with arguments outside the operation's contract.
class ArgumentError : public std::invalid_argument {
 public:
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// The requested constraint set is empty or numerically unreachable
// (e.g. pairwise marginals that no joint distribution can match).
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// A solver product no longer matches the constraints it was solved under.
class StaleSolutionError : public std::runtime_error {
 public:
  explicit StaleSolutionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pidq
