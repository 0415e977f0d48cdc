#pragma once

#include <stdexcept>
#include <string>

namespace gsort {

// Argument errors use std::invalid_argument directly; the types below name
// the failure classes callers are expected to tell apart.

/// A query on a vertex pair that is not an edge of the comparability graph.
class ForbiddenComparison : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A parameter value at which a formula degenerates (e.g. p in {0, 1}).
class DegenerateParameter : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An exact enumeration requested above its size cap.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Directed knowledge that would contain a cycle.
class InconsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An algorithm reached a state its correctness argument rules out.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace gsort
