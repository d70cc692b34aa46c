#pragma once

#include <stdexcept>
#include <string>

namespace issf {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scenario document is not syntactically valid JSON / wrong types.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Scenario content violates a structural constraint (dangling reference,
// missing goal or landing node, cost ordering, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// An id or index that does not exist in the graph universe. Distinct from
// in-game invalidity, which is a penalized no-op rather than an error.
class UnknownIdError : public Error {
 public:
  using Error::Error;
};

// Model/graph shape disagreement (encoder or action indexer cannot apply).
class ShapeMismatchError : public Error {
 public:
  using Error::Error;
};

class RoleMismatchError : public Error {
 public:
  using Error::Error;
};

// No valid action to select from; callers substitute a no-op.
class EmptyMaskError : public Error {
 public:
  using Error::Error;
};

// Training a defender requires a real attacker adversary.
class AdversaryRequiredError : public Error {
 public:
  using Error::Error;
};

class PoolError : public Error {
 public:
  using Error::Error;
};

class DuplicateIdError : public PoolError {
 public:
  using PoolError::PoolError;
};

class LineageError : public PoolError {
 public:
  using PoolError::PoolError;
};

class HashMismatchError : public PoolError {
 public:
  using PoolError::PoolError;
};

class NotFoundError : public PoolError {
 public:
  using PoolError::PoolError;
};

class CorruptBlobError : public PoolError {
 public:
  using PoolError::PoolError;
};

// Training plan problems: unknown references or unresolvable ordering.
class PlanError : public Error {
 public:
  using Error::Error;
};

class InsufficientServicesError : public Error {
 public:
  using Error::Error;
};

}  // namespace issf
