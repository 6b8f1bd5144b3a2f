#pragma once
/// Exception taxonomy shared by every module.

#include <stdexcept>
#include <string>

namespace umet {

/// Base class of all library errors.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-domain input: bad sizes, non-finite entries,
/// unknown formats, values outside the documented domain.
class input_error : public error {
 public:
  using error::error;
};

/// A documented operation precondition does not hold for these arguments.
class precondition_error : public error {
 public:
  using error::error;
};

/// A computation reached an inconsistent internal state, e.g. a partially
/// attached point whose fixed prefix already violates a constraint.
class state_error : public error {
 public:
  using error::error;
};

/// The request exceeds a built-in capability limit (enumeration caps,
/// blow-up guards); the message suggests the supported alternative.
class capability_error : public error {
 public:
  using error::error;
};

/// An inverse problem has no unique answer on this input; the message
/// carries a witness of the ambiguity.
class non_identifiable_error : public error {
 public:
  using error::error;
};

}  // namespace umet
