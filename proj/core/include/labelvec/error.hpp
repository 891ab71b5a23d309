#pragma once

#include <stdexcept>
#include <string>

namespace labelvec {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable files, malformed records, bad arguments.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Data that is well-formed but inconsistent: duplicate ids, unknown
/// classes, count mismatches against a manifest.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Degenerate numeric situations: zero vectors, rank deficiency, empty
/// candidate sets.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace labelvec
