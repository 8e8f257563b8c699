#pragma once

#include <stdexcept>
#include <string>

namespace driqa {

/// Root of the toolkit's exception hierarchy. Every error the library throws
/// derives from this, so callers can catch one type at the CLI boundary.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing, unreadable or unwritable file.
class IoError : public Error {
 public:
  using Error::Error;
};

/// File contents are not in a supported format or are corrupt.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the operation's domain (bad dims, negative sigma, level out of range).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Data that cannot support the requested fit (constant lists, rank deficiency).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// Iterative solver hit its iteration cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Backend exists in the interface but has no implementation in this toolkit.
class Unsupported : public Error {
 public:
  using Error::Error;
};

}  // namespace driqa
