#pragma once

#include <stdexcept>
#include <string>

namespace algomc {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller violated a documented precondition (overlapping node sets,
// dimension mismatch, empty argument, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A node label that the graph does not declare.
class UnknownNodeError : public PreconditionError {
 public:
  explicit UnknownNodeError(const std::string& label)
      : PreconditionError("unknown node label '" + label + "'"), label_(label) {}

  const std::string& label() const noexcept { return label_; }

 private:
  std::string label_;
};

// Input parsing / file format problems.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace algomc
