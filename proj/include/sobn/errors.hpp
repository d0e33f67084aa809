#pragma once

#include <stdexcept>
#include <string>

namespace sobn {

// Document-level failure. `line`/`column` are 1-based token positions where
// they make sense; 0 means "not tied to a position" (semantic errors found
// after tokenizing).
class ParseError : public std::runtime_error {
 public:
  enum class Kind {
    Syntax,             // malformed line, bad token, wrong arity
    UnknownField,       // directive or key the format does not define
    DuplicateVariable,  // variable declared twice
    UnknownParent,      // parents line references an undeclared variable
    Domain,             // out-of-domain value (negative probability, alpha <= 0)
    RowSum,             // concrete table row does not sum to 1
    MissingRow,         // table lacks a parent configuration
    Cycle,              // edge set has a directed cycle
  };

  ParseError(Kind kind, int line, int column, const std::string& message);

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  Kind kind_;
  int line_;
  int column_;
};

const char* to_string(ParseError::Kind kind);

// Evidence assignment with probability zero under the model at hand.
class InconsistentEvidenceError : public std::runtime_error {
 public:
  explicit InconsistentEvidenceError(const std::string& message)
      : std::runtime_error(message) {}
};

// Request whose exact answer would exceed the enumeration/compilation guard.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& message)
      : std::runtime_error(message) {}
};

}  // namespace sobn
