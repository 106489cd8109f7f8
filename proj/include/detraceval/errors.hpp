#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace detraceval {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. line() is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A value violates a type invariant. field() names the offending field.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// An external or built-in tracker could not produce a track set.
class TrackerFailure : public Error {
 public:
  TrackerFailure(const std::string& what, std::string sequence_id, double threshold = 0.0)
      : Error(what), sequence_id_(std::move(sequence_id)), threshold_(threshold) {}
  const std::string& sequence_id() const { return sequence_id_; }
  double threshold() const { return threshold_; }

 private:
  std::string sequence_id_;
  double threshold_;
};

}  // namespace detraceval
