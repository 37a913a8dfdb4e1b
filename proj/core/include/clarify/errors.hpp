#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace clarify {

// Base for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated operation precondition (bad argument).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Invalid or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The attribute space cannot supply the requested number of distinct scenes.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t token_index)
      : Error(what), token_index_(token_index) {}
  std::size_t token_index() const noexcept { return token_index_; }

 private:
  std::size_t token_index_;
};

// A question mentions a word the world vocabulary cannot interpret.
class SemanticGapError : public Error {
 public:
  using Error::Error;
};

// Every scene received zero posterior mass.
class ContradictionError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, int epoch) : Error(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

// Out-of-order or malformed interaction with a live game session.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// An answer outside the pending question's answer space.
class InvalidAnswerError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

// A submission reusing an idempotency token already consumed.
class DuplicateSubmissionError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace clarify
