#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fsmprint {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class UnknownInputSymbol : public Error {
public:
  explicit UnknownInputSymbol(const std::string& symbol)
      : Error("unknown input symbol '" + symbol + "'"), symbol_(symbol) {}
  const std::string& symbol() const noexcept { return symbol_; }

private:
  std::string symbol_;
};

class UnknownState : public Error {
public:
  explicit UnknownState(const std::string& what) : Error("unknown state: " + what) {}
};

class AlphabetMismatch : public Error {
public:
  using Error::Error;
};

class InvalidMachine : public Error {
public:
  using Error::Error;
};

class MutationInapplicable : public Error {
public:
  using Error::Error;
};

class EpsilonCollision : public Error {
public:
  explicit EpsilonCollision(const std::string& epsilon)
      : Error("output symbol '" + epsilon + "' is already used by the machine") {}
};

/// Malformed DOT input. Line and column are 1-based.
class ParseError : public Error {
public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

class NonDeterministicEdge : public ParseError {
public:
  using ParseError::ParseError;
};

class MissingInitial : public ParseError {
public:
  using ParseError::ParseError;
};

class BudgetExhausted : public Error {
public:
  BudgetExhausted() : Error("symbol budget exhausted") {}
};

class RemoteProtocolError : public Error {
public:
  using Error::Error;
};

class ConnectFailure : public Error {
public:
  using Error::Error;
};

/// The SUL answered a query differently than a previously cached answer.
class NonDeterministicResponse : public Error {
public:
  using Error::Error;
};

class NotSimulated : public Error {
public:
  NotSimulated() : Error("operation requires a simulated session with a known ground truth") {}
};

class NotACounterexample : public Error {
public:
  NotACounterexample() : Error("sequence does not distinguish hypothesis and SUL") {}
};

class DuplicateModels : public Error {
public:
  DuplicateModels(std::size_t a, std::size_t b)
      : Error("reference models " + std::to_string(a) + " and " + std::to_string(b) +
              " are equivalent"),
        first_(a), second_(b) {}
  std::size_t first() const noexcept { return first_; }
  std::size_t second() const noexcept { return second_; }

private:
  std::size_t first_;
  std::size_t second_;
};

class MissingGroundTruth : public Error {
public:
  explicit MissingGroundTruth(const std::string& impl)
      : Error("no ground truth for implementation '" + impl + "'") {}
};

class EmptySuite : public Error {
public:
  EmptySuite() : Error("experiment produced no implementations") {}
};

class IoError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace fsmprint
