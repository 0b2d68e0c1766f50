#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace resv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed trace input. `line` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A schedule fails to cover demand at `slot` (1-based).
class InfeasibleSchedule : public Error {
 public:
  explicit InfeasibleSchedule(std::size_t slot)
      : Error("schedule does not cover demand at slot " + std::to_string(slot)), slot_(slot) {}

  std::size_t slot() const noexcept { return slot_; }

 private:
  std::size_t slot_;
};

// Offline solver refused an instance whose search space exceeds its budget.
class Intractable : public Error {
 public:
  using Error::Error;
};

// Discount of 1: a reservation can never pay for itself.
class NoReservationRegime : public Error {
 public:
  NoReservationRegime() : Error("discount is 1; reservations are never justified") {}
};

class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace resv
