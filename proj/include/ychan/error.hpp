#pragma once

#include <stdexcept>
#include <string>

namespace ychan {

// Base for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-domain input (negative DoF, bad antenna count, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Allocation was asked to work on a fractional DoF tuple.
class IntegralityError : public Error {
 public:
  using Error::Error;
};

// Caller broke a documented precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

// M < N: zero-forcing pre/post-coders do not exist.
class UnsupportedRegime : public Error {
 public:
  using Error::Error;
};

class NearSingular : public Error {
 public:
  using Error::Error;
};

// Demand needs more sub-channels than the relay has.
class InfeasibleDemand : public Error {
 public:
  InfeasibleDemand(int required, int available)
      : Error("infeasible demand: requires " + std::to_string(required) +
              " sub-channels, relay has " + std::to_string(available)),
        required_(required),
        available_(available) {}

  int required() const { return required_; }
  int available() const { return available_; }

 private:
  int required_;
  int available_;
};

}  // namespace ychan
