#pragma once

#include <stdexcept>
#include <string>

namespace ott {

// Base for every error raised by the library. Callers that only care about
// "something went wrong" catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad case file, inconsistent vectors, violated preconditions.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// The switched-on subgraph does not span all buses.
class Disconnected : public Error {
 public:
  Disconnected() : Error("disconnected") {}
  explicit Disconnected(const std::string& what) : Error(what) {}
};

// Generation and load do not balance for a DC flow solve.
class PowerImbalance : public Error {
 public:
  explicit PowerImbalance(const std::string& what) : Error(what) {}
};

// A requested exhaustive enumeration exceeds its configured cap.
class EnumerationTooLarge : public Error {
 public:
  explicit EnumerationTooLarge(const std::string& what) : Error(what) {}
};

// The simplex engine lost numerical control (singular basis, iteration cap).
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(what) {}
};

}  // namespace ott
