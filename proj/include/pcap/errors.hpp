#pragma once

#include <stdexcept>
#include <string>

namespace pcap {

/// Base class for all library errors that are not plain precondition
/// violations (those use std::invalid_argument directly).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input file; carries the 1-based line where parsing failed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(what + " (line " + std::to_string(line) + ")"), line(line) {}
  int line;
};

/// Structurally valid file with inadmissible data (nonpositive weight,
/// duplicate edge, unknown vertex, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The closure of a requested domain is not connected.
class DomainDisconnectedError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver ran out of iterations; carries the best iterate's
/// value and residual so callers can decide what to do with it.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_value, double residual,
                   int iterations)
      : Error(what), best_value(best_value), residual(residual),
        iterations(iterations) {}
  double best_value;
  double residual;
  int iterations;
};

/// An exhaustive enumeration would exceed the configured cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

}  // namespace pcap
