#pragma once

#include <stdexcept>
#include <string>

namespace permclass {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact enumeration was asked for a matrix above the configured size cap.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

/// A ratio or normalization has no well-defined value for this configuration
/// (zero denominators, vanishing cyclic products, all-zero class weights).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. The message carries the path and line number.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace permclass
