#pragma once

#include <stdexcept>
#include <string>

namespace uqeval {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input file could not be decoded (bad JSON line, missing field, ...).
struct ParseError : Error {
  using Error::Error;
};

// Decoded input violates a record or argument invariant.
struct ValidationError : Error {
  using Error::Error;
};

}  // namespace uqeval
