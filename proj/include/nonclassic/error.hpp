#pragma once

#include <stdexcept>
#include <string>

namespace nonclassic {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Bad caller input: out-of-range indices, nonfinite parameters, mismatched cutoffs.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

// The Fock truncation is too small for the requested state or evolution.
class CutoffError : public Error {
public:
  using Error::Error;
};

// Internal numerical failure (should not happen for valid inputs).
class NumericalError : public Error {
public:
  using Error::Error;
};

} // namespace nonclassic
