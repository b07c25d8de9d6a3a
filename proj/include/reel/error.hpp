#pragma once

#include <stdexcept>

namespace reel {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class OutOfBoundsError : public Error {
public:
  using Error::Error;
};

/// Inputs to a movie operation break the contiguity/ordering invariants.
class ConsistencyError : public Error {
public:
  using Error::Error;
};

class PatchError : public Error {
public:
  using Error::Error;
};

} // namespace reel
