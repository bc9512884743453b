#pragma once

#include <stdexcept>
#include <string>

namespace effmax {

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: malformed specs, invalid parameters, violated preconditions.
class InputError : public Error
{
  public:
    using Error::Error;
};

/// A numerical solver failed to reach its tolerance.
class SolverError : public Error
{
  public:
    using Error::Error;
};

/// A computed quantity broke an inequality the theory guarantees, beyond the
/// stated tolerance.
class InequalityViolation : public Error
{
  public:
    using Error::Error;
};

}  // namespace effmax
