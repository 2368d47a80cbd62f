#pragma once

#include <stdexcept>
#include <string>

namespace conflate {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A distribution spec violates a family constraint (bad parameter,
// non-normalizable table, ...).
struct ValidationError : Error {
    using Error::Error;
};

// An operation was called with arguments outside its contract.
struct ArgumentError : Error {
    using Error::Error;
};

// The requested object does not exist mathematically: discrete inputs with
// no common atom, disjoint supports, zero dyadic mass.  The CLI maps this
// to exit code 2.
struct IncompatibilityError : Error {
    using Error::Error;
};

// Rejection sampling hit its proposal cap without enough acceptances.
struct SamplingError : Error {
    using Error::Error;
};

}  // namespace conflate
