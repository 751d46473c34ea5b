#pragma once

#include <stdexcept>
#include <string>

namespace mrseql {

/// Base class for every error raised by the library. Command-line tools map
/// it to exit code 1; anything else escaping is treated as an internal error.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file (ragged rows, bad numbers, empty file).
class FormatError : public Error {
public:
    using Error::Error;
};

/// A numeric cell could not be parsed.
class ParseError : public FormatError {
public:
    using FormatError::FormatError;
};

/// Arguments violate an operation's preconditions.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace mrseql
