#pragma once

#include <stdexcept>
#include <string>

namespace treecascade {

// Base of every error thrown by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInputError : public Error {
public:
    using Error::Error;
};

// Combinatorial guard (tree enumeration, brute force) exceeded.
class SizeLimitError : public Error {
public:
    using Error::Error;
};

// Degenerate correlation (|rho| >= 1) or a covariance that is not positive definite.
class SingularityError : public Error {
public:
    using Error::Error;
};

// Operation requires a unit-variance model.
class UnsupportedInputError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Malformed CSV cell/row or model document field.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace treecascade
