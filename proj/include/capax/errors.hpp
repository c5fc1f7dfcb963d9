#pragma once

#include <stdexcept>
#include <string>

namespace capax {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller passed a value outside an operation's precondition.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// A model or run configuration is structurally unusable.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A numerical evaluation produced a non-finite or otherwise unusable value.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Pruning or updating left a measure without any mass.
class DegenerateMeasureError : public Error {
public:
    using Error::Error;
};

/// The solver could not carry out a step (e.g. multiplier bracket exhausted).
class SolverError : public Error {
public:
    using Error::Error;
};

/// An oracle search had nothing to search over.
class OracleError : public Error {
public:
    using Error::Error;
};

}  // namespace capax
