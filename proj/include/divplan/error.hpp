#pragma once

#include <stdexcept>
#include <string>

namespace divplan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class CardinalityMismatch : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

/// The Markov chain induced by a policy has more than one recurrent class.
class MultichainError : public Error {
public:
    using Error::Error;
};

class FloorInfeasible : public Error {
public:
    using Error::Error;
};

/// A linear program did not reach an optimal vertex.
class LpFailure : public Error {
public:
    using Error::Error;
};

class InitializationError : public Error {
public:
    using Error::Error;
};

class ProjectionFailure : public Error {
public:
    using Error::Error;
};

class GenerationFailure : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace divplan
