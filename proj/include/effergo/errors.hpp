#pragma once

#include <stdexcept>
#include <string>

namespace effergo {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A hypothesis of a construction does not hold (e.g. measure(a) > r, r >= 1).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A fuel, depth, word-count or search budget ran out before the result was found.
class BudgetError : public Error {
public:
    using Error::Error;
};

/// Malformed or schema-violating external input (JSON descriptors, words, fractions).
class SchemaError : public Error {
public:
    using Error::Error;
};

} // namespace effergo
