#pragma once

#include <stdexcept>
#include <string>

namespace newstopics {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Input data does not satisfy what an operation needs (empty vocabulary,
/// no reference corpus, zero variance, ...).
class DataError : public Error {
public:
    using Error::Error;
};

/// Non-finite values appeared during model fitting.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, std::size_t update)
        : Error(what + " (update " + std::to_string(update) + ")"), update_(update) {}

    std::size_t update() const noexcept { return update_; }

private:
    std::size_t update_;
};

}  // namespace newstopics
