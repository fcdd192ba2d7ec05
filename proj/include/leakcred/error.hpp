#pragma once

#include <stdexcept>
#include <string>

namespace leakcred {

/// Base for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file or record.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A precondition on an operation's arguments was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Another process holds the ledger lock.
class BusyError : public Error {
public:
    using Error::Error;
};

}  // namespace leakcred
