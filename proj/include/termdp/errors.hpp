#pragma once

#include <stdexcept>
#include <string>

namespace termdp {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation was called outside its domain: an oracle whose precondition
/// fails, an enumeration over budget, an OPI seed that is not admissible.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Malformed input document (JSON syntax, missing field, wrong type).
class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// A property that the theory guarantees did not hold at runtime. Indicates
/// a bug, never bad input.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace termdp
