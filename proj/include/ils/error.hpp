#pragma once

#include <stdexcept>
#include <string>

namespace ils {

/// Base for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or value outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class RankDeficientError : public Error {
public:
    using Error::Error;
};

/// An exact integer quantity (entry of a unimodular matrix) left the int64 range.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// An enumeration visited more nodes than its configured cap.
class BudgetExceededError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace ils
