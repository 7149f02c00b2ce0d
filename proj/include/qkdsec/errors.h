#pragma once

#include <stdexcept>
#include <string>

namespace qkdsec {

/// Input violates a documented precondition (shape, positivity, normalization).
class ValidationError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative routine failed to converge.
class NumericalError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// A requested object would exceed the configured dimension cap.
class ResourceError : public std::length_error {
   public:
    using std::length_error::length_error;
};

/// A report or input file could not be read or written.
class IoError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

}  // namespace qkdsec
