#pragma once

#include <stdexcept>
#include <string>

namespace sfk {

/// Base class of every domain error raised by the library. The CLI maps
/// these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

/// Image whose DC power is too small to normalize by (e.g. all black).
class DegenerateImageError : public Error {
public:
    using Error::Error;
};

class TrainingError : public Error {
public:
    using Error::Error;
};

class ModelIntegrityError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace sfk
