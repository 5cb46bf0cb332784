#pragma once

#include <stdexcept>
#include <string>

namespace gridsight {

/// Base class for all gridsight errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A parameter violated an operation's precondition (bad ordering, even
/// kernel size, even facade point count, ...).
class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

/// Two rasters/masks that must share dimensions do not.
class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

/// The input is structurally valid but carries no usable signal
/// (single-bin histogram, zero-variance feature matrix, all-zero
/// spectrum, coincident segment endpoints).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// No candidates remain (e.g. every subband coefficient suppressed).
class ExhaustedError : public Error {
public:
    using Error::Error;
};

/// A geometric construction has no solution in the frame.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// A sensor reading is outside the device's measuring range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Training diverged (non-finite loss).
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Invalid or inconsistent pipeline configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// File I/O failures, split by cause so callers can react differently.
class IoError : public Error {
public:
    using Error::Error;
};

class MissingFileError : public IoError {
public:
    using IoError::IoError;
};

class UnsupportedFormatError : public IoError {
public:
    using IoError::IoError;
};

class MalformedHeaderError : public IoError {
public:
    using IoError::IoError;
};

} // namespace gridsight
