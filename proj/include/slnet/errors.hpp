#pragma once

#include <stdexcept>
#include <string>

namespace slnet {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Tensor/layer shape violations (rank, extent, element-count mismatches).
class ShapeError : public Error {
public:
    using Error::Error;
};

// Bad argument values: labels out of range, invalid fractions, etc.
class ValueError : public Error {
public:
    using Error::Error;
};

// Filesystem-level failures: missing files, unwritable paths.
class IoError : public Error {
public:
    using Error::Error;
};

// Malformed input content: CSV rows, PGM streams, model files, history files.
class FormatError : public Error {
public:
    using Error::Error;
};

// Model file carries an unsupported format version.
class VersionError : public FormatError {
public:
    using FormatError::FormatError;
};

// Model file payload does not match its checksum.
class ChecksumError : public FormatError {
public:
    using FormatError::FormatError;
};

// Numerical breakdown, e.g. non-finite loss during training.
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace slnet
