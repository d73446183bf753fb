#pragma once

#include <stdexcept>
#include <string>

namespace anmf {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Shape mismatch between operands. Raised eagerly at operation entry.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid solver or experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Non-finite values produced during iteration.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Term or entry index out of range.
class IndexError : public Error {
public:
    using Error::Error;
};

/// Invalid attribute mask (e.g. nothing observed) or mask generation failure.
class MaskError : public Error {
public:
    using Error::Error;
};

/// Malformed input file (bad number, ragged row, ...).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Filesystem problem (missing file, unwritable output).
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace anmf
