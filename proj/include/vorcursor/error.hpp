#pragma once

#include <stdexcept>
#include <string>

namespace vorcursor {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration value or violated domain precondition.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed file contents (PGM header, run file, config file).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure; carries the offending path in the message.
class IoError : public Error {
public:
    using Error::Error;
};

/// Geometry that cannot be rendered or measured (collapsed ellipse, black frame).
class DegenerateError : public Error {
public:
    using Error::Error;
};

class NoPupilFound : public Error {
public:
    NoPupilFound() : Error("no pupil candidate survived the size and circularity filters") {}
};

}  // namespace vorcursor
