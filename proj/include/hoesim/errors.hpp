#pragma once

#include <stdexcept>
#include <string>

namespace hoesim {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// Invalid numeric input (non-positive length, out-of-range angle, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string &msg) : Error(msg) {}
};

// Mathematically degenerate configuration (e.g. object at the focal point).
class DegenerateError : public Error {
public:
    explicit DegenerateError(const std::string &msg) : Error(msg) {}
};

// Mismatched grid shapes or incompatible field metadata.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string &msg) : Error(msg) {}
};

// File/format problems (bad magic, truncated payload, unreadable image).
class IoError : public Error {
public:
    explicit IoError(const std::string &msg) : Error(msg) {}
};

// Configuration file problems; carries the offending line when known.
class ConfigError : public Error {
public:
    ConfigError(const std::string &file, int line, const std::string &msg)
        : Error(file + ":" + std::to_string(line) + ": " + msg), line_(line) {}
    explicit ConfigError(const std::string &msg) : Error(msg), line_(0) {}
    int line() const { return line_; }

private:
    int line_;
};

} // namespace hoesim
