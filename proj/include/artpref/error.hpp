#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace artpref {

/// Broad failure class; the CLI maps it onto its exit code.
enum class ErrorKind {
    Usage,  // bad configuration or arguments
    Data,   // malformed or insufficient input data
    Io,     // file system failures
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Malformed input record. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& reason)
        : Error(ErrorKind::Data,
                line == 0 ? reason : "line " + std::to_string(line) + ": " + reason),
          line_(line),
          reason_(reason) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::size_t line_;
    std::string reason_;
};

inline Error dataError(const std::string& message) { return {ErrorKind::Data, message}; }
inline Error usageError(const std::string& message) { return {ErrorKind::Usage, message}; }
inline Error ioError(const std::string& message) { return {ErrorKind::Io, message}; }

}  // namespace artpref
