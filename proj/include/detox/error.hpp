#pragma once

#include <stdexcept>
#include <string>

namespace detox {

/// Failure classes; each maps onto one CLI exit code.
enum class ErrorKind {
    io = 2,
    data = 3,
    alignment = 4,
    numeric = 5,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

/// Missing or unreadable/unwritable file.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

/// Malformed input or invalid configuration.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// Parallel inputs with different lengths.
class AlignmentError : public Error {
public:
    explicit AlignmentError(const std::string& what) : Error(ErrorKind::alignment, what) {}
};

/// Non-finite values during training or scoring.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

}  // namespace detox
