// SPDX-License-Identifier: Apache-2.0

#ifndef DMM_ERROR_HPP
#define DMM_ERROR_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dmm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A combination or transform saw values of the wrong kind or arity. After a
/// network has passed validate() this is unreachable.
class MalformedNetwork : public Error {
public:
    using Error::Error;
};

/// A matrix, port or initial value violates the typing rules of a signature.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A diagnostic from the network text format. Line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column), message_(message) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

/// Execution stopped at `tick` (the tick being executed, 1-based).
class RuntimeHalt : public Error {
public:
    RuntimeHalt(std::uint64_t tick, const std::string& message)
        : Error("tick " + std::to_string(tick) + ": " + message), tick_(tick) {}

    std::uint64_t tick() const noexcept { return tick_; }

private:
    std::uint64_t tick_;
};

} // namespace dmm

#endif // DMM_ERROR_HPP
