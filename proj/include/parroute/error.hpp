#pragma once

#include <stdexcept>
#include <string>

namespace parroute {

/// Raised when generator or router parameters are outside their domain.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised by the text-format readers. The message carries the 1-based line.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string &what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }

    int line() const { return line_; }

private:
    int line_;
};

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A sink could not be reached even on the full device.
class UnroutableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace parroute
