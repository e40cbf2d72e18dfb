#pragma once

#include <stdexcept>
#include <string>

namespace uiground {

/// Bad input data: malformed rows, id mismatches, unreadable files.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration: unknown formats, fractions out of range, bad templates.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// XML or JSON syntax error with a source position.
class ParseError : public DataError {
public:
    ParseError(const std::string& what, long line, long column)
        : DataError(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line), column_(column) {}

    long line() const noexcept { return line_; }
    long column() const noexcept { return column_; }

private:
    long line_;
    long column_;
};

}  // namespace uiground
