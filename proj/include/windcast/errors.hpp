#ifndef WINDCAST_ERRORS_HPP
#define WINDCAST_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace windcast {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad caller-supplied arguments (flags, dimensions, invalid config values).
class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& msg) : Error(msg) {}
};

// Problems with input data (files, gaps, non-finite values, short series).
class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(msg) {}
};

// Malformed CSV content; carries the 1-based line number.
class ParseError : public DataError {
public:
    ParseError(const std::string& msg, std::size_t line)
        : DataError(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// A gap in the sample index sequence that the active GapPolicy rejects.
class GapError : public DataError {
public:
    explicit GapError(const std::string& msg) : DataError(msg) {}
};

// Not enough samples for the requested estimate.
class InsufficientDataError : public DataError {
public:
    explicit InsufficientDataError(const std::string& msg) : DataError(msg) {}
};

// A lag-selection rule that is never satisfied within the computed curve.
class SelectionError : public Error {
public:
    explicit SelectionError(const std::string& msg) : Error(msg) {}
};

}  // namespace windcast

#endif
