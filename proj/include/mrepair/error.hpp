#pragma once

#include <stdexcept>
#include <string>

namespace mrepair {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries a 1-based line/column position.
class ParseError : public Error
{
public:
    ParseError( const std::string& what, int line, int column )
            : Error( "line " + std::to_string( line ) + ", column " + std::to_string( column ) + ": " + what ),
              line_{ line }, column_{ column }
    {
    }

    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// A precondition on the inputs of an operation does not hold.
class InvalidInput : public Error
{
public:
    using Error::Error;
};

/// The SAT back-end ran out of its conflict budget (or an external solver failed to answer).
class ResourceLimit : public Error
{
public:
    using Error::Error;
};

/// A result failed its own post-condition check. Always a bug.
class InternalError : public Error
{
public:
    using Error::Error;
};

} // namespace mrepair
