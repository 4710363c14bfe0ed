#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mrepair::detail {

struct Token
{
    std::string text;
    int column; // 1-based
};

struct Line
{
    int number; // 1-based
    std::vector< Token > tokens;
};

/// Splits `text` into whitespace-separated tokens per line. `#` starts a
/// comment. Blank lines are dropped.
std::vector< Line > tokenize_lines( std::string_view text );

std::vector< std::string > split( std::string_view s, char sep );

std::string read_file( const std::string& path );
void write_file( const std::string& path, std::string_view contents );

} // namespace mrepair::detail
