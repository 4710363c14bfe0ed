#include "text_util.hpp"

#include "mrepair/error.hpp"

#include <fstream>
#include <sstream>

namespace mrepair::detail {

std::vector< Line > tokenize_lines( std::string_view text )
{
    std::vector< Line > lines;
    int number = 0;
    std::size_t pos = 0;
    while ( pos <= text.size() )
    {
        auto end = text.find( '\n', pos );
        if ( end == std::string_view::npos )
            end = text.size();
        auto raw = text.substr( pos, end - pos );
        ++number;

        Line line{ number, {} };
        std::size_t i = 0;
        while ( i < raw.size() )
        {
            char c = raw[ i ];
            if ( c == '#' )
                break;
            if ( c == ' ' || c == '\t' || c == '\r' )
            {
                ++i;
                continue;
            }
            std::size_t start = i;
            while ( i < raw.size() && raw[ i ] != ' ' && raw[ i ] != '\t' && raw[ i ] != '\r' && raw[ i ] != '#' )
                ++i;
            line.tokens.push_back( { std::string( raw.substr( start, i - start ) ), static_cast< int >( start ) + 1 } );
        }
        if ( !line.tokens.empty() )
            lines.push_back( std::move( line ) );
        pos = end + 1;
    }
    return lines;
}

std::vector< std::string > split( std::string_view s, char sep )
{
    std::vector< std::string > out;
    std::size_t pos = 0;
    while ( true )
    {
        auto end = s.find( sep, pos );
        out.emplace_back( s.substr( pos, end == std::string_view::npos ? std::string_view::npos : end - pos ) );
        if ( end == std::string_view::npos )
            break;
        pos = end + 1;
    }
    return out;
}

std::string read_file( const std::string& path )
{
    std::ifstream in( path, std::ios::binary );
    if ( !in )
        throw Error( "cannot open '" + path + "'" );
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file( const std::string& path, std::string_view contents )
{
    std::ofstream out( path, std::ios::binary );
    if ( !out )
        throw Error( "cannot write '" + path + "'" );
    out << contents;
}

} // namespace mrepair::detail
