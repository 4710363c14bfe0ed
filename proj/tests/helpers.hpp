#pragma once

#include "mrepair/kripke.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace testutil {

inline std::string fixture( const std::string& name ) { return std::string( MREPAIR_FIXTURES ) + "/" + name; }

inline std::string slurp( const std::string& path )
{
    std::ifstream in( path );
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void spit( const std::string& path, const std::string& text )
{
    std::ofstream out( path );
    out << text;
}

inline std::string work( const std::string& name ) { return std::string( MREPAIR_WORK_DIR ) + "/" + name; }

inline mrepair::KripkeStructure sec51() { return mrepair::load_structure( slurp( fixture( "sec51.kripke" ) ) ); }

struct Run
{
    int code = -1;
    std::string out;
};

/// Runs a shell command, capturing stdout (stderr is discarded).
inline Run run( const std::string& cmd )
{
    Run r;
    FILE* p = popen( ( cmd + " 2>/dev/null" ).c_str(), "r" );
    if ( !p )
        return r;
    std::array< char, 4096 > buf{};
    std::size_t n;
    while ( ( n = fread( buf.data(), 1, buf.size(), p ) ) > 0 )
        r.out.append( buf.data(), n );
    int status = pclose( p );
    r.code = WIFEXITED( status ) ? WEXITSTATUS( status ) : -1;
    return r;
}

inline Run cli( const std::string& args ) { return run( std::string( MREPAIR_CLI ) + " " + args ); }

} // namespace testutil
