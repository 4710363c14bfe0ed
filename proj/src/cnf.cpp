#include "mrepair/cnf.hpp"

#include "mrepair/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <cstdlib>
#include <sstream>
#include <unordered_map>

namespace mrepair {

std::string to_string( SatStatus s )
{
    switch ( s )
    {
    case SatStatus::Sat: return "SAT";
    case SatStatus::Unsat: return "UNSAT";
    case SatStatus::Unknown: return "UNKNOWN";
    }
    return "?";
}

bool satisfies( const CnfFormula& c, const Assignment& a )
{
    if ( a.num_vars() < c.num_vars )
        return false;
    return std::all_of( c.clauses.begin(), c.clauses.end(), [ & ]( const auto& clause ) {
        return std::any_of( clause.begin(), clause.end(), [ & ]( int l ) { return a.satisfies( l ); } );
    } );
}

int VarMap::index( const PropVar& v ) const
{
    auto it = index_.find( v );
    return it == index_.end() ? 0 : it->second;
}

const std::string& VarMap::definition( int var ) const
{
    return aux_.at( static_cast< std::size_t >( var - num_original() - 1 ) );
}

int VarMap::add_original( const PropVar& v )
{
    if ( !aux_.empty() )
        throw InternalError( "original variables must precede auxiliary ones" );
    auto [ it, inserted ] = index_.emplace( v, num_original() + 1 );
    if ( inserted )
        originals_.push_back( v );
    return it->second;
}

int VarMap::add_aux( std::string definition )
{
    aux_.push_back( std::move( definition ) );
    return num_original() + num_aux();
}

namespace {

constexpr int kTrue = INT_MAX;
constexpr int kFalse = -INT_MAX;

bool is_const( int l )
{
    return l == kTrue || l == kFalse;
}

class Tseitin
{
public:
    explicit Tseitin( const BoolExpr& e )
    {
        for ( const auto& v : variables( e ) )
            vars_.add_original( v );
    }

    TseitinResult finish()
    {
        TseitinResult r;
        r.vars = std::move( vars_ );
        r.cnf.num_vars = r.vars.num_original() + r.vars.num_aux();
        if ( contradiction_ )
            r.cnf.clauses = { {} };
        else
            r.cnf.clauses = std::move( clauses_ );
        return r;
    }

    void assert_true( const BoolExpr& e )
    {
        const auto& c = e.children();
        switch ( e.kind() )
        {
        case BoolExpr::Kind::And:
            for ( const auto& x : c )
                assert_true( x );
            return;
        case BoolExpr::Kind::Or:
        {
            std::vector< int > clause;
            for ( const auto& x : c )
                clause.push_back( lit( x ) );
            add_clause( std::move( clause ) );
            return;
        }
        case BoolExpr::Kind::Implies: add_clause( { -lit( c[ 0 ] ), lit( c[ 1 ] ) } ); return;
        case BoolExpr::Kind::Iff:
            if ( c[ 0 ].kind() == BoolExpr::Kind::Var && !memo_.contains( c[ 1 ].id() ) )
                define( c[ 1 ], lit( c[ 0 ] ) );
            else if ( c[ 1 ].kind() == BoolExpr::Kind::Var && !memo_.contains( c[ 0 ].id() ) )
                define( c[ 0 ], lit( c[ 1 ] ) );
            else
                equate( lit( c[ 0 ] ), lit( c[ 1 ] ) );
            return;
        default: add_clause( { lit( e ) } ); return;
        }
    }

private:
    int lit( const BoolExpr& e )
    {
        if ( auto it = memo_.find( e.id() ); it != memo_.end() )
            return it->second;
        int l = encode( e, 0 );
        memo_.emplace( e.id(), l );
        return l;
    }

    /// Encodes e so that `out` (if nonzero) is its output literal.
    void define( const BoolExpr& e, int out )
    {
        int l = encode( e, out );
        memo_.emplace( e.id(), l );
        if ( l != out )
            equate( l, out );
    }

    int encode( const BoolExpr& e, int out )
    {
        const auto& c = e.children();
        switch ( e.kind() )
        {
        case BoolExpr::Kind::Const: return e.value() ? kTrue : kFalse;
        case BoolExpr::Kind::Var: return vars_.index( e.var() );
        case BoolExpr::Kind::Not:
        {
            if ( out == 0 )
                return -lit( c[ 0 ] );
            int l = encode( c[ 0 ], -out );
            return -l;
        }
        case BoolExpr::Kind::And:
        {
            std::vector< int > ls;
            for ( const auto& x : c )
                ls.push_back( lit( x ) );
            return gate_and( std::move( ls ), out );
        }
        case BoolExpr::Kind::Or:
        {
            std::vector< int > ls;
            for ( const auto& x : c )
                ls.push_back( -lit( x ) );
            return -gate_and( std::move( ls ), -out );
        }
        case BoolExpr::Kind::Implies: return -gate_and( { lit( c[ 0 ] ), -lit( c[ 1 ] ) }, -out );
        case BoolExpr::Kind::Iff: return gate_iff( lit( c[ 0 ] ), lit( c[ 1 ] ), out );
        }
        return kFalse;
    }

    int gate_and( std::vector< int > ls, int out )
    {
        if ( std::find( ls.begin(), ls.end(), kFalse ) != ls.end() )
            return kFalse;
        std::erase( ls, kTrue );
        std::sort( ls.begin(), ls.end() );
        ls.erase( std::unique( ls.begin(), ls.end() ), ls.end() );
        for ( int l : ls )
            if ( std::binary_search( ls.begin(), ls.end(), -l ) )
                return kFalse;
        if ( ls.empty() )
            return kTrue;
        if ( ls.size() == 1 )
            return ls.front();

        auto key = std::pair{ 'a', ls };
        if ( auto it = gates_.find( key ); it != gates_.end() )
            return it->second;
        int g = out != 0 ? out : new_aux( "and", ls );
        std::vector< int > big{ g };
        for ( int l : ls )
        {
            add_clause( { -g, l } );
            big.push_back( -l );
        }
        add_clause( std::move( big ) );
        gates_.emplace( std::move( key ), g );
        return g;
    }

    int gate_iff( int a, int b, int out )
    {
        if ( is_const( a ) )
            std::swap( a, b );
        if ( b == kTrue )
            return a;
        if ( b == kFalse )
            return -a;
        if ( a == b )
            return kTrue;
        if ( a == -b )
            return kFalse;
        int sign = 1;
        if ( a < 0 )
        {
            a = -a;
            sign = -sign;
        }
        if ( b < 0 )
        {
            b = -b;
            sign = -sign;
        }
        if ( a > b )
            std::swap( a, b );
        auto key = std::pair{ 'i', std::vector< int >{ a, b } };
        if ( auto it = gates_.find( key ); it != gates_.end() )
            return sign * it->second;
        int g = out != 0 ? sign * out : new_aux( "iff", { a, b } );
        add_clause( { -g, -a, b } );
        add_clause( { -g, a, -b } );
        add_clause( { g, a, b } );
        add_clause( { g, -a, -b } );
        gates_.emplace( std::move( key ), g );
        return sign * g;
    }

    int new_aux( const char* kind, const std::vector< int >& ls )
    {
        std::string def = kind;
        def += '(';
        for ( std::size_t i = 0; i < ls.size(); ++i )
        {
            if ( i )
                def += ',';
            def += std::to_string( ls[ i ] );
        }
        def += ')';
        return vars_.add_aux( std::move( def ) );
    }

    void equate( int a, int b )
    {
        add_clause( { -a, b } );
        add_clause( { a, -b } );
    }

    void add_clause( std::vector< int > clause )
    {
        if ( std::find( clause.begin(), clause.end(), kTrue ) != clause.end() )
            return;
        std::erase( clause, kFalse );
        std::sort( clause.begin(), clause.end(), []( int x, int y ) {
            return std::abs( x ) != std::abs( y ) ? std::abs( x ) < std::abs( y ) : x < y;
        } );
        clause.erase( std::unique( clause.begin(), clause.end() ), clause.end() );
        for ( std::size_t i = 1; i < clause.size(); ++i )
            if ( clause[ i ] == -clause[ i - 1 ] )
                return;
        if ( clause.empty() )
            contradiction_ = true;
        else
            clauses_.push_back( std::move( clause ) );
    }

    VarMap vars_;
    std::vector< std::vector< int > > clauses_;
    std::unordered_map< const void*, int > memo_;
    std::map< std::pair< char, std::vector< int > >, int > gates_;
    bool contradiction_ = false;
};

} // namespace

TseitinResult tseitin( const BoolExpr& e )
{
    Tseitin t( e );
    t.assert_true( e );
    return t.finish();
}

std::string to_dimacs( const CnfFormula& c )
{
    std::string out = "p cnf " + std::to_string( c.num_vars ) + " " + std::to_string( c.clauses.size() ) + "\n";
    for ( const auto& clause : c.clauses )
    {
        for ( int l : clause )
        {
            out += std::to_string( l );
            out += ' ';
        }
        out += "0\n";
    }
    return out;
}

std::string to_dimacs( const CnfFormula& c, const VarMap& vars )
{
    std::string out;
    for ( int v = 1; v <= vars.num_original(); ++v )
        out += "c var " + std::to_string( v ) + " " + vars.prop( v ).to_string() + "\n";
    return out + to_dimacs( c );
}

namespace {

int parse_int( const detail::Token& tok, int line )
{
    char* end = nullptr;
    long v = std::strtol( tok.text.c_str(), &end, 10 );
    if ( end == tok.text.c_str() || *end != '\0' || v > INT_MAX || v < -INT_MAX )
        throw ParseError( "expected an integer, found '" + tok.text + "'", line, tok.column );
    return static_cast< int >( v );
}

/// Tokenized lines without the comment stripping of the structure formats.
std::vector< detail::Line > dimacs_lines( std::string_view text )
{
    std::vector< detail::Line > out;
    int number = 0;
    for ( const auto& raw : detail::split( text, '\n' ) )
    {
        ++number;
        detail::Line line{ number, {} };
        std::size_t i = 0;
        while ( i < raw.size() )
        {
            while ( i < raw.size() && std::isspace( static_cast< unsigned char >( raw[ i ] ) ) )
                ++i;
            std::size_t start = i;
            while ( i < raw.size() && !std::isspace( static_cast< unsigned char >( raw[ i ] ) ) )
                ++i;
            if ( i > start )
                line.tokens.push_back( { std::string( raw.substr( start, i - start ) ), static_cast< int >( start ) + 1 } );
        }
        if ( !line.tokens.empty() )
            out.push_back( std::move( line ) );
    }
    return out;
}

} // namespace

CnfFormula parse_dimacs( std::string_view text )
{
    CnfFormula c;
    bool header = false;
    std::size_t declared = 0;
    std::vector< int > current;
    for ( const auto& line : dimacs_lines( text ) )
    {
        const auto& toks = line.tokens;
        if ( toks[ 0 ].text[ 0 ] == 'c' || toks[ 0 ].text == "%" )
            continue;
        if ( toks[ 0 ].text == "p" )
        {
            if ( header )
                throw ParseError( "duplicate problem line", line.number, 1 );
            if ( toks.size() != 4 || toks[ 1 ].text != "cnf" )
                throw ParseError( "expected 'p cnf <vars> <clauses>'", line.number, 1 );
            c.num_vars = parse_int( toks[ 2 ], line.number );
            int n = parse_int( toks[ 3 ], line.number );
            if ( c.num_vars < 0 || n < 0 )
                throw ParseError( "negative count in problem line", line.number, 1 );
            declared = static_cast< std::size_t >( n );
            header = true;
            continue;
        }
        if ( !header )
            throw ParseError( "clause before problem line", line.number, 1 );
        for ( const auto& tok : toks )
        {
            int l = parse_int( tok, line.number );
            if ( l == 0 )
            {
                c.clauses.push_back( std::move( current ) );
                current.clear();
            }
            else if ( std::abs( l ) > c.num_vars )
                throw ParseError( "literal " + tok.text + " exceeds declared variable count", line.number, tok.column );
            else
                current.push_back( l );
        }
    }
    if ( !header )
        throw ParseError( "missing problem line", 1, 1 );
    if ( !current.empty() )
        c.clauses.push_back( std::move( current ) );
    if ( c.clauses.size() != declared )
        throw ParseError( "problem line declares " + std::to_string( declared ) + " clauses, found " +
                                  std::to_string( c.clauses.size() ),
                          1, 1 );
    return c;
}

DimacsResult from_dimacs_result( std::string_view text, int num_vars )
{
    DimacsResult r;
    r.model = Assignment( num_vars );
    bool have_status = false;
    for ( const auto& line : dimacs_lines( text ) )
    {
        const auto& toks = line.tokens;
        if ( toks[ 0 ].text == "s" )
        {
            if ( toks.size() != 2 )
                throw ParseError( "malformed status line", line.number, 1 );
            if ( toks[ 1 ].text == "SATISFIABLE" )
                r.status = SatStatus::Sat;
            else if ( toks[ 1 ].text == "UNSATISFIABLE" )
                r.status = SatStatus::Unsat;
            else if ( toks[ 1 ].text == "UNKNOWN" )
                r.status = SatStatus::Unknown;
            else
                throw ParseError( "unknown status '" + toks[ 1 ].text + "'", line.number, toks[ 1 ].column );
            have_status = true;
        }
        else if ( toks[ 0 ].text == "v" )
        {
            for ( std::size_t i = 1; i < toks.size(); ++i )
            {
                int l = parse_int( toks[ i ], line.number );
                if ( l == 0 )
                    continue;
                if ( std::abs( l ) > num_vars )
                    throw ParseError( "value for unknown variable " + toks[ i ].text, line.number, toks[ i ].column );
                r.model.set( std::abs( l ), l > 0 );
            }
        }
        else if ( toks[ 0 ].text[ 0 ] != 'c' )
            throw ParseError( "unexpected line in solver output", line.number, 1 );
    }
    if ( !have_status )
        throw ParseError( "solver output has no status line", 1, 1 );
    return r;
}

std::string to_dimacs_result( SatStatus status, const Assignment& model )
{
    switch ( status )
    {
    case SatStatus::Unsat: return "s UNSATISFIABLE\n";
    case SatStatus::Unknown: return "s UNKNOWN\n";
    case SatStatus::Sat: break;
    }
    std::string out = "s SATISFIABLE\nv";
    for ( int v = 1; v <= model.num_vars(); ++v )
        out += " " + std::to_string( model.value( v ) ? v : -v );
    return out + " 0\n";
}

} // namespace mrepair
