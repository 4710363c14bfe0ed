#include "mrepair/formula.hpp"

#include "mrepair/error.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace mrepair {

namespace {

int precedence( Op op )
{
    switch ( op )
    {
    case Op::Implies: return 1;
    case Op::Or: return 2;
    case Op::And: return 3;
    default: return 4;
    }
}

std::string wrap( const Formula& f, int min_prec )
{
    if ( precedence( f.op() ) < min_prec )
        return "(" + f.key() + ")";
    return f.key();
}

std::string coalition_text( const Formula::Coalition& a )
{
    std::string s = "<<";
    bool first = true;
    for ( const auto& p : a )
    {
        if ( !first )
            s += ",";
        s += p;
        first = false;
    }
    return s + ">>";
}

std::size_t arity( Op op )
{
    switch ( op )
    {
    case Op::True:
    case Op::False:
    case Op::Prop: return 0;
    case Op::And:
    case Op::Or:
    case Op::Implies:
    case Op::AU:
    case Op::EU:
    case Op::AV:
    case Op::EV:
    case Op::CoalU:
    case Op::CoalV: return 2;
    default: return 1;
    }
}

std::string make_key( Op op, const std::vector< Formula >& c, const std::string& name, const Formula::Coalition& a )
{
    switch ( op )
    {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Prop: return name;
    case Op::Not: return "~" + wrap( c[ 0 ], 4 );
    case Op::And: return wrap( c[ 0 ], 3 ) + " & " + wrap( c[ 1 ], 4 );
    case Op::Or: return wrap( c[ 0 ], 2 ) + " | " + wrap( c[ 1 ], 3 );
    case Op::Implies: return wrap( c[ 0 ], 2 ) + " -> " + wrap( c[ 1 ], 1 );
    case Op::AX: return "AX " + wrap( c[ 0 ], 4 );
    case Op::EX: return "EX " + wrap( c[ 0 ], 4 );
    case Op::AF: return "AF " + wrap( c[ 0 ], 4 );
    case Op::EF: return "EF " + wrap( c[ 0 ], 4 );
    case Op::AG: return "AG " + wrap( c[ 0 ], 4 );
    case Op::EG: return "EG " + wrap( c[ 0 ], 4 );
    case Op::AU: return "A[" + c[ 0 ].key() + " U " + c[ 1 ].key() + "]";
    case Op::EU: return "E[" + c[ 0 ].key() + " U " + c[ 1 ].key() + "]";
    case Op::AV: return "A[" + c[ 0 ].key() + " V " + c[ 1 ].key() + "]";
    case Op::EV: return "E[" + c[ 0 ].key() + " V " + c[ 1 ].key() + "]";
    case Op::CoalX: return coalition_text( a ) + "X " + wrap( c[ 0 ], 4 );
    case Op::CoalF: return coalition_text( a ) + "F " + wrap( c[ 0 ], 4 );
    case Op::CoalG: return coalition_text( a ) + "G " + wrap( c[ 0 ], 4 );
    case Op::CoalU: return coalition_text( a ) + "[" + c[ 0 ].key() + " U " + c[ 1 ].key() + "]";
    case Op::CoalV: return coalition_text( a ) + "[" + c[ 0 ].key() + " V " + c[ 1 ].key() + "]";
    }
    return {};
}

bool is_coalition_op( Op op )
{
    return op == Op::CoalX || op == Op::CoalF || op == Op::CoalG || op == Op::CoalU || op == Op::CoalV;
}

bool is_path_op( Op op )
{
    switch ( op )
    {
    case Op::AX:
    case Op::EX:
    case Op::AF:
    case Op::EF:
    case Op::AG:
    case Op::EG:
    case Op::AU:
    case Op::EU:
    case Op::AV:
    case Op::EV: return true;
    default: return false;
    }
}

} // namespace

Formula::Formula() : Formula( make( Op::True, {} ) ) {}

Formula Formula::make( Op op, std::vector< Formula > children, std::string name, Coalition coalition )
{
    if ( children.size() != arity( op ) )
        throw InvalidInput( "wrong number of operands for formula constructor" );
    if ( op == Op::Prop && name.empty() )
        throw InvalidInput( "proposition needs a name" );

    auto n = std::make_shared< Node >();
    n->op = op;
    n->size = 1;
    n->depth = 0;
    for ( const auto& c : children )
    {
        n->size += c.size();
        n->depth = std::max( n->depth, c.depth() + 1 );
    }
    n->key = make_key( op, children, name, coalition );
    n->name = std::move( name );
    n->coalition = std::move( coalition );
    n->children = std::move( children );
    return Formula( std::move( n ) );
}

namespace fml {

Formula tt() { return Formula::make( Op::True, {} ); }
Formula ff() { return Formula::make( Op::False, {} ); }
Formula prop( std::string name ) { return Formula::make( Op::Prop, {}, std::move( name ) ); }
Formula neg( Formula f ) { return Formula::make( Op::Not, { std::move( f ) } ); }
Formula conj( Formula a, Formula b ) { return Formula::make( Op::And, { std::move( a ), std::move( b ) } ); }
Formula disj( Formula a, Formula b ) { return Formula::make( Op::Or, { std::move( a ), std::move( b ) } ); }
Formula implies( Formula a, Formula b ) { return Formula::make( Op::Implies, { std::move( a ), std::move( b ) } ); }
Formula AX( Formula f ) { return Formula::make( Op::AX, { std::move( f ) } ); }
Formula EX( Formula f ) { return Formula::make( Op::EX, { std::move( f ) } ); }
Formula AF( Formula f ) { return Formula::make( Op::AF, { std::move( f ) } ); }
Formula EF( Formula f ) { return Formula::make( Op::EF, { std::move( f ) } ); }
Formula AG( Formula f ) { return Formula::make( Op::AG, { std::move( f ) } ); }
Formula EG( Formula f ) { return Formula::make( Op::EG, { std::move( f ) } ); }
Formula AU( Formula a, Formula b ) { return Formula::make( Op::AU, { std::move( a ), std::move( b ) } ); }
Formula EU( Formula a, Formula b ) { return Formula::make( Op::EU, { std::move( a ), std::move( b ) } ); }
Formula AV( Formula a, Formula b ) { return Formula::make( Op::AV, { std::move( a ), std::move( b ) } ); }
Formula EV( Formula a, Formula b ) { return Formula::make( Op::EV, { std::move( a ), std::move( b ) } ); }
Formula coal_x( Formula::Coalition a, Formula f )
{
    return Formula::make( Op::CoalX, { std::move( f ) }, {}, std::move( a ) );
}
Formula coal_f( Formula::Coalition a, Formula f )
{
    return Formula::make( Op::CoalF, { std::move( f ) }, {}, std::move( a ) );
}
Formula coal_g( Formula::Coalition a, Formula f )
{
    return Formula::make( Op::CoalG, { std::move( f ) }, {}, std::move( a ) );
}
Formula coal_u( Formula::Coalition a, Formula f, Formula g )
{
    return Formula::make( Op::CoalU, { std::move( f ), std::move( g ) }, {}, std::move( a ) );
}
Formula coal_v( Formula::Coalition a, Formula f, Formula g )
{
    return Formula::make( Op::CoalV, { std::move( f ), std::move( g ) }, {}, std::move( a ) );
}

} // namespace fml

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

enum class Tok
{
    Ident,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Not,
    And,
    Or,
    Arrow,
    LAngle,
    RAngle,
    Comma,
    End,
};

struct Token
{
    Tok kind;
    std::string text;
    int line;
    int column;
};

bool ident_char( char c )
{
    return std::isalnum( static_cast< unsigned char >( c ) ) || c == '_' || c == '=' || c == '.' || c == '\'';
}

std::vector< Token > lex( std::string_view text )
{
    std::vector< Token > out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;
    auto push = [ & ]( Tok k, std::string t, int c ) { out.push_back( { k, std::move( t ), line, c } ); };
    while ( i < text.size() )
    {
        char c = text[ i ];
        if ( c == '\n' )
        {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if ( std::isspace( static_cast< unsigned char >( c ) ) )
        {
            ++i;
            ++col;
            continue;
        }
        int start = col;
        if ( ident_char( c ) )
        {
            std::size_t j = i;
            while ( j < text.size() && ident_char( text[ j ] ) )
                ++j;
            push( Tok::Ident, std::string( text.substr( i, j - i ) ), start );
            col += static_cast< int >( j - i );
            i = j;
            continue;
        }
        auto two = text.substr( i, 2 );
        if ( two == "->" )
            push( Tok::Arrow, "->", start );
        else if ( two == "<<" )
            push( Tok::LAngle, "<<", start );
        else if ( two == ">>" )
            push( Tok::RAngle, ">>", start );
        if ( two == "->" || two == "<<" || two == ">>" )
        {
            i += 2;
            col += 2;
            continue;
        }
        switch ( c )
        {
        case '(': push( Tok::LParen, "(", start ); break;
        case ')': push( Tok::RParen, ")", start ); break;
        case '[': push( Tok::LBracket, "[", start ); break;
        case ']': push( Tok::RBracket, "]", start ); break;
        case '~':
        case '!': push( Tok::Not, "~", start ); break;
        case '&': push( Tok::And, "&", start ); break;
        case '|': push( Tok::Or, "|", start ); break;
        case ',': push( Tok::Comma, ",", start ); break;
        default: throw ParseError( std::string( "unexpected character '" ) + c + "'", line, col );
        }
        ++i;
        ++col;
    }
    out.push_back( { Tok::End, "", line, col } );
    return out;
}

class Parser
{
public:
    Parser( std::string_view text, bool atl ) : toks_{ lex( text ) }, atl_{ atl } {}

    Formula parse_all()
    {
        auto f = parse_implies();
        if ( peek().kind != Tok::End )
            error( "unexpected '" + peek().text + "'" );
        return f;
    }

private:
    const Token& peek( std::size_t ahead = 0 ) const { return toks_[ std::min( pos_ + ahead, toks_.size() - 1 ) ]; }
    const Token& next() { return toks_[ pos_++ ]; }

    [[noreturn]] void error( const std::string& msg ) const { throw ParseError( msg, peek().line, peek().column ); }

    void expect( Tok k, const char* what )
    {
        if ( peek().kind != k )
            error( std::string( "expected " ) + what );
        ++pos_;
    }

    Formula parse_implies()
    {
        auto lhs = parse_or();
        if ( peek().kind == Tok::Arrow )
        {
            ++pos_;
            return fml::implies( lhs, parse_implies() );
        }
        return lhs;
    }

    Formula parse_or()
    {
        auto lhs = parse_and();
        while ( peek().kind == Tok::Or )
        {
            ++pos_;
            lhs = fml::disj( lhs, parse_and() );
        }
        return lhs;
    }

    Formula parse_and()
    {
        auto lhs = parse_unary();
        while ( peek().kind == Tok::And )
        {
            ++pos_;
            lhs = fml::conj( lhs, parse_unary() );
        }
        return lhs;
    }

    void require_ctl()
    {
        if ( atl_ )
            error( "path quantifier '" + peek().text + "' is not ATL syntax" );
    }

    // A[f U g] / A[f V g] after the quantifier letter has been consumed.
    std::pair< Formula, Formula > parse_bracket( bool& release )
    {
        expect( Tok::LBracket, "'['" );
        auto a = parse_implies();
        if ( peek().kind != Tok::Ident || ( peek().text != "U" && peek().text != "V" ) )
            error( "expected 'U' or 'V'" );
        release = next().text == "V";
        auto b = parse_implies();
        expect( Tok::RBracket, "']'" );
        return { a, b };
    }

    Formula parse_unary()
    {
        const auto& t = peek();
        switch ( t.kind )
        {
        case Tok::Not: ++pos_; return fml::neg( parse_unary() );
        case Tok::LParen:
        {
            ++pos_;
            auto f = parse_implies();
            expect( Tok::RParen, "')'" );
            return f;
        }
        case Tok::LAngle: return parse_coalition();
        case Tok::Ident: break;
        default: error( t.kind == Tok::End ? "unexpected end of formula" : "unexpected '" + t.text + "'" );
        }

        const std::string word = t.text;
        if ( word == "true" )
        {
            ++pos_;
            return fml::tt();
        }
        if ( word == "false" )
        {
            ++pos_;
            return fml::ff();
        }
        if ( ( word == "A" || word == "E" ) && peek( 1 ).kind == Tok::LBracket )
        {
            require_ctl();
            ++pos_;
            bool release = false;
            auto [ a, b ] = parse_bracket( release );
            if ( word == "A" )
                return release ? fml::AV( a, b ) : fml::AU( a, b );
            return release ? fml::EV( a, b ) : fml::EU( a, b );
        }
        static const std::map< std::string, Op > prefix = {
            { "AX", Op::AX }, { "EX", Op::EX }, { "AF", Op::AF }, { "EF", Op::EF }, { "AG", Op::AG }, { "EG", Op::EG },
        };
        if ( auto it = prefix.find( word ); it != prefix.end() )
        {
            require_ctl();
            ++pos_;
            return Formula::make( it->second, { parse_unary() } );
        }
        ++pos_;
        return fml::prop( word );
    }

    Formula parse_coalition()
    {
        if ( !atl_ )
            error( "coalition operator is not CTL syntax" );
        expect( Tok::LAngle, "'<<'" );
        Formula::Coalition players;
        if ( peek().kind != Tok::RAngle )
        {
            while ( true )
            {
                if ( peek().kind != Tok::Ident )
                    error( "expected player name" );
                players.insert( next().text );
                if ( peek().kind != Tok::Comma )
                    break;
                ++pos_;
            }
        }
        expect( Tok::RAngle, "'>>'" );
        if ( peek().kind == Tok::LBracket )
        {
            bool release = false;
            auto [ a, b ] = parse_bracket( release );
            return release ? fml::coal_v( players, a, b ) : fml::coal_u( players, a, b );
        }
        if ( peek().kind != Tok::Ident )
            error( "expected X, F, G or '[' after coalition" );
        const auto word = next().text;
        if ( word == "X" )
            return fml::coal_x( players, parse_unary() );
        if ( word == "F" )
            return fml::coal_f( players, parse_unary() );
        if ( word == "G" )
            return fml::coal_g( players, parse_unary() );
        --pos_;
        error( "expected X, F, G or '[' after coalition" );
    }

    std::vector< Token > toks_;
    std::size_t pos_ = 0;
    bool atl_;
};

} // namespace

Formula parse_ctl( std::string_view text )
{
    return Parser( text, false ).parse_all();
}

Formula parse_atl( std::string_view text )
{
    return Parser( text, true ).parse_all();
}

std::string print( const Formula& f )
{
    return f.key();
}

// ---------------------------------------------------------------------------
// Classification and desugaring
// ---------------------------------------------------------------------------

namespace {

template < typename Pred > bool all_nodes( const Formula& f, Pred pred )
{
    if ( !pred( f.op() ) )
        return false;
    return std::all_of( f.children().begin(), f.children().end(),
                        [ & ]( const Formula& c ) { return all_nodes( c, pred ); } );
}

bool is_boolean_core( Op op )
{
    return op == Op::True || op == Op::False || op == Op::Prop || op == Op::Not || op == Op::And || op == Op::Or;
}

} // namespace

bool is_ctl_core( const Formula& f )
{
    return all_nodes( f, []( Op op ) {
        return is_boolean_core( op ) || op == Op::AX || op == Op::EX || op == Op::AV || op == Op::EV;
    } );
}

bool is_atl_core( const Formula& f )
{
    return all_nodes( f, []( Op op ) { return is_boolean_core( op ) || op == Op::CoalX || op == Op::CoalV; } );
}

bool is_ctl( const Formula& f )
{
    return all_nodes( f, []( Op op ) { return !is_coalition_op( op ); } );
}

bool is_atl( const Formula& f )
{
    return all_nodes( f, []( Op op ) { return !is_path_op( op ); } );
}

Formula desugar( const Formula& f )
{
    using namespace fml;
    switch ( f.op() )
    {
    case Op::True:
    case Op::False:
    case Op::Prop: return f;
    case Op::Not: return neg( desugar( f.lhs() ) );
    case Op::And: return conj( desugar( f.lhs() ), desugar( f.rhs() ) );
    case Op::Or: return disj( desugar( f.lhs() ), desugar( f.rhs() ) );
    case Op::Implies: return disj( neg( desugar( f.lhs() ) ), desugar( f.rhs() ) );
    case Op::AX: return AX( desugar( f.lhs() ) );
    case Op::EX: return EX( desugar( f.lhs() ) );
    case Op::AV: return AV( desugar( f.lhs() ), desugar( f.rhs() ) );
    case Op::EV: return EV( desugar( f.lhs() ), desugar( f.rhs() ) );
    // A[f U g] = ~E[~f V ~g],  E[f U g] = ~A[~f V ~g]
    case Op::AU: return neg( EV( neg( desugar( f.lhs() ) ), neg( desugar( f.rhs() ) ) ) );
    case Op::EU: return neg( AV( neg( desugar( f.lhs() ) ), neg( desugar( f.rhs() ) ) ) );
    // AF g = A[true U g] = ~E[false V ~g]  (~true written as false)
    case Op::AF: return neg( EV( ff(), neg( desugar( f.lhs() ) ) ) );
    case Op::EF: return neg( AV( ff(), neg( desugar( f.lhs() ) ) ) );
    case Op::AG: return AV( ff(), desugar( f.lhs() ) );
    case Op::EG: return EV( ff(), desugar( f.lhs() ) );
    default: throw InvalidInput( "coalition operator in CTL formula: " + f.key() );
    }
}

Formula atl_desugar( const Formula& f, const std::set< std::string >& players )
{
    using namespace fml;
    auto check = [ & ]( const Formula::Coalition& a ) {
        for ( const auto& p : a )
            if ( !players.contains( p ) )
                throw InvalidInput( "coalition member '" + p + "' is not a player in " + f.key() );
    };
    auto complement = [ & ]( const Formula::Coalition& a ) {
        Formula::Coalition out;
        std::set_difference( players.begin(), players.end(), a.begin(), a.end(), std::inserter( out, out.end() ) );
        return out;
    };
    auto rec = [ & ]( const Formula& g ) { return atl_desugar( g, players ); };

    switch ( f.op() )
    {
    case Op::True:
    case Op::False:
    case Op::Prop: return f;
    case Op::Not: return neg( rec( f.lhs() ) );
    case Op::And: return conj( rec( f.lhs() ), rec( f.rhs() ) );
    case Op::Or: return disj( rec( f.lhs() ), rec( f.rhs() ) );
    case Op::Implies: return disj( neg( rec( f.lhs() ) ), rec( f.rhs() ) );
    case Op::CoalX: check( f.coalition() ); return coal_x( f.coalition(), rec( f.lhs() ) );
    case Op::CoalV: check( f.coalition() ); return coal_v( f.coalition(), rec( f.lhs() ), rec( f.rhs() ) );
    // <<A>>[f U g] = ~<<players - A>>[~f V ~g]
    case Op::CoalU:
        check( f.coalition() );
        return neg( coal_v( complement( f.coalition() ), neg( rec( f.lhs() ) ), neg( rec( f.rhs() ) ) ) );
    case Op::CoalF:
        check( f.coalition() );
        return neg( coal_v( complement( f.coalition() ), ff(), neg( rec( f.lhs() ) ) ) );
    case Op::CoalG: check( f.coalition() ); return coal_v( f.coalition(), ff(), rec( f.lhs() ) );
    default: throw InvalidInput( "path quantifier in ATL formula: " + f.key() );
    }
}

// ---------------------------------------------------------------------------
// Closure
// ---------------------------------------------------------------------------

namespace {

void collect( const Formula& f, std::map< std::string, Formula >& out, bool atl )
{
    if ( out.contains( f.key() ) )
        return;
    out.emplace( f.key(), f );
    for ( const auto& c : f.children() )
        collect( c, out, atl );

    bool release = atl ? f.op() == Op::CoalV : ( f.op() == Op::AV || f.op() == Op::EV );
    if ( !release )
        return;
    Formula step;
    if ( atl )
        step = fml::coal_x( f.coalition(), f );
    else
        step = f.op() == Op::AV ? fml::AX( f ) : fml::EX( f );
    auto unfold = fml::disj( f.lhs(), step );
    auto expansion = fml::conj( f.rhs(), unfold );
    out.emplace( step.key(), step );
    out.emplace( unfold.key(), unfold );
    out.emplace( expansion.key(), expansion );
}

std::vector< Formula > closure( const Formula& f, bool atl )
{
    std::map< std::string, Formula > all;
    collect( f, all, atl );
    std::vector< Formula > out;
    out.reserve( all.size() );
    for ( auto& [ k, g ] : all )
        out.push_back( g );
    std::stable_sort( out.begin(), out.end(), []( const Formula& a, const Formula& b ) {
        if ( a.size() != b.size() )
            return a.size() < b.size();
        return a.key() < b.key();
    } );
    return out;
}

void collect_props( const Formula& f, std::set< std::string >& out )
{
    if ( f.op() == Op::Prop )
        out.insert( f.name() );
    for ( const auto& c : f.children() )
        collect_props( c, out );
}

} // namespace

std::vector< Formula > sub( const Formula& f )
{
    if ( !is_ctl_core( f ) )
        throw InvalidInput( "sub() expects a core CTL formula: " + f.key() );
    return closure( f, false );
}

std::vector< Formula > atl_sub( const Formula& f )
{
    if ( !is_atl_core( f ) )
        throw InvalidInput( "atl_sub() expects a core ATL formula: " + f.key() );
    return closure( f, true );
}

std::set< std::string > propositions( const Formula& f )
{
    std::set< std::string > out;
    collect_props( f, out );
    return out;
}

} // namespace mrepair
