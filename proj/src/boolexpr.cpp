#include "mrepair/boolexpr.hpp"

#include "mrepair/error.hpp"

#include <cctype>
#include <unordered_set>

namespace mrepair {

std::string PropVar::to_string() const
{
    switch ( kind )
    {
    case Kind::Edge: return "E(" + s.name + "," + t.name + ")";
    case Kind::Sat: return "X(" + s.name + "," + formula + ")";
    case Kind::SatLvl: return "X^" + std::to_string( level ) + "(" + s.name + "," + formula + ")";
    case Kind::Node: return "N(" + s.name + ")";
    case Kind::ReachLvl: return "R^" + std::to_string( level ) + "(" + s.name + ")";
    case Kind::Reach: return "R(" + s.name + ")";
    }
    return {};
}

BoolExpr::BoolExpr() : BoolExpr( constant( true ) ) {}

BoolExpr BoolExpr::constant( bool v )
{
    static const BoolExpr t{ std::make_shared< const Node >( Node{ Kind::Const, true, {}, {} } ) };
    static const BoolExpr f{ std::make_shared< const Node >( Node{ Kind::Const, false, {}, {} } ) };
    return v ? t : f;
}

BoolExpr BoolExpr::var( PropVar v )
{
    return BoolExpr( std::make_shared< const Node >( Node{ Kind::Var, false, std::move( v ), {} } ) );
}

BoolExpr BoolExpr::gate( Kind k, std::vector< BoolExpr > children )
{
    return BoolExpr( std::make_shared< const Node >( Node{ k, false, {}, std::move( children ) } ) );
}

BoolExpr b_not( BoolExpr a )
{
    return BoolExpr::gate( BoolExpr::Kind::Not, { std::move( a ) } );
}

BoolExpr b_and( std::vector< BoolExpr > xs )
{
    if ( xs.empty() )
        return BoolExpr::constant( true );
    if ( xs.size() == 1 )
        return xs.front();
    return BoolExpr::gate( BoolExpr::Kind::And, std::move( xs ) );
}

BoolExpr b_or( std::vector< BoolExpr > xs )
{
    if ( xs.empty() )
        return BoolExpr::constant( false );
    if ( xs.size() == 1 )
        return xs.front();
    return BoolExpr::gate( BoolExpr::Kind::Or, std::move( xs ) );
}

BoolExpr b_implies( BoolExpr a, BoolExpr b )
{
    return BoolExpr::gate( BoolExpr::Kind::Implies, { std::move( a ), std::move( b ) } );
}

BoolExpr b_iff( BoolExpr a, BoolExpr b )
{
    return BoolExpr::gate( BoolExpr::Kind::Iff, { std::move( a ), std::move( b ) } );
}

bool BoolExpr::evaluate( const std::function< bool( const PropVar& ) >& valuation ) const
{
    const auto& c = children();
    switch ( kind() )
    {
    case Kind::Const: return value();
    case Kind::Var: return valuation( var() );
    case Kind::Not: return !c[ 0 ].evaluate( valuation );
    case Kind::And:
        for ( const auto& x : c )
            if ( !x.evaluate( valuation ) )
                return false;
        return true;
    case Kind::Or:
        for ( const auto& x : c )
            if ( x.evaluate( valuation ) )
                return true;
        return false;
    case Kind::Implies: return !c[ 0 ].evaluate( valuation ) || c[ 1 ].evaluate( valuation );
    case Kind::Iff: return c[ 0 ].evaluate( valuation ) == c[ 1 ].evaluate( valuation );
    }
    return false;
}

std::string BoolExpr::to_string() const
{
    const auto& c = children();
    auto joined = [ & ]( const char* sep ) {
        std::string s = "(";
        for ( std::size_t i = 0; i < c.size(); ++i )
        {
            if ( i )
                s += sep;
            s += c[ i ].to_string();
        }
        return s + ")";
    };
    switch ( kind() )
    {
    case Kind::Const: return value() ? "true" : "false";
    case Kind::Var: return var().to_string();
    case Kind::Not: return "~" + c[ 0 ].to_string();
    case Kind::And: return joined( " & " );
    case Kind::Or: return joined( " | " );
    case Kind::Implies: return joined( " -> " );
    case Kind::Iff: return joined( " <-> " );
    }
    return {};
}

namespace {

void count_nodes( const BoolExpr& e, std::unordered_set< const void* >& seen )
{
    if ( !seen.insert( e.id() ).second )
        return;
    for ( const auto& c : e.children() )
        count_nodes( c, seen );
}

void collect_vars( const BoolExpr& e, std::unordered_set< const void* >& seen, std::set< PropVar >& found,
                   std::vector< PropVar >& out )
{
    if ( !seen.insert( e.id() ).second )
        return;
    if ( e.kind() == BoolExpr::Kind::Var )
    {
        if ( found.insert( e.var() ).second )
            out.push_back( e.var() );
        return;
    }
    for ( const auto& c : e.children() )
        collect_vars( c, seen, found, out );
}

} // namespace

std::size_t circuit_size( const BoolExpr& e )
{
    std::unordered_set< const void* > seen;
    count_nodes( e, seen );
    return seen.size();
}

std::size_t circuit_size( const std::vector< BoolExpr >& roots )
{
    std::unordered_set< const void* > seen;
    for ( const auto& r : roots )
        count_nodes( r, seen );
    return seen.size();
}

std::vector< PropVar > variables( const BoolExpr& e )
{
    std::unordered_set< const void* > seen;
    std::set< PropVar > found;
    std::vector< PropVar > out;
    collect_vars( e, seen, found, out );
    return out;
}

// ---------------------------------------------------------------------------
// Constraint parser
// ---------------------------------------------------------------------------

namespace {

class ConstraintParser
{
public:
    explicit ConstraintParser( std::string_view text ) : text_{ text } {}

    BoolExpr parse()
    {
        auto e = parse_iff();
        skip_ws();
        if ( pos_ != text_.size() )
            error( "unexpected input" );
        return e;
    }

private:
    [[noreturn]] void error( const std::string& msg ) const
    {
        throw ParseError( msg, 1, static_cast< int >( pos_ ) + 1 );
    }

    void skip_ws()
    {
        while ( pos_ < text_.size() && std::isspace( static_cast< unsigned char >( text_[ pos_ ] ) ) )
            ++pos_;
    }

    bool accept( std::string_view s )
    {
        skip_ws();
        if ( text_.substr( pos_, s.size() ) == s )
        {
            pos_ += s.size();
            return true;
        }
        return false;
    }

    BoolExpr parse_iff()
    {
        auto lhs = parse_implies();
        while ( accept( "<->" ) )
            lhs = b_iff( lhs, parse_implies() );
        return lhs;
    }

    BoolExpr parse_implies()
    {
        auto lhs = parse_or();
        if ( accept( "->" ) )
            return b_implies( lhs, parse_implies() );
        return lhs;
    }

    BoolExpr parse_or()
    {
        std::vector< BoolExpr > xs{ parse_and() };
        while ( accept( "|" ) )
            xs.push_back( parse_and() );
        return b_or( std::move( xs ) );
    }

    BoolExpr parse_and()
    {
        std::vector< BoolExpr > xs{ parse_unary() };
        while ( accept( "&" ) )
            xs.push_back( parse_unary() );
        return b_and( std::move( xs ) );
    }

    std::string state_name()
    {
        skip_ws();
        std::size_t start = pos_;
        while ( pos_ < text_.size() && text_[ pos_ ] != ',' && text_[ pos_ ] != ')' &&
                !std::isspace( static_cast< unsigned char >( text_[ pos_ ] ) ) )
            ++pos_;
        if ( pos_ == start )
            error( "expected state name" );
        return std::string( text_.substr( start, pos_ - start ) );
    }

    BoolExpr parse_unary()
    {
        if ( accept( "~" ) || accept( "!" ) )
            return b_not( parse_unary() );
        if ( accept( "(" ) )
        {
            auto e = parse_iff();
            if ( !accept( ")" ) )
                error( "expected ')'" );
            return e;
        }
        if ( accept( "true" ) )
            return BoolExpr::constant( true );
        if ( accept( "false" ) )
            return BoolExpr::constant( false );
        if ( accept( "E(" ) )
        {
            auto s = state_name();
            if ( !accept( "," ) )
                error( "expected ','" );
            auto t = state_name();
            if ( !accept( ")" ) )
                error( "expected ')'" );
            return BoolExpr::var( PropVar::edge( StateId{ s }, StateId{ t } ) );
        }
        if ( accept( "N(" ) )
        {
            auto s = state_name();
            if ( !accept( ")" ) )
                error( "expected ')'" );
            return BoolExpr::var( PropVar::node( StateId{ s } ) );
        }
        error( "expected E(s,t), N(s), true, false, '~' or '('" );
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace

BoolExpr parse_constraint( std::string_view text )
{
    return ConstraintParser( text ).parse();
}

} // namespace mrepair
