#include "mrepair/checker.hpp"

#include "mrepair/error.hpp"

#include <algorithm>
#include <sstream>

namespace mrepair {

LabelMap::LabelMap( std::vector< StateId > states, std::vector< Formula > formulas )
        : states_{ std::move( states ) }, formulas_{ std::move( formulas ) }
{
    for ( std::size_t i = 0; i < formulas_.size(); ++i )
        index_.emplace( formulas_[ i ].key(), i );
    truth_.assign( formulas_.size(), std::vector< bool >( states_.size(), false ) );
}

std::size_t LabelMap::formula_index( const Formula& f ) const
{
    auto it = index_.find( f.key() );
    if ( it == index_.end() )
        throw InvalidInput( "formula not in closure: " + f.key() );
    return it->second;
}

bool LabelMap::holds( const StateId& s, const Formula& f ) const
{
    auto it = std::lower_bound( states_.begin(), states_.end(), s );
    if ( it == states_.end() || *it != s )
        throw InvalidInput( "unknown state '" + s.name + "'" );
    return truth_[ formula_index( f ) ][ static_cast< std::size_t >( it - states_.begin() ) ];
}

std::string LabelMap::to_table() const
{
    std::ostringstream os;
    os << "formula";
    for ( const auto& s : states_ )
        os << '\t' << s.name;
    os << '\n';
    for ( std::size_t f = 0; f < formulas_.size(); ++f )
    {
        os << formulas_[ f ].key();
        for ( std::size_t s = 0; s < states_.size(); ++s )
            os << '\t' << ( truth_[ f ][ s ] ? 'T' : 'F' );
        os << '\n';
    }
    return os.str();
}

namespace {

void require_checkable( const KripkeStructure& m, const Formula& eta )
{
    auto v = validate( m );
    if ( !v.empty() )
        throw InvalidInput( "invalid structure: " + v.front().to_string() );
    if ( !is_total( m ) )
        throw InvalidInput( "structure is not total" );
    for ( const auto& p : propositions( eta ) )
        if ( !m.ap.contains( p ) )
            throw InvalidInput( "unknown proposition '" + p + "'" );
}

/// Shared labelling loop. `existential_at(s, f)` tells whether the next-step
/// quantifier of the temporal formula f is existential at state s.
template < typename Choice >
LabelMap label_all( const StateGraph& g, const std::vector< Formula >& closure, Choice existential_at )
{
    std::vector< StateId > names;
    for ( std::size_t i = 0; i < g.size(); ++i )
        names.push_back( g.name( static_cast< int >( i ) ) );
    LabelMap lm( names, closure );
    const std::size_t n = g.size();

    auto next = [ & ]( std::size_t s, bool existential, const std::vector< bool >& target ) {
        auto succ = g.successors( static_cast< int >( s ) );
        if ( existential )
            return std::any_of( succ.begin(), succ.end(), [ & ]( int t ) { return target[ static_cast< std::size_t >( t ) ]; } );
        return std::all_of( succ.begin(), succ.end(), [ & ]( int t ) { return target[ static_cast< std::size_t >( t ) ]; } );
    };
    auto column = [ & ]( std::size_t f ) {
        std::vector< bool > v( n );
        for ( std::size_t s = 0; s < n; ++s )
            v[ s ] = lm.holds( s, f );
        return v;
    };

    for ( std::size_t fi = 0; fi < closure.size(); ++fi )
    {
        const auto& f = closure[ fi ];
        switch ( f.op() )
        {
        case Op::True:
            for ( std::size_t s = 0; s < n; ++s )
                lm.set( s, fi, true );
            break;
        case Op::False: break;
        case Op::Prop:
            for ( std::size_t s = 0; s < n; ++s )
                lm.set( s, fi, g.has_label( static_cast< int >( s ), f.name() ) );
            break;
        case Op::Not:
        {
            auto a = lm.formula_index( f.lhs() );
            for ( std::size_t s = 0; s < n; ++s )
                lm.set( s, fi, !lm.holds( s, a ) );
            break;
        }
        case Op::And:
        case Op::Or:
        {
            auto a = lm.formula_index( f.lhs() );
            auto b = lm.formula_index( f.rhs() );
            for ( std::size_t s = 0; s < n; ++s )
                lm.set( s, fi, f.op() == Op::And ? lm.holds( s, a ) && lm.holds( s, b ) : lm.holds( s, a ) || lm.holds( s, b ) );
            break;
        }
        case Op::AX:
        case Op::EX:
        case Op::CoalX:
        {
            auto target = column( lm.formula_index( f.lhs() ) );
            for ( std::size_t s = 0; s < n; ++s )
                lm.set( s, fi, next( s, existential_at( s, f ), target ) );
            break;
        }
        case Op::AV:
        case Op::EV:
        case Op::CoalV:
        {
            // gfp Z. psi & (phi | next Z)
            auto phi = column( lm.formula_index( f.lhs() ) );
            auto psi = column( lm.formula_index( f.rhs() ) );
            std::vector< bool > z( n, true );
            bool changed = true;
            while ( changed )
            {
                changed = false;
                std::vector< bool > nz( n );
                for ( std::size_t s = 0; s < n; ++s )
                    nz[ s ] = psi[ s ] && ( phi[ s ] || next( s, existential_at( s, f ), z ) );
                if ( nz != z )
                {
                    z = std::move( nz );
                    changed = true;
                }
            }
            for ( std::size_t s = 0; s < n; ++s )
                lm.set( s, fi, z[ s ] );
            break;
        }
        default: throw InvalidInput( "formula is not in core form: " + f.key() );
        }
    }
    return lm;
}

} // namespace

CheckResult check_ctl( const KripkeStructure& m, const Formula& eta )
{
    if ( !is_ctl( eta ) )
        throw InvalidInput( "not a CTL formula: " + eta.key() );
    auto core = desugar( eta );
    require_checkable( m, core );
    StateGraph g( m );
    auto labels = label_all( g, sub( core ), []( std::size_t, const Formula& f ) {
        return f.op() == Op::EX || f.op() == Op::EV;
    } );
    bool holds = labels.holds( static_cast< std::size_t >( g.initial() ), labels.formula_index( core ) );
    return { holds, std::move( labels ) };
}

CheckResult check_atl( const GameStructure& game, const Formula& eta )
{
    if ( !is_atl( eta ) )
        throw InvalidInput( "not an ATL formula: " + eta.key() );
    auto v = validate( game );
    if ( !v.empty() )
        throw InvalidInput( "invalid game structure: " + v.front().to_string() );
    auto core = atl_desugar( eta, game.players );
    require_checkable( game.base, core );
    StateGraph g( game.base );
    std::vector< std::string > owner( g.size() );
    for ( std::size_t s = 0; s < g.size(); ++s )
        owner[ s ] = game.turn.at( g.name( static_cast< int >( s ) ) );
    auto labels = label_all( g, atl_sub( core ), [ & ]( std::size_t s, const Formula& f ) {
        return f.coalition().contains( owner[ s ] );
    } );
    bool holds = labels.holds( static_cast< std::size_t >( g.initial() ), labels.formula_index( core ) );
    return { holds, std::move( labels ) };
}

} // namespace mrepair
