#pragma once

// Independent reference implementations used by the tests. Nothing here calls
// the library's checker, encoder or solver.

#include "mrepair/boolexpr.hpp"
#include "mrepair/cnf.hpp"
#include "mrepair/formula.hpp"
#include "mrepair/kripke.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using namespace mrepair;

using Bits = std::vector< bool >;

struct Graph
{
    int n = 0;
    int init = 0;
    std::vector< StateId > names;
    std::vector< std::vector< int > > succ;
    std::vector< std::set< std::string > > labels;
    std::vector< std::string > owner; // games only
};

inline Graph graph_of( const KripkeStructure& m, const std::set< Edge >& edges )
{
    Graph g;
    std::map< StateId, int > idx;
    for ( const auto& s : m.states )
    {
        idx[ s ] = g.n++;
        g.names.push_back( s );
        g.labels.push_back( m.labels.at( s ) );
    }
    g.succ.resize( static_cast< std::size_t >( g.n ) );
    for ( const auto& [ a, b ] : edges )
        g.succ[ static_cast< std::size_t >( idx.at( a ) ) ].push_back( idx.at( b ) );
    g.init = idx.at( m.initial );
    return g;
}

inline Graph graph_of( const KripkeStructure& m ) { return graph_of( m, m.transitions ); }

inline Graph graph_of( const GameStructure& gs )
{
    Graph g = graph_of( gs.base );
    for ( const auto& s : g.names )
        g.owner.push_back( gs.turn.at( s ) );
    return g;
}

/// States with a path s = s0 .. sk where sk is in `target` and s0..s(k-1) are in `allowed`.
inline Bits reach_within( const Graph& g, const Bits& allowed, const Bits& target )
{
    Bits out = target;
    bool changed = true;
    while ( changed )
    {
        changed = false;
        for ( int s = 0; s < g.n; ++s )
        {
            if ( out[ s ] || !allowed[ s ] )
                continue;
            for ( int t : g.succ[ s ] )
                if ( out[ t ] )
                {
                    out[ s ] = true;
                    changed = true;
                    break;
                }
        }
    }
    return out;
}

/// States with an infinite path that stays inside `allowed`: they reach (inside
/// `allowed`) a state that lies on an `allowed` cycle.
inline Bits loop_within( const Graph& g, const Bits& allowed )
{
    Bits on_cycle( static_cast< std::size_t >( g.n ), false );
    for ( int v = 0; v < g.n; ++v )
    {
        if ( !allowed[ v ] )
            continue;
        Bits seen( static_cast< std::size_t >( g.n ), false );
        std::deque< int > q;
        for ( int t : g.succ[ v ] )
            if ( allowed[ t ] && !seen[ t ] )
            {
                seen[ t ] = true;
                q.push_back( t );
            }
        while ( !q.empty() )
        {
            int u = q.front();
            q.pop_front();
            for ( int t : g.succ[ u ] )
                if ( allowed[ t ] && !seen[ t ] )
                {
                    seen[ t ] = true;
                    q.push_back( t );
                }
        }
        on_cycle[ v ] = seen[ v ];
    }
    Bits all_allowed = allowed;
    Bits target( static_cast< std::size_t >( g.n ), false );
    for ( int v = 0; v < g.n; ++v )
        target[ v ] = on_cycle[ v ];
    Bits out = reach_within( g, all_allowed, target );
    for ( int v = 0; v < g.n; ++v )
        out[ v ] = out[ v ] && allowed[ v ];
    return out;
}

inline Bits b_not( Bits a )
{
    a.flip();
    return a;
}
inline Bits b_and( const Bits& a, const Bits& b )
{
    Bits r( a.size() );
    for ( std::size_t i = 0; i < a.size(); ++i )
        r[ i ] = a[ i ] && b[ i ];
    return r;
}
inline Bits b_or( const Bits& a, const Bits& b )
{
    Bits r( a.size() );
    for ( std::size_t i = 0; i < a.size(); ++i )
        r[ i ] = a[ i ] || b[ i ];
    return r;
}

/// Universal path operators on a graph (every path from the state).
inline Bits all_next( const Graph& g, const Bits& a )
{
    Bits r( static_cast< std::size_t >( g.n ) );
    for ( int s = 0; s < g.n; ++s )
    {
        bool v = true;
        for ( int t : g.succ[ s ] )
            v = v && a[ t ];
        r[ s ] = v;
    }
    return r;
}
inline Bits some_next( const Graph& g, const Bits& a )
{
    Bits r( static_cast< std::size_t >( g.n ) );
    for ( int s = 0; s < g.n; ++s )
    {
        bool v = false;
        for ( int t : g.succ[ s ] )
            v = v || a[ t ];
        r[ s ] = v;
    }
    return r;
}
inline Bits exists_until( const Graph& g, const Bits& a, const Bits& b ) { return reach_within( g, a, b ); }
inline Bits all_until( const Graph& g, const Bits& a, const Bits& b )
{
    Bits stuck = b_and( a, b_not( b ) );
    return b_not( b_or( loop_within( g, stuck ), reach_within( g, stuck, b_and( b_not( a ), b_not( b ) ) ) ) );
}
// A path violates a V b iff some position has ~b and every earlier position has ~a.
inline Bits all_release( const Graph& g, const Bits& a, const Bits& b )
{
    return b_not( reach_within( g, b_not( a ), b_not( b ) ) );
}
inline Bits exists_release( const Graph& g, const Bits& a, const Bits& b )
{
    return b_or( reach_within( g, b, b_and( a, b ) ), loop_within( g, b ) );
}

/// Keeps only the chosen successor at every state in `choice` (state -> successor).
inline Graph restrict_choices( const Graph& g, const std::map< int, int >& choice )
{
    Graph h = g;
    for ( const auto& [ s, t ] : choice )
        h.succ[ s ] = { t };
    return h;
}

/// Path-semantics CTL/ATL evaluation of any (sugared or core) formula.
inline Bits eval( const Graph& g, const Formula& f )
{
    const auto n = static_cast< std::size_t >( g.n );
    switch ( f.op() )
    {
    case Op::True:
        return Bits( n, true );
    case Op::False:
        return Bits( n, false );
    case Op::Prop: {
        Bits r( n );
        for ( int s = 0; s < g.n; ++s )
            r[ s ] = g.labels[ s ].contains( f.name() );
        return r;
    }
    case Op::Not:
        return b_not( eval( g, f.lhs() ) );
    case Op::And:
        return b_and( eval( g, f.lhs() ), eval( g, f.rhs() ) );
    case Op::Or:
        return b_or( eval( g, f.lhs() ), eval( g, f.rhs() ) );
    case Op::Implies:
        return b_or( b_not( eval( g, f.lhs() ) ), eval( g, f.rhs() ) );
    case Op::AX:
        return all_next( g, eval( g, f.lhs() ) );
    case Op::EX:
        return some_next( g, eval( g, f.lhs() ) );
    case Op::EF:
        return reach_within( g, Bits( n, true ), eval( g, f.lhs() ) );
    case Op::AG:
        return b_not( reach_within( g, Bits( n, true ), b_not( eval( g, f.lhs() ) ) ) );
    case Op::EG:
        return loop_within( g, eval( g, f.lhs() ) );
    case Op::AF:
        return b_not( loop_within( g, b_not( eval( g, f.lhs() ) ) ) );
    case Op::EU:
        return exists_until( g, eval( g, f.lhs() ), eval( g, f.rhs() ) );
    case Op::AU:
        return all_until( g, eval( g, f.lhs() ), eval( g, f.rhs() ) );
    case Op::AV:
        return all_release( g, eval( g, f.lhs() ), eval( g, f.rhs() ) );
    case Op::EV:
        return exists_release( g, eval( g, f.lhs() ), eval( g, f.rhs() ) );
    case Op::CoalX:
    case Op::CoalF:
    case Op::CoalG:
    case Op::CoalU:
    case Op::CoalV: {
        // Memoryless strategy enumeration for the coalition at each state.
        Bits a = eval( g, f.lhs() );
        Bits b = f.children().size() > 1 ? eval( g, f.rhs() ) : Bits{};
        std::vector< int > mine;
        for ( int s = 0; s < g.n; ++s )
            if ( f.coalition().contains( g.owner[ static_cast< std::size_t >( s ) ] ) && !g.succ[ s ].empty() )
                mine.push_back( s );
        Bits result( n, false );
        std::vector< std::size_t > pick( mine.size(), 0 );
        while ( true )
        {
            std::map< int, int > choice;
            for ( std::size_t i = 0; i < mine.size(); ++i )
                choice[ mine[ i ] ] = g.succ[ mine[ i ] ][ pick[ i ] ];
            Graph h = restrict_choices( g, choice );
            Bits r;
            switch ( f.op() )
            {
            case Op::CoalX:
                r = all_next( h, a );
                break;
            case Op::CoalF:
                r = all_until( h, Bits( n, true ), a );
                break;
            case Op::CoalG:
                r = all_release( h, Bits( n, false ), a );
                break;
            case Op::CoalU:
                r = all_until( h, a, b );
                break;
            default:
                r = all_release( h, a, b );
                break;
            }
            result = b_or( result, r );
            std::size_t i = 0;
            for ( ; i < mine.size(); ++i )
            {
                if ( ++pick[ i ] < g.succ[ mine[ i ] ].size() )
                    break;
                pick[ i ] = 0;
            }
            if ( i == mine.size() )
                break;
        }
        return result;
    }
    }
    return {};
}

inline bool holds( const KripkeStructure& m, const Formula& f )
{
    Graph g = graph_of( m );
    return eval( g, f )[ g.init ];
}

inline bool holds( const GameStructure& gs, const Formula& f )
{
    Graph g = graph_of( gs );
    return eval( g, f )[ g.init ];
}

/// Every state reachable from the initial state over `kept` has a kept successor.
inline bool total_from_init( const Graph& g )
{
    Bits seen( static_cast< std::size_t >( g.n ), false );
    std::deque< int > q{ g.init };
    seen[ g.init ] = true;
    while ( !q.empty() )
    {
        int u = q.front();
        q.pop_front();
        if ( g.succ[ u ].empty() )
            return false;
        for ( int t : g.succ[ u ] )
            if ( !seen[ t ] )
            {
                seen[ t ] = true;
                q.push_back( t );
            }
    }
    return true;
}

/// All kept-edge sets whose reachable part is total and satisfies f at the
/// initial state. Games keep their turn function.
inline std::set< std::set< Edge > > repairs( const KripkeStructure& m, const Formula& f,
                                             const std::map< StateId, std::string >* turn = nullptr,
                                             const std::function< bool( const std::set< Edge >& ) >& admissible = {} )
{
    std::vector< Edge > all( m.transitions.begin(), m.transitions.end() );
    std::set< std::set< Edge > > out;
    for ( std::uint32_t mask = 0; mask < ( 1u << all.size() ); ++mask )
    {
        std::set< Edge > kept;
        for ( std::size_t i = 0; i < all.size(); ++i )
            if ( mask & ( 1u << i ) )
                kept.insert( all[ i ] );
        if ( admissible && !admissible( kept ) )
            continue;
        Graph g = graph_of( m, kept );
        if ( turn )
            for ( const auto& s : g.names )
                g.owner.push_back( turn->at( s ) );
        if ( !total_from_init( g ) )
            continue;
        if ( eval( g, f )[ g.init ] )
            out.insert( kept );
    }
    return out;
}

inline bool repairable( const KripkeStructure& m, const Formula& f ) { return !repairs( m, f ).empty(); }

// ---------------------------------------------------------------------------
// Propositional oracles

/// Truth-table satisfiability for at most 24 variables.
inline bool tt_sat( int num_vars, const std::vector< std::vector< int > >& clauses )
{
    std::vector< std::pair< std::uint32_t, std::uint32_t > > masks;
    for ( const auto& c : clauses )
    {
        std::uint32_t pos = 0, neg = 0;
        for ( int l : c )
            ( l > 0 ? pos : neg ) |= 1u << ( std::abs( l ) - 1 );
        masks.emplace_back( pos, neg );
    }
    for ( std::uint32_t a = 0; a < ( 1u << num_vars ); ++a )
    {
        bool ok = true;
        for ( const auto& [ pos, neg ] : masks )
            if ( !( a & pos ) && !( ~a & neg ) )
            {
                ok = false;
                break;
            }
        if ( ok )
            return true;
    }
    return false;
}

inline std::vector< std::vector< int > > random_kcnf( std::mt19937_64& rng, int num_vars, int num_clauses, int k )
{
    std::uniform_int_distribution< int > var( 1, num_vars );
    std::bernoulli_distribution sign( 0.5 );
    std::vector< std::vector< int > > out;
    for ( int i = 0; i < num_clauses; ++i )
    {
        std::vector< int > c;
        for ( int j = 0; j < k; ++j )
            c.push_back( sign( rng ) ? var( rng ) : -var( rng ) );
        out.push_back( c );
    }
    return out;
}

inline PropVar leaf( int i ) { return PropVar::node( StateId{ "v" + std::to_string( i ) } ); }

inline BoolExpr random_circuit( std::mt19937_64& rng, int num_vars, int depth )
{
    std::uniform_int_distribution< int > pick( 0, depth <= 0 ? 1 : 7 );
    int k = pick( rng );
    if ( k <= 1 )
    {
        if ( std::uniform_int_distribution< int >( 0, 15 )( rng ) == 0 )
            return BoolExpr::constant( k == 1 );
        return BoolExpr::var( leaf( std::uniform_int_distribution< int >( 0, num_vars - 1 )( rng ) ) );
    }
    auto sub = [ & ] { return random_circuit( rng, num_vars, depth - 1 ); };
    switch ( k )
    {
    case 2:
        return mrepair::b_not( sub() );
    case 3:
        return mrepair::b_and( { sub(), sub(), sub() } );
    case 4:
        return mrepair::b_or( { sub(), sub() } );
    case 5:
        return mrepair::b_implies( sub(), sub() );
    case 6:
        return mrepair::b_iff( sub(), sub() );
    default:
        return mrepair::b_and( { sub(), sub() } );
    }
}

// ---------------------------------------------------------------------------
// Random structures and formulas

inline KripkeStructure random_structure( std::mt19937_64& rng, int n, double p, const std::set< std::string >& ap )
{
    KripkeStructure m;
    std::bernoulli_distribution edge( p ), coin( 0.5 );
    std::vector< StateId > ids;
    for ( int i = 0; i < n; ++i )
        ids.emplace_back( "s" + std::to_string( i ) );
    m.initial = ids[ 0 ];
    m.ap = ap;
    for ( const auto& s : ids )
    {
        m.states.insert( s );
        auto& l = m.labels[ s ];
        for ( const auto& a : ap )
            if ( coin( rng ) )
                l.insert( a );
    }
    for ( const auto& s : ids )
    {
        bool any = false;
        for ( const auto& t : ids )
            if ( edge( rng ) )
            {
                m.transitions.insert( { s, t } );
                any = true;
            }
        if ( !any )
            m.transitions.insert( { s, ids[ std::uniform_int_distribution< int >( 0, n - 1 )( rng ) ] } );
    }
    return m;
}

/// Random CTL formula over {p, q} using every operator (sugar included).
inline Formula random_ctl( std::mt19937_64& rng, int depth )
{
    std::uniform_int_distribution< int > pick( 0, depth <= 0 ? 3 : 20 );
    int k = pick( rng );
    auto sub = [ & ] { return random_ctl( rng, depth - 1 ); };
    switch ( k )
    {
    case 0:
    case 1:
        return fml::prop( "p" );
    case 2:
        return fml::prop( "q" );
    case 3:
        return std::uniform_int_distribution< int >( 0, 3 )( rng ) == 0 ? fml::tt() : fml::prop( "q" );
    case 4:
        return fml::neg( sub() );
    case 5:
        return fml::conj( sub(), sub() );
    case 6:
        return fml::disj( sub(), sub() );
    case 7:
        return fml::implies( sub(), sub() );
    case 8:
        return fml::AX( sub() );
    case 9:
        return fml::EX( sub() );
    case 10:
        return fml::AF( sub() );
    case 11:
        return fml::EF( sub() );
    case 12:
        return fml::AG( sub() );
    case 13:
        return fml::EG( sub() );
    case 14:
        return fml::AU( sub(), sub() );
    case 15:
        return fml::EU( sub(), sub() );
    case 16:
        return fml::AV( sub(), sub() );
    case 17:
        return fml::EV( sub(), sub() );
    case 18:
        return fml::ff();
    default:
        return fml::conj( sub(), sub() );
    }
}

/// Random formula of the universal fragment in negation normal form:
/// literals, true/false, &, |, AX, A[. V .] and the derived AG.
inline Formula random_actl( std::mt19937_64& rng, int depth )
{
    std::uniform_int_distribution< int > pick( 0, depth <= 0 ? 4 : 10 );
    int k = pick( rng );
    auto sub = [ & ] { return random_actl( rng, depth - 1 ); };
    switch ( k )
    {
    case 0:
        return fml::prop( "p" );
    case 1:
        return fml::prop( "q" );
    case 2:
        return fml::neg( fml::prop( "p" ) );
    case 3:
        return fml::neg( fml::prop( "q" ) );
    case 4:
        return fml::tt();
    case 5:
        return fml::conj( sub(), sub() );
    case 6:
        return fml::disj( sub(), sub() );
    case 7:
    case 8:
        return fml::AX( sub() );
    case 9:
        return fml::AV( sub(), sub() );
    default:
        return fml::AG( sub() );
    }
}

inline GameStructure random_game( std::mt19937_64& rng, int n, double p, const std::set< std::string >& ap,
                                  const std::set< std::string >& players )
{
    GameStructure g;
    g.base = random_structure( rng, n, p, ap );
    g.players = players;
    std::vector< std::string > ps( players.begin(), players.end() );
    for ( const auto& s : g.base.states )
        g.turn[ s ] = ps[ std::uniform_int_distribution< std::size_t >( 0, ps.size() - 1 )( rng ) ];
    return g;
}

} // namespace oracle
