#include "mrepair/encoder.hpp"

#include "mrepair/error.hpp"

#include <map>
#include <sstream>

namespace mrepair {

std::string to_string( Group g )
{
    switch ( g )
    {
    case Group::Spec: return "spec";
    case Group::Totality: return "totality";
    case Group::Labeling: return "labeling";
    case Group::Consistency: return "consistency";
    case Group::Nexttime: return "nexttime";
    case Group::Release: return "release";
    case Group::Reachability: return "reachability";
    case Group::Desc: return "desc";
    case Group::StateDeletion: return "state-deletion";
    case Group::Symmetry: return "symmetry";
    case Group::Family: return "family";
    case Group::Custom: return "custom";
    }
    return "?";
}

RepairFormula::RepairFormula( KripkeStructure m, std::vector< Conjunct > conjuncts )
        : structure_{ std::move( m ) }, conjuncts_{ std::move( conjuncts ) }
{
}

BoolExpr RepairFormula::expr() const
{
    std::vector< BoolExpr > xs;
    xs.reserve( conjuncts_.size() );
    for ( const auto& c : conjuncts_ )
        xs.push_back( c.expr );
    return b_and( std::move( xs ) );
}

std::size_t RepairFormula::size() const
{
    std::vector< BoolExpr > xs;
    for ( const auto& c : conjuncts_ )
        xs.push_back( c.expr );
    return circuit_size( xs );
}

std::string RepairFormula::dump() const
{
    std::ostringstream os;
    for ( const auto& c : conjuncts_ )
        os << '[' << to_string( c.group ) << "] " << c.expr.to_string() << '\n';
    return os.str();
}

void RepairFormula::remove_group( Group g )
{
    std::erase_if( conjuncts_, [ g ]( const Conjunct& c ) { return c.group == g; } );
}

namespace {

/// Leaf cache and the parts shared between the CTL and ATL encodings.
class Encoder
{
public:
    Encoder( const KripkeStructure& m, std::vector< Formula > closure )
            : m_{ m }, g_{ m }, closure_{ std::move( closure ) }
    {
        for ( std::size_t i = 0; i < closure_.size(); ++i )
            index_.emplace( closure_[ i ].key(), i );
        sat_.resize( closure_.size() );
        for ( std::size_t f = 0; f < closure_.size(); ++f )
            for ( std::size_t s = 0; s < g_.size(); ++s )
                sat_[ f ].push_back( BoolExpr::var( PropVar::sat( name( s ), closure_[ f ] ) ) );
        edge_.resize( g_.size() );
        for ( std::size_t s = 0; s < g_.size(); ++s )
            for ( int t : g_.successors( static_cast< int >( s ) ) )
                edge_[ s ].push_back( BoolExpr::var( PropVar::edge( name( s ), g_.name( t ) ) ) );
    }

    const StateId& name( std::size_t s ) const { return g_.name( static_cast< int >( s ) ); }
    std::size_t n() const { return g_.size(); }

    const BoolExpr& X( std::size_t s, const Formula& f ) const { return sat_[ index_.at( f.key() ) ][ s ]; }

    /// Next-step combination over the successors of s, applied to per-state targets.
    BoolExpr next( std::size_t s, bool existential, const std::vector< BoolExpr >& target ) const
    {
        auto succ = g_.successors( static_cast< int >( s ) );
        std::vector< BoolExpr > xs;
        for ( std::size_t k = 0; k < succ.size(); ++k )
        {
            const auto& e = edge_[ s ][ k ];
            const auto& x = target[ static_cast< std::size_t >( succ[ k ] ) ];
            xs.push_back( existential ? b_and( { e, x } ) : b_implies( e, x ) );
        }
        return existential ? b_or( std::move( xs ) ) : b_and( std::move( xs ) );
    }

    std::vector< BoolExpr > column( const Formula& f ) const { return sat_[ index_.at( f.key() ) ]; }

    template < typename ExistentialAt > std::vector< Conjunct > encode( const Formula& eta, ExistentialAt existential_at )
    {
        std::vector< Conjunct > out;
        auto add = [ & ]( Group grp, BoolExpr e ) { out.push_back( { grp, std::move( e ) } ); };

        add( Group::Spec, X( static_cast< std::size_t >( g_.initial() ), eta ) );

        for ( std::size_t s = 0; s < n(); ++s )
            add( Group::Totality, b_or( edge_[ s ] ) );

        for ( std::size_t s = 0; s < n(); ++s )
        {
            for ( const auto& p : m_.ap )
            {
                auto it = index_.find( p );
                auto x = it != index_.end() ? sat_[ it->second ][ s ] : BoolExpr::var( PropVar::sat( name( s ), fml::prop( p ) ) );
                add( Group::Labeling, g_.has_label( static_cast< int >( s ), p ) ? x : b_not( x ) );
            }
            if ( index_.contains( "true" ) )
                add( Group::Labeling, X( s, fml::tt() ) );
            if ( index_.contains( "false" ) )
                add( Group::Labeling, b_not( X( s, fml::ff() ) ) );
        }

        for ( const auto& f : closure_ )
        {
            switch ( f.op() )
            {
            case Op::True:
            case Op::False:
            case Op::Prop: break;
            case Op::Not:
                for ( std::size_t s = 0; s < n(); ++s )
                    add( Group::Consistency, b_iff( X( s, f ), b_not( X( s, f.lhs() ) ) ) );
                break;
            case Op::And:
            case Op::Or:
                for ( std::size_t s = 0; s < n(); ++s )
                {
                    std::vector< BoolExpr > ops{ X( s, f.lhs() ), X( s, f.rhs() ) };
                    add( Group::Consistency, b_iff( X( s, f ), f.op() == Op::And ? b_and( ops ) : b_or( ops ) ) );
                }
                break;
            case Op::AX:
            case Op::EX:
            case Op::CoalX:
            {
                auto target = column( f.lhs() );
                for ( std::size_t s = 0; s < n(); ++s )
                    add( Group::Nexttime, b_iff( X( s, f ), next( s, existential_at( s, f ), target ) ) );
                break;
            }
            case Op::AV:
            case Op::EV:
            case Op::CoalV: encode_release( f, existential_at, out ); break;
            default: throw InvalidInput( "formula is not in core form: " + f.key() );
            }
        }
        return out;
    }

private:
    template < typename ExistentialAt >
    void encode_release( const Formula& f, ExistentialAt existential_at, std::vector< Conjunct >& out )
    {
        const int levels = static_cast< int >( n() );
        std::vector< BoolExpr > prev;
        for ( std::size_t s = 0; s < n(); ++s )
        {
            prev.push_back( BoolExpr::var( PropVar::sat_level( name( s ), f, 0 ) ) );
            out.push_back( { Group::Release, b_iff( prev.back(), X( s, f.rhs() ) ) } );
        }
        for ( int m = 1; m <= levels; ++m )
        {
            std::vector< BoolExpr > cur;
            for ( std::size_t s = 0; s < n(); ++s )
            {
                cur.push_back( BoolExpr::var( PropVar::sat_level( name( s ), f, m ) ) );
                auto step = b_and( { X( s, f.rhs() ), b_or( { X( s, f.lhs() ), next( s, existential_at( s, f ), prev ) } ) } );
                out.push_back( { Group::Release, b_iff( cur.back(), step ) } );
            }
            prev = std::move( cur );
        }
        for ( std::size_t s = 0; s < n(); ++s )
            out.push_back( { Group::Release, b_iff( X( s, f ), prev[ s ] ) } );
    }

    const KripkeStructure& m_;
    StateGraph g_;
    std::vector< Formula > closure_;
    std::map< std::string, std::size_t > index_;
    std::vector< std::vector< BoolExpr > > sat_;  // [formula][state]
    std::vector< std::vector< BoolExpr > > edge_; // [state][k-th successor]
};

void require_encodable( const KripkeStructure& m, const Formula& eta )
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

std::vector< BoolExpr > reachability_conjuncts( const KripkeStructure& m )
{
    StateGraph g( m );
    const std::size_t n = g.size();
    std::vector< BoolExpr > out;
    std::vector< BoolExpr > prev;
    for ( std::size_t s = 0; s < n; ++s )
    {
        prev.push_back( BoolExpr::var( PropVar::reach_level( g.name( static_cast< int >( s ) ), 0 ) ) );
        out.push_back( static_cast< int >( s ) == g.initial() ? prev.back() : b_not( prev.back() ) );
    }
    std::map< std::pair< int, int >, BoolExpr > edges;
    for ( const auto& [ a, b ] : m.transitions )
        edges.emplace( std::pair{ g.index( a ), g.index( b ) }, BoolExpr::var( PropVar::edge( a, b ) ) );

    for ( std::size_t level = 1; level <= n; ++level )
    {
        std::vector< BoolExpr > cur;
        for ( std::size_t s = 0; s < n; ++s )
        {
            const auto& name = g.name( static_cast< int >( s ) );
            cur.push_back( BoolExpr::var( PropVar::reach_level( name, static_cast< int >( level ) ) ) );
            std::vector< BoolExpr > ways{ prev[ s ] };
            for ( int t : g.predecessors( static_cast< int >( s ) ) )
                ways.push_back( b_and( { prev[ static_cast< std::size_t >( t ) ], edges.at( { t, static_cast< int >( s ) } ) } ) );
            out.push_back( b_iff( cur.back(), b_or( std::move( ways ) ) ) );
        }
        prev = std::move( cur );
    }
    for ( std::size_t s = 0; s < n; ++s )
        out.push_back( b_iff( BoolExpr::var( PropVar::reach( g.name( static_cast< int >( s ) ) ) ), prev[ s ] ) );
    return out;
}

void require_edge( const KripkeStructure& m, const Edge& e, const char* what )
{
    if ( !m.transitions.contains( e ) )
        throw InvalidInput( std::string( what ) + " " + edge_to_string( e ) + " is not a transition" );
}

void require_state( const KripkeStructure& m, const StateId& s, const char* what )
{
    if ( !m.states.contains( s ) )
        throw InvalidInput( std::string( what ) + " '" + s.name + "' is not a state" );
}

BoolExpr edge_var( const Edge& e )
{
    return BoolExpr::var( PropVar::edge( e ) );
}

void check_custom_vars( const RepairFormula& e, const BoolExpr& c )
{
    for ( const auto& v : variables( c ) )
    {
        switch ( v.kind )
        {
        case PropVar::Kind::Edge: require_edge( e.structure(), { v.s, v.t }, "constraint edge" ); break;
        case PropVar::Kind::Node:
            require_state( e.structure(), v.s, "constraint state" );
            if ( !e.has_node_vars() )
                throw InvalidInput( "constraint uses " + v.to_string() + " but state deletion is not enabled" );
            break;
        default: throw InvalidInput( "constraint may only reference E(s,t) and N(s), found " + v.to_string() );
        }
    }
}

} // namespace

RepairFormula encode_ctl_repair( const KripkeStructure& m, const Formula& eta )
{
    if ( !is_ctl_core( eta ) )
        throw InvalidInput( "encode_ctl_repair expects a core CTL formula: " + eta.key() );
    require_encodable( m, eta );
    Encoder enc( m, sub( eta ) );
    auto conjuncts = enc.encode( eta, []( std::size_t, const Formula& f ) {
        return f.op() == Op::EX || f.op() == Op::EV;
    } );
    return { m, std::move( conjuncts ) };
}

RepairFormula encode_atl_repair( const GameStructure& game, const Formula& eta )
{
    if ( !is_atl_core( eta ) )
        throw InvalidInput( "encode_atl_repair expects a core ATL formula: " + eta.key() );
    auto v = validate( game );
    if ( !v.empty() )
        throw InvalidInput( "invalid game structure: " + v.front().to_string() );
    require_encodable( game.base, eta );
    StateGraph g( game.base );
    std::vector< std::string > owner;
    for ( std::size_t s = 0; s < g.size(); ++s )
        owner.push_back( game.turn.at( g.name( static_cast< int >( s ) ) ) );

    Encoder enc( game.base, atl_sub( eta ) );
    auto conjuncts = enc.encode( eta, [ & ]( std::size_t s, const Formula& f ) {
        return f.coalition().contains( owner[ s ] );
    } );
    return { game.base, std::move( conjuncts ) };
}

BoolExpr encode_reachability( const KripkeStructure& m )
{
    auto v = validate( m );
    if ( !v.empty() )
        throw InvalidInput( "invalid structure: " + v.front().to_string() );
    return b_and( reachability_conjuncts( m ) );
}

RepairFormula conjoin_reachability( RepairFormula e )
{
    if ( e.has_reach_vars() )
        return e;
    for ( auto& c : reachability_conjuncts( e.structure() ) )
        e.add( Group::Reachability, std::move( c ) );
    e.mark_reach_vars();
    return e;
}

RepairFormula conjoin_desc( RepairFormula e, const std::set< Edge >& uncontrollable )
{
    for ( const auto& u : uncontrollable )
        require_edge( e.structure(), u, "uncontrollable pair" );
    for ( const auto& u : uncontrollable )
        e.add( Group::Desc, edge_var( u ) );
    return e;
}

RepairFormula conjoin_state_deletion( RepairFormula e )
{
    if ( e.has_node_vars() )
        return e;
    const auto& m = e.structure();
    std::map< StateId, std::vector< BoolExpr > > out_edges, in_edges;
    for ( const auto& t : m.transitions )
    {
        out_edges[ t.first ].push_back( edge_var( t ) );
        in_edges[ t.second ].push_back( edge_var( t ) );
    }
    e.remove_group( Group::Totality );
    for ( const auto& s : m.states )
    {
        auto node = BoolExpr::var( PropVar::node( s ) );
        e.add( Group::StateDeletion, b_implies( node, b_or( out_edges[ s ] ) ) );
        std::vector< BoolExpr > none;
        for ( const auto& x : out_edges[ s ] )
            none.push_back( b_not( x ) );
        for ( const auto& x : in_edges[ s ] )
            none.push_back( b_not( x ) );
        e.add( Group::StateDeletion, b_implies( b_not( node ), b_and( std::move( none ) ) ) );
    }
    e.add( Group::StateDeletion, BoolExpr::var( PropVar::node( m.initial ) ) );
    e.mark_node_vars();
    return e;
}

RepairFormula conjoin_symmetry( RepairFormula e, const std::set< std::pair< StateId, StateId > >& state_pairs,
                                const std::set< std::pair< Edge, Edge > >& edge_pairs )
{
    for ( const auto& [ a, b ] : state_pairs )
    {
        require_state( e.structure(), a, "symmetric state" );
        require_state( e.structure(), b, "symmetric state" );
    }
    for ( const auto& [ a, b ] : edge_pairs )
    {
        require_edge( e.structure(), a, "symmetric edge" );
        require_edge( e.structure(), b, "symmetric edge" );
    }
    if ( !state_pairs.empty() && !e.has_node_vars() )
        throw InvalidInput( "state symmetry needs state deletion to be enabled" );

    for ( const auto& [ a, b ] : state_pairs )
        e.add( Group::Symmetry, b_iff( BoolExpr::var( PropVar::node( a ) ), BoolExpr::var( PropVar::node( b ) ) ) );
    for ( const auto& [ a, b ] : edge_pairs )
        e.add( Group::Symmetry, b_iff( edge_var( a ), edge_var( b ) ) );
    return e;
}

RepairFormula conjoin_family_constraints( RepairFormula e, const std::vector< std::set< Edge > >& families )
{
    if ( !families.empty() && !e.has_reach_vars() )
        throw InvalidInput( "family constraints need the reachability encoding" );
    for ( const auto& family : families )
        for ( const auto& t : family )
            require_edge( e.structure(), t, "family member" );

    for ( const auto& family : families )
    {
        std::vector< BoolExpr > only_unreachable, all_deleted;
        for ( const auto& t : family )
        {
            auto deleted = b_not( edge_var( t ) );
            only_unreachable.push_back( b_implies( deleted, b_not( BoolExpr::var( PropVar::reach( t.first ) ) ) ) );
            all_deleted.push_back( deleted );
        }
        e.add( Group::Family, b_or( { b_and( std::move( only_unreachable ) ), b_and( std::move( all_deleted ) ) } ) );
    }
    return e;
}

RepairFormula conjoin_custom( RepairFormula e, const BoolExpr& c )
{
    check_custom_vars( e, c );
    if ( c.kind() == BoolExpr::Kind::Const && c.value() )
        return e;
    e.add( Group::Custom, c );
    return e;
}

} // namespace mrepair
