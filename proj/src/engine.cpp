#include "mrepair/engine.hpp"

#include "mrepair/checker.hpp"
#include "mrepair/error.hpp"

#include <algorithm>
#include <chrono>
#include <random>

namespace mrepair {

bool RepairOptions::constrains() const
{
    return !uncontrollable.empty() || !symmetric_states.empty() || !symmetric_edges.empty() || constraint.has_value() ||
           allow_state_deletion || !families.empty();
}

std::string to_string( RepairStatus s )
{
    switch ( s )
    {
    case RepairStatus::Unchanged: return "unchanged";
    case RepairStatus::Repaired: return "repaired";
    case RepairStatus::Failure: return "failure";
    }
    return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since( Clock::time_point t0 )
{
    return std::chrono::duration< double >( Clock::now() - t0 ).count();
}

void require_total( const KripkeStructure& m )
{
    auto v = validate( m );
    if ( !v.empty() )
        throw InvalidInput( "invalid structure: " + v.front().to_string() );
    if ( !is_total( m ) )
        throw InvalidInput( "structure is not total" );
}

RepairFormula apply_options( RepairFormula e, const RepairOptions& opts )
{
    if ( opts.allow_state_deletion )
        e = conjoin_state_deletion( std::move( e ) );
    if ( !opts.families.empty() )
        e = conjoin_reachability( std::move( e ) );
    if ( !opts.uncontrollable.empty() )
        e = conjoin_desc( std::move( e ), opts.uncontrollable );
    if ( !opts.symmetric_states.empty() || !opts.symmetric_edges.empty() )
        e = conjoin_symmetry( std::move( e ), opts.symmetric_states, opts.symmetric_edges );
    if ( !opts.families.empty() )
        e = conjoin_family_constraints( std::move( e ), opts.families );
    if ( opts.constraint )
        e = conjoin_custom( std::move( e ), *opts.constraint );
    return e;
}

PreparedRepair finish_prepare( RepairFormula e, const RepairOptions& opts, Clock::time_point t0 )
{
    e = apply_options( std::move( e ), opts );
    auto cnf = tseitin( e.expr() );
    return { std::move( e ), std::move( cnf ), seconds_since( t0 ) };
}

SolveResult run_solver( const CnfFormula& c, const SolverConfig& cfg )
{
    auto r = cfg.external_command ? solve_external( c, *cfg.external_command ) : solve( c, cfg.options );
    if ( r.status == SatStatus::Unknown )
        throw ResourceLimit( "SAT solver stopped without an answer" );
    return r;
}

std::map< PropVar, bool > typed_valuation( const VarMap& vars, const Assignment& a )
{
    std::map< PropVar, bool > out;
    for ( int v = 1; v <= vars.num_original(); ++v )
        out.emplace( vars.prop( v ), a.value( v ) );
    return out;
}

bool lookup( const std::map< PropVar, bool >& val, const PropVar& v )
{
    auto it = val.find( v );
    if ( it == val.end() )
        throw InternalError( "no value for " + v.to_string() );
    return it->second;
}

/// Solves the prepared formula and decodes the kept edges into M'.
/// `check` re-verifies eta on the result.
RepairResult solve_and_decode( const KripkeStructure& m, const PreparedRepair& p, const RepairOptions& opts,
                               const std::function< bool( const KripkeStructure& ) >& check )
{
    RepairResult res;
    EncodingStats stats;
    stats.propositions = p.cnf.cnf.num_vars;
    stats.original_vars = p.cnf.vars.num_original();
    stats.clauses = p.cnf.cnf.clauses.size();
    stats.conjuncts = p.formula.conjuncts().size();
    stats.circuit_size = p.formula.size();
    stats.encode_seconds = p.encode_seconds;

    auto t0 = Clock::now();
    auto sr = run_solver( p.cnf.cnf, opts.solver );
    stats.solve_seconds = seconds_since( t0 );
    stats.solver = sr.stats;
    res.stats = stats;
    if ( sr.status == SatStatus::Unsat )
    {
        res.status = RepairStatus::Failure;
        return res;
    }

    res.status = RepairStatus::Repaired;
    res.assignment = sr.model;
    res.valuation = typed_valuation( p.cnf.vars, sr.model );
    std::set< Edge > kept;
    for ( const auto& t : m.transitions )
    {
        if ( lookup( res.valuation, PropVar::edge( t ) ) )
            kept.insert( t );
        else
            res.deleted_edges.insert( t );
    }
    res.model = restrict_to( m, kept );
    for ( const auto& s : m.states )
        if ( !res.model.states.contains( s ) )
            res.deleted_states.insert( s );

    // Post-conditions of a repair; any failure here is a bug.
    auto fail = [ & ]( const std::string& what ) { throw InternalError( "repair verification failed: " + what ); };
    if ( !is_total( res.model ) )
        fail( "result is not total" );
    if ( !is_substructure( res.model, m ) )
        fail( "result is not a substructure of the input" );
    if ( !check( res.model ) )
        fail( "result does not satisfy the formula" );
    for ( const auto& u : opts.uncontrollable )
        if ( !kept.contains( u ) )
            fail( "uncontrollable edge " + edge_to_string( u ) + " was deleted" );
    for ( const auto& family : opts.families )
    {
        bool all_deleted = std::none_of( family.begin(), family.end(), [ & ]( const Edge& t ) { return kept.contains( t ); } );
        if ( all_deleted )
            continue;
        for ( const auto& t : family )
            if ( !kept.contains( t ) && res.model.states.contains( t.first ) )
                fail( "family partially deleted at reachable state " + t.first.name );
    }
    auto valuation = [ & ]( const PropVar& v ) { return lookup( res.valuation, v ); };
    if ( opts.constraint && !opts.constraint->evaluate( valuation ) )
        fail( "custom constraint violated" );
    for ( const auto& [ a, b ] : opts.symmetric_edges )
        if ( kept.contains( a ) != kept.contains( b ) )
            fail( "edge symmetry violated" );
    for ( const auto& [ a, b ] : opts.symmetric_states )
        if ( valuation( PropVar::node( a ) ) != valuation( PropVar::node( b ) ) )
            fail( "state symmetry violated" );
    return res;
}

RepairResult brute_force( const KripkeStructure& m, const EdgeFilter& admissible,
                          const std::function< bool( const KripkeStructure& ) >& check )
{
    require_total( m );
    if ( m.transitions.size() > 20 )
        throw InvalidInput( "brute force is limited to 20 transitions" );
    std::vector< Edge > edges( m.transitions.begin(), m.transitions.end() );
    const std::uint32_t count = 1u << edges.size();
    // Larger subsets first, so the full structure is tried before anything else.
    for ( std::uint32_t mask = count; mask-- > 0; )
    {
        std::set< Edge > kept;
        for ( std::size_t i = 0; i < edges.size(); ++i )
            if ( mask & ( 1u << i ) )
                kept.insert( edges[ i ] );
        if ( admissible && !admissible( kept ) )
            continue;
        auto candidate = restrict_to( m, kept );
        if ( !is_total( candidate ) || !check( candidate ) )
            continue;
        RepairResult res;
        res.status = RepairStatus::Repaired;
        res.model = std::move( candidate );
        for ( const auto& t : m.transitions )
            if ( !kept.contains( t ) )
                res.deleted_edges.insert( t );
        for ( const auto& s : m.states )
            if ( !res.model.states.contains( s ) )
                res.deleted_states.insert( s );
        return res;
    }
    return {};
}

GameStructure restrict_game( const GameStructure& g, const KripkeStructure& m )
{
    GameStructure out{ m, g.players, {} };
    for ( const auto& s : m.states )
        out.turn[ s ] = g.turn.at( s );
    return out;
}

} // namespace

PreparedRepair prepare_ctl( const KripkeStructure& m, const Formula& eta, const RepairOptions& opts )
{
    auto t0 = Clock::now();
    if ( !is_ctl( eta ) )
        throw InvalidInput( "not a CTL formula: " + eta.key() );
    return finish_prepare( encode_ctl_repair( m, desugar( eta ) ), opts, t0 );
}

PreparedRepair prepare_atl( const GameStructure& g, const Formula& eta, const RepairOptions& opts )
{
    auto t0 = Clock::now();
    if ( !is_atl( eta ) )
        throw InvalidInput( "not an ATL formula: " + eta.key() );
    return finish_prepare( encode_atl_repair( g, atl_desugar( eta, g.players ) ), opts, t0 );
}

RepairResult repair_ctl( const KripkeStructure& m, const Formula& eta, const RepairOptions& opts )
{
    require_total( m );
    if ( !opts.constrains() && !opts.always_encode && check_ctl( m, eta ).holds )
        return { RepairStatus::Unchanged, m, {}, {}, {}, {}, {}, std::nullopt };
    auto p = prepare_ctl( m, eta, opts );
    return solve_and_decode( m, p, opts, [ & ]( const KripkeStructure& r ) { return check_ctl( r, eta ).holds; } );
}

RepairResult repair_atl( const GameStructure& g, const Formula& eta, const RepairOptions& opts )
{
    auto v = validate( g );
    if ( !v.empty() )
        throw InvalidInput( "invalid game structure: " + v.front().to_string() );
    require_total( g.base );
    if ( !opts.constrains() && !opts.always_encode && check_atl( g, eta ).holds )
        return { RepairStatus::Unchanged, g.base, g, {}, {}, {}, {}, std::nullopt };
    auto p = prepare_atl( g, eta, opts );
    auto res = solve_and_decode( g.base, p, opts, [ & ]( const KripkeStructure& r ) {
        return check_atl( restrict_game( g, r ), eta ).holds;
    } );
    if ( res.status == RepairStatus::Repaired )
        res.game = restrict_game( g, res.model );
    return res;
}

RepairResult additive_repair( const KripkeStructure& m, const std::map< StateId, std::set< std::string > >& added_states,
                              const std::set< Edge >& added_edges, const Formula& eta, const RepairOptions& opts )
{
    auto v = validate( m );
    if ( !v.empty() )
        throw InvalidInput( "invalid structure: " + v.front().to_string() );
    KripkeStructure plus = m;
    for ( const auto& [ s, label ] : added_states )
    {
        if ( m.states.contains( s ) )
            throw InvalidInput( "added state '" + s.name + "' already exists" );
        plus.states.insert( s );
        plus.labels[ s ] = label;
        plus.ap.insert( label.begin(), label.end() );
    }
    for ( const auto& e : added_edges )
    {
        if ( m.transitions.contains( e ) )
            throw InvalidInput( "added transition " + edge_to_string( e ) + " already exists" );
        if ( !plus.states.contains( e.first ) || !plus.states.contains( e.second ) )
            throw InvalidInput( "added transition " + edge_to_string( e ) + " has an unknown endpoint" );
        plus.transitions.insert( e );
    }
    if ( !is_total( plus ) )
        throw InvalidInput( "structure with additions is not total" );
    auto res = repair_ctl( plus, eta, opts );
    // Relative to the caller's M, any addition is already a change.
    if ( res.status == RepairStatus::Unchanged && ( !added_states.empty() || !added_edges.empty() ) )
        res.status = RepairStatus::Repaired;
    return res;
}

EdgeSolutions enumerate_edge_solutions( const PreparedRepair& p, std::size_t limit, const SolverOptions& opts )
{
    const auto& m = p.formula.structure();
    std::vector< Edge > edges( m.transitions.begin(), m.transitions.end() );
    std::set< int > vars;
    for ( const auto& e : edges )
    {
        int idx = p.cnf.vars.index( PropVar::edge( e ) );
        if ( idx == 0 )
            throw InternalError( "edge " + edge_to_string( e ) + " missing from the encoding" );
        vars.insert( idx );
    }
    auto en = enumerate_projected( p.cnf.cnf, vars, limit, opts );
    // Projections are aligned with ascending variable index.
    std::vector< Edge > by_index( edges.size() );
    {
        std::vector< int > sorted( vars.begin(), vars.end() );
        for ( const auto& e : edges )
        {
            int idx = p.cnf.vars.index( PropVar::edge( e ) );
            auto pos = std::lower_bound( sorted.begin(), sorted.end(), idx ) - sorted.begin();
            by_index[ static_cast< std::size_t >( pos ) ] = e;
        }
    }
    EdgeSolutions out;
    out.truncated = en.truncated;
    for ( const auto& proj : en.projections )
    {
        std::set< Edge > kept;
        for ( std::size_t i = 0; i < proj.size(); ++i )
            if ( proj[ i ] )
                kept.insert( by_index[ i ] );
        out.kept.insert( std::move( kept ) );
    }
    return out;
}

RepairResult brute_force_repair( const KripkeStructure& m, const Formula& eta, const EdgeFilter& admissible )
{
    return brute_force( m, admissible, [ & ]( const KripkeStructure& c ) { return check_ctl( c, eta ).holds; } );
}

RepairResult brute_force_repair_atl( const GameStructure& g, const Formula& eta, const EdgeFilter& admissible )
{
    auto v = validate( g );
    if ( !v.empty() )
        throw InvalidInput( "invalid game structure: " + v.front().to_string() );
    auto res = brute_force( g.base, admissible,
                            [ & ]( const KripkeStructure& c ) { return check_atl( restrict_game( g, c ), eta ).holds; } );
    if ( res.status == RepairStatus::Repaired )
        res.game = restrict_game( g, res.model );
    return res;
}

Reduction reduce_3sat( int num_vars, const std::vector< std::vector< int > >& clauses )
{
    if ( num_vars < 1 )
        throw InvalidInput( "3SAT instance needs at least one variable" );
    for ( const auto& c : clauses )
    {
        if ( c.empty() || c.size() > 3 )
            throw InvalidInput( "3SAT clauses must have 1 to 3 literals" );
        for ( int l : c )
            if ( l == 0 || std::abs( l ) > num_vars )
                throw InvalidInput( "3SAT literal " + std::to_string( l ) + " out of range" );
    }

    KripkeStructure m;
    StateId s0{ "s0" };
    m.initial = s0;
    m.states.insert( s0 );
    m.labels[ s0 ] = {};
    m.transitions.insert( { s0, s0 } );
    auto p = []( int j ) { return "p" + std::to_string( j ); };
    auto q = []( int j ) { return "q" + std::to_string( j ); };
    for ( int j = 1; j <= num_vars; ++j )
    {
        StateId sj{ "s" + std::to_string( j ) };
        StateId tj{ "t" + std::to_string( j ) };
        m.states.insert( sj );
        m.states.insert( tj );
        m.labels[ sj ] = { p( j ) };
        m.labels[ tj ] = { q( j ) };
        m.ap.insert( p( j ) );
        m.ap.insert( q( j ) );
        m.transitions.insert( { s0, sj } );
        m.transitions.insert( { sj, tj } );
        m.transitions.insert( { sj, sj } );
        m.transitions.insert( { tj, tj } );
    }

    // EX pj pins every (s0,sj). Without it a repair could cut s0 off from sj and
    // satisfy each AG(pj -> ...) vacuously.
    std::vector< Formula > conj;
    for ( int j = 1; j <= num_vars; ++j )
        conj.push_back( fml::EX( fml::prop( p( j ) ) ) );
    for ( const auto& c : clauses )
    {
        std::vector< Formula > disj;
        for ( int l : c )
        {
            int j = std::abs( l );
            auto pj = fml::prop( p( j ) );
            auto qj = fml::prop( q( j ) );
            disj.push_back( l > 0 ? fml::AG( fml::implies( pj, fml::EX( qj ) ) )
                                  : fml::AG( fml::implies( pj, fml::AX( fml::neg( qj ) ) ) ) );
        }
        Formula d = disj.front();
        for ( std::size_t i = 1; i < disj.size(); ++i )
            d = fml::disj( d, disj[ i ] );
        conj.push_back( d );
    }
    Formula eta = conj.front();
    for ( std::size_t i = 1; i < conj.size(); ++i )
        eta = fml::conj( eta, conj[ i ] );
    return { std::move( m ), eta };
}

KripkeStructure random_model( int n, double p, const std::set< std::string >& ap, std::uint64_t seed )
{
    if ( n < 1 )
        throw InvalidInput( "random model needs at least one state" );
    if ( !( p > 0 && p <= 1 ) )
        throw InvalidInput( "edge probability must be in (0,1]" );
    std::mt19937_64 rng( seed );
    const int width = static_cast< int >( std::to_string( n - 1 ).size() );
    std::vector< StateId > names;
    for ( int i = 0; i < n; ++i )
    {
        auto digits = std::to_string( i );
        names.emplace_back( "s" + std::string( static_cast< std::size_t >( width ) - digits.size(), '0' ) + digits );
    }

    KripkeStructure m;
    m.initial = names.front();
    m.ap = ap;
    m.states.insert( names.begin(), names.end() );
    std::bernoulli_distribution edge( p );
    std::bernoulli_distribution coin( 0.5 );
    for ( const auto& a : names )
        for ( const auto& b : names )
            if ( edge( rng ) )
                m.transitions.insert( { a, b } );
    for ( const auto& s : names )
    {
        auto& label = m.labels[ s ];
        for ( const auto& prop : ap )
            if ( coin( rng ) )
                label.insert( prop );
    }
    std::uniform_int_distribution< int > pick( 0, n - 1 );
    for ( const auto& s : names )
    {
        auto it = m.transitions.lower_bound( { s, StateId{} } );
        if ( it == m.transitions.end() || it->first != s )
            m.transitions.insert( { s, names[ static_cast< std::size_t >( pick( rng ) ) ] } );
    }
    return m;
}

} // namespace mrepair
