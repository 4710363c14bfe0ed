#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

#include "mrepair/checker.hpp"
#include "mrepair/cnf.hpp"
#include "mrepair/encoder.hpp"
#include "mrepair/engine.hpp"
#include "mrepair/error.hpp"
#include "mrepair/solver.hpp"

#include <random>

using namespace mrepair;
using namespace mrepair::fml;

namespace {

StateId S( const std::string& n ) { return StateId{ n }; }
Edge E( const std::string& a, const std::string& b ) { return { S( a ), S( b ) }; }
BoolExpr ev( const Edge& e ) { return BoolExpr::var( PropVar::edge( e ) ); }
BoolExpr nv( const std::string& s ) { return BoolExpr::var( PropVar::node( S( s ) ) ); }

std::set< std::set< Edge > > solutions( const RepairFormula& f, std::size_t limit = 100000 )
{
    PreparedRepair p{ f, tseitin( f.expr() ), 0 };
    auto r = enumerate_edge_solutions( p, limit );
    REQUIRE_FALSE( r.truncated );
    return r.kept;
}

bool satisfiable( const BoolExpr& e ) { return solve( tseitin( e ).cnf ).status == SatStatus::Sat; }

bool fully_total( const KripkeStructure& m, const std::set< Edge >& kept )
{
    for ( const auto& s : m.states )
    {
        bool any = false;
        for ( const auto& e : kept )
            any = any || e.first == s;
        if ( !any )
            return false;
    }
    return true;
}

/// Two-process mutual exclusion graph over local states N, T, C with
/// propositions N1.. C2; states named by the pair of locals, e.g. "TN".
KripkeStructure mutex_graph()
{
    const std::string locals = "NTC";
    KripkeStructure m;
    m.initial = S( "NN" );
    m.ap = { "N1", "T1", "C1", "N2", "T2", "C2" };
    auto next = []( char c ) { return c == 'N' ? 'T' : c == 'T' ? 'C' : 'N'; };
    for ( char a : locals )
        for ( char b : locals )
        {
            std::string n{ a, b };
            m.states.insert( S( n ) );
            m.labels[ S( n ) ] = { std::string( 1, a ) + "1", std::string( 1, b ) + "2" };
            m.transitions.insert( E( n, std::string{ next( a ), b } ) );
            m.transitions.insert( E( n, std::string{ a, next( b ) } ) );
        }
    return m;
}

std::string swap_name( const StateId& s ) { return std::string{ s.name[ 1 ], s.name[ 0 ] }; }

} // namespace

TEST_SUITE( "encoder" )
{
    TEST_CASE( "worked example: edge projection of state s is exactly {~E(s,t), E(s,u)}" )
    {
        auto m = testutil::sec51();
        auto f = encode_ctl_repair( m, desugar( parse_ctl( "(AG p | AG q) & EX p" ) ) );
        std::set< std::pair< bool, bool > > proj;
        for ( const auto& kept : solutions( f ) )
            proj.insert( { kept.contains( E( "s", "t" ) ), kept.contains( E( "s", "u" ) ) } );
        CHECK( proj == std::set< std::pair< bool, bool > >{ { false, true } } );
    }

    TEST_CASE( "eta = true admits keeping every edge" )
    {
        auto m = testutil::sec51();
        auto f = encode_ctl_repair( m, tt() );
        std::vector< BoolExpr > all{ f.expr() };
        for ( const auto& e : m.transitions )
            all.push_back( ev( e ) );
        CHECK( satisfiable( b_and( all ) ) );
    }

    TEST_CASE( "AX p & AX ~p is unsatisfiable" )
    {
        auto f = encode_ctl_repair( testutil::sec51(), desugar( parse_ctl( "AX p & AX ~p" ) ) );
        CHECK_FALSE( satisfiable( f.expr() ) );
    }

    TEST_CASE( "groups and dump" )
    {
        auto f = encode_ctl_repair( testutil::sec51(), desugar( parse_ctl( "AG p" ) ) );
        std::set< Group > groups;
        for ( const auto& c : f.conjuncts() )
            groups.insert( c.group );
        CHECK( groups == std::set< Group >{ Group::Spec, Group::Totality, Group::Labeling, Group::Consistency,
                                            Group::Nexttime, Group::Release } );
        CHECK( f.conjuncts().front().group == Group::Spec );
        auto d = f.dump();
        CHECK( d.rfind( "[spec] X(s,A[false V p])", 0 ) == 0 );
        CHECK( d == encode_ctl_repair( testutil::sec51(), desugar( parse_ctl( "AG p" ) ) ).dump() );
    }

    TEST_CASE( "release levels run from 0 to |S|" )
    {
        auto m = testutil::sec51();
        auto eta = desugar( parse_ctl( "AG p" ) );
        auto f = encode_ctl_repair( m, eta );
        auto vars = variables( f.expr() );
        int max_level = -1;
        for ( const auto& v : vars )
            if ( v.kind == PropVar::Kind::SatLvl )
            {
                CHECK( v.formula == eta.key() );
                max_level = std::max( max_level, v.level );
            }
        CHECK( max_level == 3 );
    }

    TEST_CASE( "preconditions" )
    {
        auto m = testutil::sec51();
        CHECK_THROWS_AS( (void)encode_ctl_repair( m, parse_ctl( "AG p" ) ), InvalidInput );
        auto partial = parse_structure( "state a init : p\nstate b\nedge a b\n" );
        CHECK_THROWS_AS( (void)encode_ctl_repair( partial, prop( "p" ) ), InvalidInput );
        CHECK_THROWS_AS( (void)encode_ctl_repair( m, prop( "zz" ) ), InvalidInput );
    }

    TEST_CASE( "Sat propositions match the decoded model on reachable states" )
    {
        std::mt19937_64 rng( 31 );
        int checked = 0;
        for ( int i = 0; i < 150; ++i )
        {
            auto m = oracle::random_structure( rng, 2 + i % 3, 0.45, { "p", "q" } );
            auto eta = desugar( oracle::random_ctl( rng, 3 ) );
            auto f = encode_ctl_repair( m, eta );
            auto t = tseitin( f.expr() );
            std::set< int > originals;
            for ( int v = 1; v <= t.vars.num_original(); ++v )
                originals.insert( v );
            auto en = enumerate_projected( t.cnf, originals, 64 );
            for ( const auto& proj : en.projections )
            {
                auto value = [ & ]( const PropVar& v ) { return static_cast< bool >( proj[ static_cast< std::size_t >( t.vars.index( v ) - 1 ) ] ); };
                std::set< Edge > kept;
                for ( const auto& e : m.transitions )
                    if ( value( PropVar::edge( e ) ) )
                        kept.insert( e );
                auto mp = restrict_to( m, kept );
                auto labels = check_ctl( mp, eta ).labels;
                for ( const auto& s : mp.states )
                    for ( const auto& xi : sub( eta ) )
                    {
                        int idx = t.vars.index( PropVar::sat( s, xi ) );
                        if ( idx == 0 )
                            continue;
                        REQUIRE( value( PropVar::sat( s, xi ) ) == labels.holds( s, xi ) );
                        ++checked;
                    }
            }
        }
        CHECK( checked > 1000 );
    }

    TEST_CASE( "edge solution sets equal the substructure oracle" )
    {
        std::mt19937_64 rng( 32 );
        for ( int i = 0; i < 150; ++i )
        {
            auto m = oracle::random_structure( rng, 2 + i % 3, 0.4, { "p", "q" } );
            if ( m.transitions.size() > 8 )
                continue;
            auto f = oracle::random_ctl( rng, 2 );
            auto got = solutions( encode_ctl_repair( m, desugar( f ) ) );
            auto expect = oracle::repairs( m, f, nullptr, [ & ]( const std::set< Edge >& k ) { return fully_total( m, k ); } );
            REQUIRE( got == expect );
        }
    }

    TEST_CASE( "ATL: one-player and empty-coalition encodings match CTL" )
    {
        std::mt19937_64 rng( 33 );
        for ( int i = 0; i < 60; ++i )
        {
            auto g = oracle::random_game( rng, 3 + i % 2, 0.4, { "p", "q" }, { "1" } );
            if ( g.base.transitions.size() > 9 )
                continue;
            auto a = solutions( encode_atl_repair( g, parse_atl( "<<1>>X p" ) ) );
            CHECK( a == solutions( encode_ctl_repair( g.base, parse_ctl( "EX p" ) ) ) );
            auto b = solutions( encode_atl_repair( g, parse_atl( "<<>>X p" ) ) );
            CHECK( b == solutions( encode_ctl_repair( g.base, parse_ctl( "AX p" ) ) ) );
            auto c = solutions( encode_atl_repair( g, atl_desugar( parse_atl( "<<>>G q" ), g.players ) ) );
            CHECK( c == solutions( encode_ctl_repair( g.base, desugar( parse_ctl( "AG q" ) ) ) ) );
        }
    }

    TEST_CASE( "ATL: 4-state alternating games match brute-force search with the strategy oracle" )
    {
        std::mt19937_64 rng( 34 );
        const std::vector< std::string > forms = { "<<1>>G p", "<<2>>F q", "<<1>>[p U q]", "<<1>>X <<2>>G p" };
        int nonempty = 0;
        for ( int i = 0; i < 80; ++i )
        {
            auto g = oracle::random_game( rng, 4, 0.4, { "p", "q" }, { "1", "2" } );
            if ( g.base.transitions.size() > 9 )
                continue;
            auto f = parse_atl( forms[ static_cast< std::size_t >( i ) % forms.size() ] );
            auto got = solutions( encode_atl_repair( g, atl_desugar( f, g.players ) ) );
            auto expect = oracle::repairs( g.base, f, &g.turn,
                                           [ & ]( const std::set< Edge >& k ) { return fully_total( g.base, k ); } );
            REQUIRE( got == expect );
            nonempty += !got.empty();
        }
        CHECK( nonempty > 5 );
    }

    TEST_CASE( "reachability encoding" )
    {
        std::mt19937_64 rng( 35 );
        for ( int i = 0; i < 100; ++i )
        {
            auto m = oracle::random_structure( rng, 6, 0.3, { "p" } );
            std::set< Edge > chosen;
            std::bernoulli_distribution coin( i < 10 ? 1.0 : i < 20 ? 0.0 : 0.5 );
            std::vector< BoolExpr > parts{ encode_reachability( m ) };
            for ( const auto& e : m.transitions )
            {
                bool keep = coin( rng );
                if ( keep )
                    chosen.insert( e );
                parts.push_back( keep ? ev( e ) : b_not( ev( e ) ) );
            }
            auto t = tseitin( b_and( parts ) );
            std::set< int > reach_vars;
            std::vector< StateId > order;
            for ( const auto& s : m.states )
                reach_vars.insert( t.vars.index( PropVar::reach( s ) ) );
            auto en = enumerate_projected( t.cnf, reach_vars, 4 );
            REQUIRE( en.projections.size() == 1 ); // functionally determined
            auto expect = reachable( m, chosen );
            auto r = solve( t.cnf );
            for ( const auto& s : m.states )
                CHECK( r.model.value( t.vars.index( PropVar::reach( s ) ) ) == expect.contains( s ) );
        }
    }

    TEST_CASE( "DESC conjunct" )
    {
        auto m = testutil::sec51();
        auto base = encode_ctl_repair( m, desugar( parse_ctl( "(AG p | AG q) & EX p" ) ) );
        CHECK( conjoin_desc( base, {} ).dump() == base.dump() );
        CHECK_FALSE( satisfiable( conjoin_desc( base, { E( "s", "t" ) } ).expr() ) );
        auto su = conjoin_desc( base, { E( "s", "u" ) } );
        CHECK( solutions( su ) == solutions( base ) );
        CHECK_THROWS_AS( (void)conjoin_desc( base, { E( "t", "u" ) } ), InvalidInput );
    }

    TEST_CASE( "state deletion conjuncts" )
    {
        auto m = testutil::sec51();
        auto eta = desugar( parse_ctl( "(AG p | AG q) & EX p" ) );
        auto base = encode_ctl_repair( m, eta );
        auto del = conjoin_state_deletion( base );
        CHECK( del.has_node_vars() );
        for ( const auto& c : del.conjuncts() )
            CHECK( c.group != Group::Totality );

        std::vector< BoolExpr > all_kept;
        for ( const auto& s : m.states )
            all_kept.push_back( nv( s.name ) );
        CHECK( solutions( conjoin_custom( del, b_and( all_kept ) ) ) == solutions( base ) );

        for ( const auto& kept : solutions( conjoin_custom( del, b_not( nv( "t" ) ) ) ) )
        {
            CHECK_FALSE( kept.contains( E( "s", "t" ) ) );
            CHECK_FALSE( kept.contains( E( "t", "s" ) ) );
        }
    }

    TEST_CASE( "state deletion on 4-state instances matches the oracle" )
    {
        std::mt19937_64 rng( 36 );
        for ( int i = 0; i < 60; ++i )
        {
            auto m = oracle::random_structure( rng, 4, 0.35, { "p", "q" } );
            if ( m.transitions.size() > 9 )
                continue;
            auto f = oracle::random_ctl( rng, 2 );
            auto del = conjoin_state_deletion( encode_ctl_repair( m, desugar( f ) ) );
            auto isolated = [ & ]( const std::set< Edge >& k, const StateId& x ) {
                for ( const auto& e : k )
                    if ( e.first == x || e.second == x )
                        return false;
                return true;
            };
            auto shape = [ & ]( const std::set< Edge >& k ) {
                for ( const auto& s : m.states )
                {
                    bool out = false;
                    for ( const auto& e : k )
                        out = out || e.first == s;
                    if ( !out && ( s == m.initial || !isolated( k, s ) ) )
                        return false;
                }
                return true;
            };
            REQUIRE( solutions( del ) == oracle::repairs( m, f, nullptr, shape ) );
            const StateId x{ "s3" };
            auto avoid = solutions( conjoin_custom( del, b_not( nv( "s3" ) ) ) );
            auto expect = oracle::repairs( m, f, nullptr, [ & ]( const std::set< Edge >& k ) { return shape( k ) && isolated( k, x ); } );
            REQUIRE( avoid == expect );
        }
    }

    TEST_CASE( "symmetry conjuncts" )
    {
        auto m = testutil::sec51();
        auto base = conjoin_state_deletion( encode_ctl_repair( m, desugar( parse_ctl( "AG (p | q)" ) ) ) );
        CHECK( conjoin_symmetry( base, {}, {} ).dump() == base.dump() );
        std::set< std::pair< StateId, StateId > > self;
        for ( const auto& s : m.states )
            self.insert( { s, s } );
        std::set< std::pair< Edge, Edge > > self_edges;
        for ( const auto& e : m.transitions )
            self_edges.insert( { e, e } );
        CHECK( solutions( conjoin_symmetry( base, self, self_edges ) ) == solutions( base ) );
        CHECK_THROWS_AS( (void)conjoin_symmetry( base, { { S( "s" ), S( "zz" ) } }, {} ), InvalidInput );
        CHECK_THROWS_AS( (void)conjoin_symmetry( base, {}, { { E( "s", "t" ), E( "t", "u" ) } } ), InvalidInput );
        auto plain = encode_ctl_repair( m, desugar( parse_ctl( "AG (p | q)" ) ) );
        CHECK_THROWS_AS( (void)conjoin_symmetry( plain, self, {} ), InvalidInput );
    }

    TEST_CASE( "symmetry: every repair of the mutex graph is swap invariant" )
    {
        auto m = mutex_graph();
        auto eta = desugar( parse_ctl( "AG ~(C1 & C2) & AG (T1 -> AF C1) " ) );
        std::set< std::pair< StateId, StateId > > sp;
        std::set< std::pair< Edge, Edge > > ep;
        for ( const auto& s : m.states )
            sp.insert( { s, S( swap_name( s ) ) } );
        for ( const auto& e : m.transitions )
            ep.insert( { e, { S( swap_name( e.first ) ), S( swap_name( e.second ) ) } } );
        auto f = conjoin_symmetry( conjoin_state_deletion( encode_ctl_repair( m, eta ) ), sp, ep );
        auto sols = solutions( f );
        CHECK_FALSE( sols.empty() );
        for ( const auto& kept : sols )
            for ( const auto& e : kept )
                CHECK( kept.contains( Edge{ S( swap_name( e.first ) ), S( swap_name( e.second ) ) } ) );
    }

    TEST_CASE( "family constraints" )
    {
        auto m = parse_structure( "state a init : p\nstate b : p\nstate c : q\n"
                                  "edge a b\nedge a c\nedge b a\nedge c a\nedge b b\nedge c c\n" );
        auto base = conjoin_reachability( encode_ctl_repair( m, tt() ) );
        CHECK( base.has_reach_vars() );
        CHECK_THROWS_AS( (void)conjoin_family_constraints( encode_ctl_repair( m, tt() ), { { E( "a", "b" ) } } ),
                         InvalidInput );
        CHECK_THROWS_AS( (void)conjoin_family_constraints( base, { { E( "a", "a" ) } } ), InvalidInput );

        // A singleton family never blocks satisfiability.
        auto single = conjoin_family_constraints( base, { { E( "a", "b" ) } } );
        CHECK( satisfiable( b_and( { single.expr(), b_not( ev( E( "a", "b" ) ) ) } ) ) );

        // Family {(a,b),(a,c)}: deleting one edge while a is reachable and the
        // other edge is kept violates the constraint.
        auto pair = conjoin_family_constraints( base, { { E( "a", "b" ), E( "a", "c" ) } } );
        CHECK_FALSE( satisfiable( b_and( { pair.expr(), b_not( ev( E( "a", "b" ) ) ), ev( E( "a", "c" ) ) } ) ) );
        CHECK( satisfiable( b_and( { pair.expr(), ev( E( "a", "b" ) ), ev( E( "a", "c" ) ) } ) ) );

        // Family {(b,a),(b,b)}: partial deletion is fine once b is unreachable.
        auto fam_b = conjoin_family_constraints( base, { { E( "b", "a" ), E( "b", "b" ) } } );
        CHECK( satisfiable( b_and( { fam_b.expr(), b_not( ev( E( "a", "b" ) ) ), b_not( ev( E( "b", "a" ) ) ), ev( E( "b", "b" ) ) } ) ) );
        CHECK_FALSE( satisfiable( b_and( { fam_b.expr(), ev( E( "a", "b" ) ), b_not( ev( E( "b", "a" ) ) ), ev( E( "b", "b" ) ) } ) ) );
    }

    TEST_CASE( "custom constraints" )
    {
        auto m = testutil::sec51();
        auto base = encode_ctl_repair( m, desugar( parse_ctl( "(AG p | AG q) & EX p" ) ) );
        CHECK( solutions( conjoin_custom( base, BoolExpr::constant( true ) ) ) == solutions( base ) );
        CHECK_FALSE( satisfiable( conjoin_custom( base, parse_constraint( "E(s,t) <-> E(s,u)" ) ).expr() ) );
        CHECK_FALSE( satisfiable( conjoin_custom( base, parse_constraint( "~E(s,u)" ) ).expr() ) );
        CHECK_THROWS_AS( (void)conjoin_custom( base, parse_constraint( "E(t,u)" ) ), InvalidInput );
        CHECK_THROWS_AS( (void)conjoin_custom( base, parse_constraint( "N(s)" ) ), InvalidInput );
    }

    TEST_CASE( "circuit size stays within a constant factor of |sub| * n^2 * d + n * |AP|" )
    {
        std::mt19937_64 rng( 37 );
        double worst = 0;
        for ( int i = 0; i < 60; ++i )
        {
            const int n = 5 + i % 20;
            auto m = random_model( n, 0.15, { "p", "q" }, static_cast< std::uint64_t >( i ) );
            auto eta = desugar( oracle::random_ctl( rng, 3 ) );
            auto f = encode_ctl_repair( m, eta );
            const double d = static_cast< double >( StateGraph( m ).max_out_degree() );
            const double bound = static_cast< double >( sub( eta ).size() ) * n * n * d + 2.0 * n;
            worst = std::max( worst, static_cast< double >( circuit_size( f.expr() ) ) / bound );
        }
        MESSAGE( "worst size ratio " << worst );
        CHECK( worst < 8.0 );
    }

    TEST_CASE( "encoding is deterministic" )
    {
        auto m = random_model( 12, 0.2, { "p", "q" }, 9 );
        auto eta = desugar( parse_ctl( "AX A[p V q] & EX q" ) );
        auto a = tseitin( encode_ctl_repair( m, eta ).expr() );
        auto b = tseitin( encode_ctl_repair( m, eta ).expr() );
        CHECK( a.cnf == b.cnf );
        CHECK( to_dimacs( a.cnf, a.vars ) == to_dimacs( b.cnf, b.vars ) );
    }
}
