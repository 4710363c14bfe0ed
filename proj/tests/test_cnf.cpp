#include "doctest.h"
#include "oracles.hpp"

#include "mrepair/cnf.hpp"
#include "mrepair/error.hpp"
#include "mrepair/solver.hpp"

#include <random>

using namespace mrepair;

namespace {

BoolExpr x( int i ) { return BoolExpr::var( oracle::leaf( i ) ); }

void check_well_formed( const CnfFormula& c )
{
    for ( const auto& cl : c.clauses )
    {
        std::set< int > vars;
        for ( int l : cl )
        {
            CHECK( l != 0 );
            CHECK( std::abs( l ) <= c.num_vars );
            CHECK( vars.insert( std::abs( l ) ).second );
        }
        if ( cl.empty() )
            CHECK( c.clauses.size() == 1 );
    }
}

} // namespace

TEST_SUITE( "cnf" )
{
    TEST_CASE( "single leaf: one unit clause, no auxiliaries" )
    {
        auto t = tseitin( x( 0 ) );
        CHECK( t.vars.num_original() == 1 );
        CHECK( t.vars.num_aux() == 0 );
        CHECK( t.cnf.num_vars == 1 );
        CHECK( t.cnf.clauses == std::vector< std::vector< int > >{ { 1 } } );
        CHECK( t.vars.prop( 1 ) == oracle::leaf( 0 ) );
        CHECK( t.vars.index( oracle::leaf( 0 ) ) == 1 );
        CHECK( t.vars.index( oracle::leaf( 7 ) ) == 0 );
    }

    TEST_CASE( "x & ~x is unsatisfiable" )
    {
        auto t = tseitin( b_and( { x( 0 ), b_not( x( 0 ) ) } ) );
        check_well_formed( t.cnf );
        CHECK( solve( t.cnf ).status == SatStatus::Unsat );
    }

    TEST_CASE( "constants" )
    {
        CHECK( tseitin( BoolExpr::constant( true ) ).cnf.clauses.empty() );
        auto f = tseitin( BoolExpr::constant( false ) );
        CHECK( f.cnf.clauses == std::vector< std::vector< int > >{ {} } );
        CHECK( solve( f.cnf ).status == SatStatus::Unsat );
        auto g = tseitin( b_or( { x( 0 ), BoolExpr::constant( true ) } ) );
        CHECK( g.cnf.clauses.empty() );
    }

    TEST_CASE( "auxiliaries follow the originals and carry their gate" )
    {
        auto t = tseitin( b_or( { b_and( { x( 0 ), x( 1 ) } ), b_and( { x( 2 ), b_not( x( 0 ) ) } ) } ) );
        CHECK( t.vars.num_original() == 3 );
        CHECK( t.vars.num_aux() == 2 );
        CHECK( t.cnf.num_vars == 5 );
        for ( int v = 4; v <= 5; ++v )
        {
            CHECK_FALSE( t.vars.is_original( v ) );
            CHECK( t.vars.definition( v ).rfind( "and(", 0 ) == 0 );
        }
    }

    TEST_CASE( "structural hashing shares equal gates" )
    {
        auto g1 = b_and( { x( 0 ), x( 1 ) } );
        auto g2 = b_and( { x( 1 ), x( 0 ) } );
        auto t = tseitin( b_or( { b_iff( g1, x( 2 ) ), b_iff( g2, x( 3 ) ) } ) );
        int and_gates = 0;
        for ( int v = t.vars.num_original() + 1; v <= t.cnf.num_vars; ++v )
            and_gates += t.vars.definition( v ).rfind( "and(1,2)", 0 ) == 0;
        CHECK( and_gates == 1 );
    }

    TEST_CASE( "random circuits: projected models equal the truth table" )
    {
        std::mt19937_64 rng( 41 );
        int nontrivial = 0;
        for ( int i = 0; i < 400; ++i )
        {
            auto e = oracle::random_circuit( rng, 2 + i % 11, 4 );
            auto t = tseitin( e );
            check_well_formed( t.cnf );
            const int k = t.vars.num_original();
            REQUIRE( k <= 12 );
            std::set< std::vector< bool > > expect;
            for ( std::uint32_t a = 0; a < ( 1u << k ); ++a )
            {
                std::vector< bool > row( static_cast< std::size_t >( k ) );
                for ( int v = 0; v < k; ++v )
                    row[ static_cast< std::size_t >( v ) ] = a & ( 1u << v );
                auto val = [ & ]( const PropVar& pv ) { return static_cast< bool >( row[ static_cast< std::size_t >( t.vars.index( pv ) - 1 ) ] ); };
                if ( e.evaluate( val ) )
                    expect.insert( row );
            }
            std::set< int > originals;
            for ( int v = 1; v <= k; ++v )
                originals.insert( v );
            auto en = enumerate_projected( t.cnf, originals, 1u << 13 );
            std::set< std::vector< bool > > got( en.projections.begin(), en.projections.end() );
            REQUIRE( got == expect );
            nontrivial += !expect.empty() && expect.size() < ( 1u << k );
        }
        CHECK( nontrivial > 100 );
    }

    TEST_CASE( "auxiliaries are functionally determined by the originals" )
    {
        std::mt19937_64 rng( 42 );
        for ( int i = 0; i < 100; ++i )
        {
            auto e = oracle::random_circuit( rng, 5, 4 );
            auto t = tseitin( e );
            auto r = solve( t.cnf );
            if ( r.status != SatStatus::Sat )
                continue;
            CnfFormula fixed = t.cnf;
            for ( int v = 1; v <= t.vars.num_original(); ++v )
                fixed.clauses.push_back( { r.model.value( v ) ? v : -v } );
            std::set< int > all;
            for ( int v = 1; v <= t.cnf.num_vars; ++v )
                all.insert( v );
            CHECK( enumerate_projected( fixed, all, 4 ).projections.size() == 1 );
        }
    }

    TEST_CASE( "DIMACS bytes" )
    {
        CnfFormula c{ 1, { { 1 } } };
        CHECK( to_dimacs( c ) == "p cnf 1 1\n1 0\n" );
        CnfFormula d{ 3, { { 1, -2 }, { 3 } } };
        CHECK( to_dimacs( d ) == "p cnf 3 2\n1 -2 0\n3 0\n" );
        auto t = tseitin( BoolExpr::var( PropVar::edge( StateId{ "s" }, StateId{ "t" } ) ) );
        CHECK( to_dimacs( t.cnf, t.vars ) == "c var 1 E(s,t)\np cnf 1 1\n1 0\n" );
    }

    TEST_CASE( "DIMACS parse" )
    {
        CnfFormula d{ 3, { { 1, -2 }, { 3 } } };
        CHECK( parse_dimacs( to_dimacs( d ) ) == d );
        CHECK( parse_dimacs( "c hello\np cnf 2 2\n1\n-2 0 2 0\n" ) == CnfFormula{ 2, { { 1, -2 }, { 2 } } } );
        CHECK_THROWS_AS( (void)parse_dimacs( "1 0\n" ), ParseError );
        CHECK_THROWS_AS( (void)parse_dimacs( "p cnf 1 1\n2 0\n" ), ParseError );
        CHECK_THROWS_AS( (void)parse_dimacs( "p dnf 1 1\n1 0\n" ), ParseError );
        CHECK_THROWS_AS( (void)parse_dimacs( "p cnf 1 1\nx 0\n" ), ParseError );
    }

    TEST_CASE( "solver result text" )
    {
        Assignment a( 4 );
        a.set( 2, true );
        a.set( 4, true );
        auto text = to_dimacs_result( SatStatus::Sat, a );
        auto back = from_dimacs_result( text, 4 );
        CHECK( back.status == SatStatus::Sat );
        CHECK( back.model == a );
        CHECK( from_dimacs_result( "s UNSATISFIABLE\n", 3 ).status == SatStatus::Unsat );
        CHECK( from_dimacs_result( "c note\ns UNKNOWN\n", 3 ).status == SatStatus::Unknown );
        auto split = from_dimacs_result( "s SATISFIABLE\nv 1 -2\nv 3 0\n", 4 );
        CHECK( split.model.value( 1 ) );
        CHECK( split.model.value( 3 ) );
        CHECK_FALSE( split.model.value( 4 ) );
        CHECK_THROWS_AS( (void)from_dimacs_result( "garbage\n", 2 ), ParseError );
        CHECK_THROWS_AS( (void)from_dimacs_result( "s SATISFIABLE\nv 5 0\n", 2 ), ParseError );
        CHECK_THROWS_AS( (void)from_dimacs_result( "", 2 ), ParseError );
    }

    TEST_CASE( "output is deterministic" )
    {
        std::mt19937_64 rng( 43 );
        for ( int i = 0; i < 50; ++i )
        {
            std::mt19937_64 r1 = rng;
            auto e1 = oracle::random_circuit( r1, 8, 5 );
            auto e2 = oracle::random_circuit( rng, 8, 5 );
            auto a = tseitin( e1 ), b = tseitin( e2 );
            CHECK( to_dimacs( a.cnf, a.vars ) == to_dimacs( b.cnf, b.vars ) );
        }
    }
}
