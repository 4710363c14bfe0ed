#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

#include "mrepair/error.hpp"
#include "mrepair/kripke.hpp"

#include <random>

using namespace mrepair;

namespace {

StateId S( const char* n ) { return StateId{ n }; }

KripkeStructure three_states()
{
    return parse_structure( "state a init : p\nstate b : q\nstate c\nedge a b\nedge b c\nedge c a\n" );
}

} // namespace

TEST_SUITE( "kripke" )
{
    TEST_CASE( "validate accepts a well-formed structure" ) { CHECK( validate( three_states() ).empty() ); }

    TEST_CASE( "validate names a dangling transition" )
    {
        auto m = three_states();
        m.transitions.insert( { S( "a" ), S( "x" ) } );
        auto v = validate( m );
        REQUIRE( v.size() == 1 );
        CHECK( v[ 0 ].element == "(a,x)" );
    }

    TEST_CASE( "validate names a state without a label entry" )
    {
        auto m = three_states();
        m.labels.erase( S( "b" ) );
        auto v = validate( m );
        REQUIRE( v.size() == 1 );
        CHECK( v[ 0 ].element == "b" );
    }

    TEST_CASE( "validate mutations" )
    {
        auto base = three_states();
        auto m = base;
        m.initial = S( "zz" );
        CHECK( validate( m ).size() == 1 );
        m = base;
        m.labels[ S( "zz" ) ] = {};
        CHECK( validate( m ).size() == 1 );
        m = base;
        m.labels[ S( "a" ) ].insert( "r" );
        CHECK( validate( m ).size() == 1 );
        m = base;
        m.ap.insert( "unused" );
        CHECK( validate( m ).empty() );
    }

    TEST_CASE( "game validation checks the turn function" )
    {
        auto g = parse_game( "state a init\nstate b\nedge a b\nedge b a\nturn a 1\nturn b 2\n" );
        CHECK( validate( g ).empty() );
        CHECK( g.players == std::set< std::string >{ "1", "2" } );
        g.turn.erase( S( "b" ) );
        CHECK( validate( g ).size() == 1 );
        g.turn[ S( "b" ) ] = "3";
        CHECK( validate( g ).size() == 1 );
    }

    TEST_CASE( "is_total" )
    {
        CHECK( is_total( testutil::sec51() ) );
        CHECK_FALSE( is_total( parse_structure( "state a init\n" ) ) );
        CHECK( is_total( parse_structure( "state a init\nedge a a\n" ) ) );
    }

    TEST_CASE( "is_substructure" )
    {
        auto m = testutil::sec51();
        CHECK( is_substructure( m, m ) );
        auto r = restrict_to( m, { { S( "s" ), S( "u" ) }, { S( "u" ), S( "s" ) } } );
        CHECK( r.states == std::set< StateId >{ S( "s" ), S( "u" ) } );
        CHECK( is_substructure( r, m ) );
        auto relabeled = r;
        relabeled.labels[ S( "u" ) ] = { "q" };
        CHECK_FALSE( is_substructure( relabeled, m ) );
        auto other_init = r;
        other_init.initial = S( "u" );
        CHECK_FALSE( is_substructure( other_init, m ) );
        auto extra_edge = r;
        extra_edge.transitions.insert( { S( "u" ), S( "u" ) } );
        CHECK_FALSE( is_substructure( extra_edge, m ) );
    }

    TEST_CASE( "reachable" )
    {
        auto m = testutil::sec51();
        CHECK( reachable( m, {} ) == std::set< StateId >{ S( "s" ) } );
        auto without_st = m.transitions;
        without_st.erase( { S( "s" ), S( "t" ) } );
        CHECK( reachable( m, without_st ) == std::set< StateId >{ S( "s" ), S( "u" ) } );
        CHECK( reachable( m, m.transitions ) == m.states );
    }

    TEST_CASE( "reachable is monotone and substructure is transitive" )
    {
        std::mt19937_64 rng( 11 );
        for ( int i = 0; i < 200; ++i )
        {
            auto m = oracle::random_structure( rng, 6, 0.35, { "p", "q" } );
            std::set< Edge > e1, e2;
            std::bernoulli_distribution coin( 0.5 );
            for ( const auto& e : m.transitions )
            {
                bool in2 = coin( rng );
                if ( in2 )
                    e2.insert( e );
                if ( in2 && coin( rng ) )
                    e1.insert( e );
            }
            auto r1 = reachable( m, e1 );
            auto r2 = reachable( m, e2 );
            CHECK( std::includes( r2.begin(), r2.end(), r1.begin(), r1.end() ) );

            auto m2 = restrict_to( m, e2 );
            auto m1 = restrict_to( m2, e1 );
            CHECK( is_substructure( m2, m ) );
            CHECK( is_substructure( m1, m2 ) );
            CHECK( is_substructure( m1, m ) );
        }
    }

    TEST_CASE( "print/parse round trip" )
    {
        std::mt19937_64 rng( 5 );
        for ( int i = 0; i < 50; ++i )
        {
            auto m = oracle::random_structure( rng, 1 + i % 7, 0.3, { "p", "q", "r" } );
            CHECK( parse_structure( print_structure( m ) ) == m );
            auto g = oracle::random_game( rng, 1 + i % 5, 0.4, { "p" }, { "1", "2", "3" } );
            CHECK( parse_game( print_game( g ) ) == g );
        }
    }

    TEST_CASE( "parse errors carry a position" )
    {
        try
        {
            (void)parse_structure( "state a init\nedge a\n" );
            FAIL( "expected ParseError" );
        }
        catch ( const ParseError& e )
        {
            CHECK( e.line() == 2 );
        }
        CHECK_THROWS_AS( (void)parse_structure( "state a\n" ), ParseError );
        CHECK_THROWS_AS( (void)load_structure( "state a init\nedge a b\n" ), InvalidInput );
    }

    TEST_CASE( "comments are ignored" )
    {
        auto m = parse_structure( "# header\nstate a init : p # trailing\nedge a a\n" );
        CHECK( m.labels.at( S( "a" ) ) == std::set< std::string >{ "p" } );
    }
}
