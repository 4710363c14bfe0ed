#include "mrepair/kripke.hpp"

#include "mrepair/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace mrepair {

std::string edge_to_string( const Edge& e )
{
    return "(" + e.first.name + "," + e.second.name + ")";
}

std::vector< Violation > validate( const KripkeStructure& m )
{
    std::vector< Violation > out;
    if ( !m.states.contains( m.initial ) )
        out.push_back( { "initial-not-a-state", m.initial.name } );
    for ( const auto& s : m.states )
        if ( s.name.empty() )
            out.push_back( { "empty-state-name", "" } );
    for ( const auto& e : m.transitions )
        if ( !m.states.contains( e.first ) || !m.states.contains( e.second ) )
            out.push_back( { "dangling-edge", edge_to_string( e ) } );
    for ( const auto& s : m.states )
        if ( !m.labels.contains( s ) )
            out.push_back( { "missing-label", s.name } );
    for ( const auto& [ s, props ] : m.labels )
    {
        if ( !m.states.contains( s ) )
            out.push_back( { "label-for-unknown-state", s.name } );
        for ( const auto& p : props )
            if ( !m.ap.contains( p ) )
                out.push_back( { "label-outside-ap", s.name + ":" + p } );
    }
    return out;
}

std::vector< Violation > validate( const GameStructure& g )
{
    auto out = validate( g.base );
    for ( const auto& s : g.base.states )
        if ( !g.turn.contains( s ) )
            out.push_back( { "missing-turn", s.name } );
    for ( const auto& [ s, player ] : g.turn )
    {
        if ( !g.base.states.contains( s ) )
            out.push_back( { "turn-for-unknown-state", s.name } );
        if ( !g.players.contains( player ) )
            out.push_back( { "turn-outside-players", s.name + ":" + player } );
    }
    return out;
}

bool is_total( const KripkeStructure& m )
{
    std::set< StateId > with_successor;
    for ( const auto& e : m.transitions )
        with_successor.insert( e.first );
    return std::all_of( m.states.begin(), m.states.end(),
                        [ & ]( const StateId& s ) { return with_successor.contains( s ); } );
}

bool is_substructure( const KripkeStructure& sub, const KripkeStructure& super )
{
    if ( sub.initial != super.initial )
        return false;
    if ( !std::includes( super.states.begin(), super.states.end(), sub.states.begin(), sub.states.end() ) )
        return false;
    for ( const auto& e : sub.transitions )
    {
        if ( !super.transitions.contains( e ) )
            return false;
        if ( !sub.states.contains( e.first ) || !sub.states.contains( e.second ) )
            return false;
    }
    for ( const auto& s : sub.states )
    {
        auto a = sub.labels.find( s );
        auto b = super.labels.find( s );
        if ( a == sub.labels.end() || b == super.labels.end() || a->second != b->second )
            return false;
    }
    return sub.labels.size() == sub.states.size();
}

std::set< StateId > reachable( const KripkeStructure& m, const std::set< Edge >& edges )
{
    std::map< StateId, std::vector< StateId > > succ;
    for ( const auto& e : edges )
        succ[ e.first ].push_back( e.second );

    std::set< StateId > seen{ m.initial };
    std::deque< StateId > queue{ m.initial };
    while ( !queue.empty() )
    {
        auto s = queue.front();
        queue.pop_front();
        auto it = succ.find( s );
        if ( it == succ.end() )
            continue;
        for ( const auto& t : it->second )
            if ( seen.insert( t ).second )
                queue.push_back( t );
    }
    return seen;
}

KripkeStructure restrict_to( const KripkeStructure& m, const std::set< Edge >& kept )
{
    KripkeStructure out;
    out.initial = m.initial;
    out.ap = m.ap;
    out.states = reachable( m, kept );
    for ( const auto& e : kept )
        if ( out.states.contains( e.first ) )
            out.transitions.insert( e );
    for ( const auto& s : out.states )
    {
        auto it = m.labels.find( s );
        out.labels[ s ] = it == m.labels.end() ? std::set< std::string >{} : it->second;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

namespace {

struct ParsedText
{
    KripkeStructure base;
    std::set< std::string > players;
    std::map< StateId, std::string > turn;
    bool saw_players = false;
};

ParsedText parse_text( std::string_view text, bool game )
{
    ParsedText out;
    bool saw_ap = false;
    bool saw_init = false;
    std::set< std::string > label_union;

    for ( const auto& line : detail::tokenize_lines( text ) )
    {
        const auto& tok = line.tokens;
        const auto& kw = tok[ 0 ].text;
        auto fail = [ & ]( const std::string& msg, std::size_t i ) -> void {
            throw ParseError( msg, line.number, tok[ std::min( i, tok.size() - 1 ) ].column );
        };

        if ( kw == "ap" )
        {
            if ( saw_ap )
                fail( "duplicate 'ap' line", 0 );
            saw_ap = true;
            for ( std::size_t i = 1; i < tok.size(); ++i )
                out.base.ap.insert( tok[ i ].text );
        }
        else if ( kw == "state" )
        {
            if ( tok.size() < 2 )
                fail( "expected state name", 0 );
            StateId s{ tok[ 1 ].text };
            if ( s.name == ":" || s.name == "init" )
                fail( "invalid state name '" + s.name + "'", 1 );
            if ( !out.base.states.insert( s ).second )
                fail( "duplicate state '" + s.name + "'", 1 );
            std::size_t i = 2;
            if ( i < tok.size() && tok[ i ].text == "init" )
            {
                if ( saw_init )
                    fail( "second initial state", i );
                saw_init = true;
                out.base.initial = s;
                ++i;
            }
            auto& label = out.base.labels[ s ];
            if ( i < tok.size() )
            {
                if ( tok[ i ].text != ":" )
                    fail( "expected ':' before propositions", i );
                for ( ++i; i < tok.size(); ++i )
                {
                    label.insert( tok[ i ].text );
                    label_union.insert( tok[ i ].text );
                }
            }
        }
        else if ( kw == "edge" )
        {
            if ( tok.size() != 3 )
                fail( "expected 'edge <from> <to>'", 0 );
            if ( !out.base.transitions.insert( { StateId{ tok[ 1 ].text }, StateId{ tok[ 2 ].text } } ).second )
                fail( "duplicate edge", 1 );
        }
        else if ( game && kw == "players" )
        {
            if ( out.saw_players )
                fail( "duplicate 'players' line", 0 );
            out.saw_players = true;
            for ( std::size_t i = 1; i < tok.size(); ++i )
                out.players.insert( tok[ i ].text );
        }
        else if ( game && kw == "turn" )
        {
            if ( tok.size() != 3 )
                fail( "expected 'turn <state> <player>'", 0 );
            if ( !out.turn.emplace( StateId{ tok[ 1 ].text }, tok[ 2 ].text ).second )
                fail( "duplicate turn for '" + tok[ 1 ].text + "'", 1 );
        }
        else
        {
            fail( "unknown directive '" + kw + "'", 0 );
        }
    }

    if ( !saw_init )
        throw ParseError( "no initial state declared", 1, 1 );
    if ( !saw_ap )
        out.base.ap = label_union;
    if ( game && !out.saw_players )
        for ( const auto& [ s, p ] : out.turn )
            out.players.insert( p );
    return out;
}

void print_body( std::ostringstream& os, const KripkeStructure& m )
{
    for ( const auto& s : m.states )
    {
        os << "state " << s.name;
        if ( s == m.initial )
            os << " init";
        auto it = m.labels.find( s );
        if ( it != m.labels.end() && !it->second.empty() )
        {
            os << " :";
            for ( const auto& p : it->second )
                os << ' ' << p;
        }
        os << '\n';
    }
    for ( const auto& [ from, to ] : m.transitions )
        os << "edge " << from.name << ' ' << to.name << '\n';
}

void print_ap( std::ostringstream& os, const KripkeStructure& m )
{
    os << "ap";
    for ( const auto& p : m.ap )
        os << ' ' << p;
    os << '\n';
}

void throw_violations( const std::vector< Violation >& v )
{
    if ( v.empty() )
        return;
    std::string msg = "invalid structure:";
    for ( const auto& x : v )
        msg += "\n  " + x.to_string();
    throw InvalidInput( msg );
}

} // namespace

KripkeStructure parse_structure( std::string_view text )
{
    return parse_text( text, false ).base;
}

GameStructure parse_game( std::string_view text )
{
    auto parsed = parse_text( text, true );
    return { std::move( parsed.base ), std::move( parsed.players ), std::move( parsed.turn ) };
}

std::string print_structure( const KripkeStructure& m )
{
    std::ostringstream os;
    print_ap( os, m );
    print_body( os, m );
    return os.str();
}

std::string print_game( const GameStructure& g )
{
    std::ostringstream os;
    print_ap( os, g.base );
    os << "players";
    for ( const auto& p : g.players )
        os << ' ' << p;
    os << '\n';
    print_body( os, g.base );
    for ( const auto& [ s, p ] : g.turn )
        os << "turn " << s.name << ' ' << p << '\n';
    return os.str();
}

KripkeStructure load_structure( std::string_view text )
{
    auto m = parse_structure( text );
    throw_violations( validate( m ) );
    return m;
}

GameStructure load_game( std::string_view text )
{
    auto g = parse_game( text );
    throw_violations( validate( g ) );
    return g;
}

// ---------------------------------------------------------------------------
// StateGraph
// ---------------------------------------------------------------------------

StateGraph::StateGraph( const KripkeStructure& m )
{
    names_.assign( m.states.begin(), m.states.end() );
    for ( std::size_t i = 0; i < names_.size(); ++i )
        index_.emplace( names_[ i ], static_cast< int >( i ) );
    succ_.resize( names_.size() );
    pred_.resize( names_.size() );
    labels_.resize( names_.size() );
    for ( const auto& [ from, to ] : m.transitions )
    {
        int a = index( from );
        int b = index( to );
        succ_[ static_cast< std::size_t >( a ) ].push_back( b );
        pred_[ static_cast< std::size_t >( b ) ].push_back( a );
    }
    for ( auto& p : pred_ )
        std::sort( p.begin(), p.end() );
    for ( std::size_t i = 0; i < names_.size(); ++i )
    {
        auto it = m.labels.find( names_[ i ] );
        if ( it != m.labels.end() )
            labels_[ i ] = it->second;
    }
    initial_ = index( m.initial );
}

int StateGraph::index( const StateId& s ) const
{
    auto it = index_.find( s );
    if ( it == index_.end() )
        throw InvalidInput( "unknown state '" + s.name + "'" );
    return it->second;
}

std::size_t StateGraph::max_out_degree() const
{
    std::size_t d = 0;
    for ( const auto& s : succ_ )
        d = std::max( d, s.size() );
    return d;
}

bool StateGraph::has_label( int i, const std::string& p ) const
{
    return labels_[ static_cast< std::size_t >( i ) ].contains( p );
}

} // namespace mrepair
