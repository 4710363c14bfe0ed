#include "mrepair/skeleton.hpp"

#include "mrepair/checker.hpp"
#include "mrepair/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace mrepair {

const LocalState* Process::local( const std::string& n ) const
{
    auto it = std::find_if( locals.begin(), locals.end(), [ & ]( const LocalState& l ) { return l.name == n; } );
    return it == locals.end() ? nullptr : &*it;
}

std::string ProgramViolation::to_string() const
{
    return arc.empty() ? reason : "arc " + arc + ": " + reason;
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

namespace {

std::vector< GuardTerm > parse_guard( const std::string& text, int line, int column )
{
    if ( text == "true" )
        return {};
    std::vector< GuardTerm > out;
    for ( const auto& raw : detail::split( text, '&' ) )
    {
        if ( raw.empty() )
            throw ParseError( "empty guard term", line, column );
        auto eq = raw.find( '=' );
        if ( eq == std::string::npos )
            out.push_back( { GuardTerm::Kind::Prop, raw, {} } );
        else if ( eq == 0 || eq + 1 == raw.size() )
            throw ParseError( "malformed guard term '" + raw + "'", line, column );
        else
            out.push_back( { GuardTerm::Kind::VarEq, raw.substr( 0, eq ), raw.substr( eq + 1 ) } );
    }
    return out;
}

Action parse_action( const std::string& text, int line, int column )
{
    if ( text == "skip" )
        return { Action::Kind::Skip, {}, {} };
    if ( auto pos = text.find( ":=" ); pos != std::string::npos )
    {
        if ( pos == 0 || pos + 2 == text.size() )
            throw ParseError( "malformed assignment '" + text + "'", line, column );
        return { Action::Kind::Assign, text.substr( 0, pos ), text.substr( pos + 2 ) };
    }
    if ( text[ 0 ] == 'L' )
        return { Action::Kind::WriteLocal, {}, {} };
    throw ParseError( "expected 'skip', 'L<i>' or 'x:=c', found '" + text + "'", line, column );
}

std::string guard_to_string( const std::vector< GuardTerm >& g )
{
    if ( g.empty() )
        return "true";
    std::string out;
    for ( const auto& t : g )
    {
        if ( !out.empty() )
            out += '&';
        out += t.kind == GuardTerm::Kind::Prop ? t.name : t.name + "=" + t.value;
    }
    return out;
}

std::string action_to_string( const Action& a, const std::string& process )
{
    switch ( a.kind )
    {
    case Action::Kind::Skip: return "skip";
    case Action::Kind::WriteLocal: return "L" + process;
    case Action::Kind::Assign: return a.var + ":=" + a.value;
    }
    return "skip";
}

std::string arc_to_string( const Arc& a, const std::string& process )
{
    return "arc " + a.id + " " + a.from + " " + a.to + " guard " + guard_to_string( a.guard ) + " do " +
           action_to_string( a.action, process );
}

} // namespace

Program parse_program( std::string_view text )
{
    Program p;
    Process* current = nullptr;
    for ( const auto& line : detail::tokenize_lines( text ) )
    {
        const auto& t = line.tokens;
        const auto& kw = t[ 0 ].text;
        auto need_process = [ & ]() -> Process& {
            if ( !current )
                throw ParseError( "'" + kw + "' outside a process block", line.number, t[ 0 ].column );
            return *current;
        };
        if ( kw == "shared" )
        {
            if ( t.size() != 6 || t[ 2 ].text != "domain" || t[ 4 ].text != "init" )
                throw ParseError( "expected 'shared <x> domain <v1,v2,..> init <v>'", line.number, t[ 0 ].column );
            p.shared.push_back( { t[ 1 ].text, detail::split( t[ 3 ].text, ',' ), t[ 5 ].text } );
        }
        else if ( kw == "process" )
        {
            if ( t.size() != 2 )
                throw ParseError( "expected 'process <name>'", line.number, t[ 0 ].column );
            p.processes.push_back( { t[ 1 ].text, {}, {}, {}, {} } );
            current = &p.processes.back();
        }
        else if ( kw == "local" )
        {
            auto& proc = need_process();
            if ( t.size() < 2 || ( t.size() > 2 && t[ 2 ].text != ":" ) )
                throw ParseError( "expected 'local <name> : <props>'", line.number, t[ 0 ].column );
            LocalState l{ t[ 1 ].text, {} };
            for ( std::size_t i = 3; i < t.size(); ++i )
                l.props.insert( t[ i ].text );
            proc.locals.push_back( std::move( l ) );
        }
        else if ( kw == "init" )
        {
            auto& proc = need_process();
            if ( t.size() != 2 )
                throw ParseError( "expected 'init <local>'", line.number, t[ 0 ].column );
            if ( !proc.init.empty() )
                throw ParseError( "duplicate init for process " + proc.name, line.number, t[ 0 ].column );
            proc.init = t[ 1 ].text;
        }
        else if ( kw == "arc" )
        {
            auto& proc = need_process();
            if ( t.size() < 8 || t[ 4 ].text != "guard" )
                throw ParseError( "expected 'arc <id> <from> <to> guard <g> do <a>'", line.number, t[ 0 ].column );
            std::size_t do_pos = 5;
            while ( do_pos < t.size() && t[ do_pos ].text != "do" )
                ++do_pos;
            if ( do_pos == 5 || do_pos + 2 != t.size() )
                throw ParseError( "expected 'guard <g> do <a>'", line.number, t[ 4 ].column );
            std::string guard;
            for ( std::size_t i = 5; i < do_pos; ++i )
                guard += t[ i ].text;
            Arc a{ t[ 1 ].text, t[ 2 ].text, t[ 3 ].text, parse_guard( guard, line.number, t[ 5 ].column ),
                   parse_action( t[ do_pos + 1 ].text, line.number, t[ do_pos + 1 ].column ) };
            proc.arcs.push_back( std::move( a ) );
        }
        else
            throw ParseError( "unknown keyword '" + kw + "'", line.number, t[ 0 ].column );
    }
    return p;
}

std::string print_program( const Program& p )
{
    std::string out;
    for ( const auto& x : p.shared )
    {
        out += "shared " + x.name + " domain ";
        for ( std::size_t i = 0; i < x.domain.size(); ++i )
            out += ( i ? "," : "" ) + x.domain[ i ];
        out += " init " + x.init + "\n";
    }
    for ( std::size_t k = 0; k < p.processes.size(); ++k )
    {
        const auto& proc = p.processes[ k ];
        if ( k > 0 || !p.shared.empty() )
            out += "\n";
        out += "process " + proc.name + "\n";
        for ( const auto& l : proc.locals )
        {
            out += "local " + l.name + " :";
            for ( const auto& prop : l.props )
                out += " " + prop;
            out += "\n";
        }
        if ( !proc.init.empty() )
            out += "init " + proc.init + "\n";
        for ( const auto& a : proc.arcs )
            out += arc_to_string( a, proc.name ) + "\n";
        for ( const auto& a : proc.removed )
            out += "# removed " + arc_to_string( a, proc.name ) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

std::vector< ProgramViolation > validate_arw( const Program& p )
{
    std::vector< ProgramViolation > out;
    auto report = [ & ]( std::string arc, std::string reason ) { out.push_back( { std::move( arc ), std::move( reason ) } ); };

    std::map< std::string, const SharedVar* > vars;
    for ( const auto& x : p.shared )
    {
        if ( !vars.emplace( x.name, &x ).second )
            report( "", "shared variable " + x.name + " declared twice" );
        if ( x.domain.empty() || std::any_of( x.domain.begin(), x.domain.end(), []( const auto& v ) { return v.empty(); } ) )
            report( "", "shared variable " + x.name + " has a malformed domain" );
        if ( std::find( x.domain.begin(), x.domain.end(), x.init ) == x.domain.end() )
            report( "", "initial value of " + x.name + " is outside its domain" );
    }
    auto in_domain = [ & ]( const std::string& var, const std::string& value ) {
        auto it = vars.find( var );
        return it != vars.end() && std::find( it->second->domain.begin(), it->second->domain.end(), value ) != it->second->domain.end();
    };

    if ( p.processes.empty() )
        report( "", "program has no processes" );
    std::map< std::string, std::string > owner; // proposition -> process
    std::set< std::string > process_names, arc_ids;
    for ( const auto& proc : p.processes )
    {
        if ( !process_names.insert( proc.name ).second )
            report( "", "process " + proc.name + " declared twice" );
        std::set< std::string > names;
        for ( const auto& l : proc.locals )
        {
            if ( !names.insert( l.name ).second )
                report( "", "local state " + l.name + " declared twice in process " + proc.name );
            for ( const auto& prop : l.props )
            {
                if ( prop.find( '=' ) != std::string::npos )
                    report( "", "local proposition " + prop + " may not contain '='" );
                auto [ it, fresh ] = owner.emplace( prop, proc.name );
                if ( !fresh && it->second != proc.name )
                    report( "", "proposition " + prop + " belongs to processes " + it->second + " and " + proc.name );
            }
        }
        if ( proc.locals.empty() )
            report( "", "process " + proc.name + " has no local states" );
        if ( proc.init.empty() )
            report( "", "process " + proc.name + " has no initial local state" );
        else if ( !proc.local( proc.init ) )
            report( "", "initial local state " + proc.init + " of process " + proc.name + " is undeclared" );
    }

    for ( const auto& proc : p.processes )
    {
        for ( const auto& a : proc.arcs )
        {
            if ( !arc_ids.insert( a.id ).second )
                report( a.id, "duplicate arc id" );
            const auto* from = proc.local( a.from );
            const auto* to = proc.local( a.to );
            if ( !from || !to )
            {
                report( a.id, "endpoint is not a local state of process " + proc.name );
                continue;
            }
            for ( const auto& term : a.guard )
            {
                if ( term.kind == GuardTerm::Kind::VarEq )
                {
                    if ( !in_domain( term.name, term.value ) )
                        report( a.id, "guard " + term.name + "=" + term.value + " names an unknown variable or value" );
                }
                else
                {
                    auto it = owner.find( term.name );
                    if ( it == owner.end() )
                        report( a.id, "guard reads unknown proposition " + term.name );
                    else if ( it->second == proc.name )
                        report( a.id, "guard reads a proposition of its own process" );
                }
            }
            if ( a.action.kind == Action::Kind::Assign && !in_domain( a.action.var, a.action.value ) )
                report( a.id, "assignment " + a.action.var + ":=" + a.action.value + " names an unknown variable or value" );

            const bool same_label = from->props == to->props;
            if ( a.guard.empty() )
            {
                switch ( a.action.kind )
                {
                case Action::Kind::Skip: report( a.id, "unguarded arc writes nothing" ); break;
                case Action::Kind::WriteLocal:
                    if ( same_label )
                        report( a.id, "writes L" + proc.name + " but the label does not change" );
                    break;
                case Action::Kind::Assign:
                    if ( !same_label )
                        report( a.id, "writes a shared variable and L" + proc.name + " at once" );
                    break;
                }
            }
            else
            {
                if ( a.guard.size() > 1 )
                    report( a.id, "guard is not a simple term" );
                if ( a.action.kind != Action::Kind::Skip )
                    report( a.id, "guarded arc writes" );
                else if ( !same_label )
                    report( a.id, "guarded arc changes L" + proc.name );
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Global state graph
// ---------------------------------------------------------------------------

namespace {

struct CompiledArc
{
    const Arc* arc;
    int from;
    int to;
    // guard: (process, local set where the proposition holds) or (var, value)
    std::vector< std::pair< int, std::vector< bool > > > prop_terms;
    std::vector< std::pair< int, int > > var_terms;
    int assign_var = -1;
    int assign_value = -1;
};

class Explorer
{
public:
    Explorer( const Program& p, const StgOptions& opts ) : p_{ p }, opts_{ opts }
    {
        auto v = validate_arw( p );
        if ( !v.empty() )
            throw InvalidInput( "invalid program: " + v.front().to_string() );
        std::map< std::string, int > var_index;
        for ( std::size_t i = 0; i < p.shared.size(); ++i )
            var_index[ p.shared[ i ].name ] = static_cast< int >( i );
        auto value_index = [ & ]( int var, const std::string& v ) {
            const auto& d = p.shared[ static_cast< std::size_t >( var ) ].domain;
            return static_cast< int >( std::find( d.begin(), d.end(), v ) - d.begin() );
        };
        auto local_index = [ & ]( const Process& proc, const std::string& n ) {
            for ( std::size_t i = 0; i < proc.locals.size(); ++i )
                if ( proc.locals[ i ].name == n )
                    return static_cast< int >( i );
            return -1;
        };

        arcs_.resize( p.processes.size() );
        for ( std::size_t k = 0; k < p.processes.size(); ++k )
        {
            const auto& proc = p.processes[ k ];
            for ( const auto& a : proc.arcs )
            {
                CompiledArc c{ &a, local_index( proc, a.from ), local_index( proc, a.to ), {}, {}, -1, -1 };
                for ( const auto& term : a.guard )
                {
                    if ( term.kind == GuardTerm::Kind::VarEq )
                    {
                        int var = var_index.at( term.name );
                        c.var_terms.emplace_back( var, value_index( var, term.value ) );
                        continue;
                    }
                    for ( std::size_t j = 0; j < p.processes.size(); ++j )
                    {
                        const auto& other = p.processes[ j ];
                        std::vector< bool > holds;
                        bool any = false;
                        for ( const auto& l : other.locals )
                        {
                            holds.push_back( l.props.contains( term.name ) );
                            any = any || holds.back();
                        }
                        if ( any )
                            c.prop_terms.emplace_back( static_cast< int >( j ), std::move( holds ) );
                    }
                }
                if ( a.action.kind == Action::Kind::Assign )
                {
                    c.assign_var = var_index.at( a.action.var );
                    c.assign_value = value_index( c.assign_var, a.action.value );
                }
                arcs_[ k ].push_back( std::move( c ) );
            }
        }
        init_.resize( p.processes.size() + p.shared.size() + ( opts.turn_based ? 1 : 0 ), 0 );
        for ( std::size_t k = 0; k < p.processes.size(); ++k )
            init_[ k ] = local_index( p.processes[ k ], p.processes[ k ].init );
        for ( std::size_t i = 0; i < p.shared.size(); ++i )
            init_[ p.processes.size() + i ] = value_index( static_cast< int >( i ), p.shared[ i ].init );
    }

    Stg run()
    {
        Stg stg;
        auto& m = stg.structure;
        for ( const auto& proc : p_.processes )
            for ( const auto& l : proc.locals )
                m.ap.insert( l.props.begin(), l.props.end() );
        for ( const auto& x : p_.shared )
            for ( const auto& v : x.domain )
                m.ap.insert( x.name + "=" + v );

        std::map< std::string, std::set< Edge > > family;
        std::map< std::vector< int >, StateId > seen;
        std::deque< std::vector< int > > queue;
        GameStructure game;
        auto intern = [ & ]( const std::vector< int >& g ) {
            auto it = seen.find( g );
            if ( it != seen.end() )
                return it->second;
            if ( seen.size() >= opts_.max_states )
                throw ResourceLimit( "global state graph exceeds " + std::to_string( opts_.max_states ) + " states" );
            StateId id{ name( g ) };
            seen.emplace( g, id );
            m.states.insert( id );
            m.labels[ id ] = label( g );
            if ( opts_.turn_based )
                game.turn[ id ] = p_.processes[ static_cast< std::size_t >( g.back() ) ].name;
            queue.push_back( g );
            return id;
        };
        m.initial = intern( init_ );

        const std::size_t K = p_.processes.size();
        while ( !queue.empty() )
        {
            auto g = queue.front();
            queue.pop_front();
            StateId src = seen.at( g );
            for ( std::size_t k = 0; k < K; ++k )
            {
                if ( opts_.turn_based && static_cast< std::size_t >( g.back() ) != k )
                    continue;
                bool moved = false;
                for ( const auto& c : arcs_[ k ] )
                {
                    if ( !enabled( c, k, g ) )
                        continue;
                    auto next = g;
                    next[ k ] = c.to;
                    if ( c.assign_var >= 0 )
                        next[ K + static_cast< std::size_t >( c.assign_var ) ] = c.assign_value;
                    if ( opts_.turn_based )
                        next.back() = static_cast< int >( ( k + 1 ) % K );
                    Edge e{ src, intern( next ) };
                    m.transitions.insert( e );
                    family[ c.arc->id ].insert( e );
                    moved = true;
                }
                if ( opts_.turn_based && !moved )
                {
                    auto next = g;
                    next.back() = static_cast< int >( ( k + 1 ) % K );
                    m.transitions.insert( { src, intern( next ) } );
                }
            }
        }

        for ( const auto& proc : p_.processes )
            for ( const auto& a : proc.arcs )
                if ( auto it = family.find( a.id ); it != family.end() )
                    stg.families.push_back( { a.id, std::move( it->second ) } );
        if ( opts_.turn_based )
        {
            game.base = m;
            for ( const auto& proc : p_.processes )
                game.players.insert( proc.name );
            stg.game = std::move( game );
        }
        return stg;
    }

private:
    bool enabled( const CompiledArc& c, std::size_t k, const std::vector< int >& g ) const
    {
        if ( g[ k ] != c.from )
            return false;
        for ( const auto& [ j, holds ] : c.prop_terms )
            if ( !holds[ static_cast< std::size_t >( g[ static_cast< std::size_t >( j ) ] ) ] )
                return false;
        for ( const auto& [ var, value ] : c.var_terms )
            if ( g[ p_.processes.size() + static_cast< std::size_t >( var ) ] != value )
                return false;
        return true;
    }

    std::string name( const std::vector< int >& g ) const
    {
        std::string out;
        for ( std::size_t k = 0; k < p_.processes.size(); ++k )
        {
            if ( k )
                out += '.';
            out += p_.processes[ k ].locals[ static_cast< std::size_t >( g[ k ] ) ].name;
        }
        for ( std::size_t i = 0; i < p_.shared.size(); ++i )
        {
            const auto& x = p_.shared[ i ];
            out += "." + x.name + "=" + x.domain[ static_cast< std::size_t >( g[ p_.processes.size() + i ] ) ];
        }
        if ( opts_.turn_based )
            out += "@" + p_.processes[ static_cast< std::size_t >( g.back() ) ].name;
        return out;
    }

    std::set< std::string > label( const std::vector< int >& g ) const
    {
        std::set< std::string > out;
        for ( std::size_t k = 0; k < p_.processes.size(); ++k )
        {
            const auto& props = p_.processes[ k ].locals[ static_cast< std::size_t >( g[ k ] ) ].props;
            out.insert( props.begin(), props.end() );
        }
        for ( std::size_t i = 0; i < p_.shared.size(); ++i )
        {
            const auto& x = p_.shared[ i ];
            out.insert( x.name + "=" + x.domain[ static_cast< std::size_t >( g[ p_.processes.size() + i ] ) ] );
        }
        return out;
    }

    const Program& p_;
    StgOptions opts_;
    std::vector< std::vector< CompiledArc > > arcs_;
    std::vector< int > init_;
};

} // namespace

Stg build_global_stg( const Program& p, const StgOptions& opts )
{
    return Explorer( p, opts ).run();
}

ProgramRepair repair_program( const Program& p, const Formula& eta, RepairOptions opts, const StgOptions& stg_opts )
{
    StgOptions interleaving = stg_opts;
    interleaving.turn_based = false;
    ProgramRepair out;
    out.stg = build_global_stg( p, interleaving );
    const auto& m = out.stg.structure;
    if ( !is_total( m ) )
        throw InvalidInput( "global state graph has deadlocked states" );

    if ( !opts.constrains() && check_ctl( m, eta ).holds )
    {
        out.status = RepairStatus::Unchanged;
        out.program = p;
        return out;
    }
    opts.families.clear();
    for ( const auto& f : out.stg.families )
        opts.families.push_back( f.transitions );
    auto res = repair_ctl( m, eta, opts );
    out.status = res.status;
    out.program = p;
    if ( res.status == RepairStatus::Failure )
    {
        out.result = std::move( res );
        return out;
    }

    std::map< std::string, std::size_t > deleted_count;
    std::map< std::string, std::size_t > family_size;
    for ( const auto& f : out.stg.families )
    {
        family_size[ f.arc ] = f.transitions.size();
        deleted_count[ f.arc ] = static_cast< std::size_t >( std::count_if(
                f.transitions.begin(), f.transitions.end(), [ & ]( const Edge& e ) { return res.deleted_edges.contains( e ); } ) );
    }
    for ( auto& proc : out.program.processes )
    {
        std::vector< Arc > kept;
        for ( auto& a : proc.arcs )
        {
            auto it = family_size.find( a.id );
            std::size_t deleted = it == family_size.end() ? 0 : deleted_count[ a.id ];
            if ( it != family_size.end() && deleted == it->second )
            {
                out.removed_arcs.push_back( a.id );
                proc.removed.push_back( a );
            }
            else
            {
                if ( deleted > 0 )
                    out.partially_deleted_arcs.push_back( a.id );
                kept.push_back( a );
            }
        }
        proc.arcs = std::move( kept );
    }
    out.result = std::move( res );

    auto rebuilt = build_global_stg( out.program, interleaving );
    if ( !is_total( rebuilt.structure ) || !check_ctl( rebuilt.structure, eta ).holds )
        throw InternalError( "repaired program does not satisfy the formula" );
    return out;
}

} // namespace mrepair
