// mrepair: command-line front end.
//
// Exit codes: 0 success / property holds, 1 property fails (check), 2 usage or
// input error, 3 no repair exists, 4 solver resource limit, 5 internal error.
// `solve` follows the SAT-competition convention (10 SAT, 20 UNSAT).

#include "mrepair/checker.hpp"
#include "mrepair/cnf.hpp"
#include "mrepair/engine.hpp"
#include "mrepair/error.hpp"
#include "mrepair/formula.hpp"
#include "mrepair/kripke.hpp"
#include "mrepair/skeleton.hpp"
#include "mrepair/solver.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

using namespace mrepair;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNoRepair = 3;
constexpr int kExitResource = 4;
constexpr int kExitInternal = 5;

std::string read_text( const std::string& path )
{
    std::ifstream in( path, std::ios::binary );
    if ( !in )
        throw Error( "cannot read " + path );
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text( const std::string& path, const std::string& text )
{
    std::ofstream out( path, std::ios::binary );
    if ( !out )
        throw Error( "cannot write " + path );
    out << text;
}

std::vector< std::vector< std::string > > read_lines( const std::string& path )
{
    std::vector< std::vector< std::string > > out;
    std::istringstream in( read_text( path ) );
    std::string line;
    while ( std::getline( in, line ) )
    {
        if ( auto hash = line.find( '#' ); hash != std::string::npos )
            line.resize( hash );
        std::istringstream ls( line );
        std::vector< std::string > toks;
        for ( std::string t; ls >> t; )
            toks.push_back( t );
        if ( !toks.empty() )
            out.push_back( std::move( toks ) );
    }
    return out;
}

/// Shared flags of the repair-style commands.
struct RepairFlags
{
    std::string input;
    std::string formula_text;
    std::string formula_file;
    std::string uncontrollable;
    std::string symmetry;
    std::string families;
    std::string constraint;
    bool state_deletion = false;
    std::string solver;
    std::uint64_t seed = 1;
    std::int64_t conflict_budget = -1;
    std::string emit_dimacs;
    std::string out;
    std::size_t max_states = 200000;
};

void add_formula_flags( CLI::App* cmd, RepairFlags& f )
{
    cmd->add_option( "formula", f.formula_text, "Formula text" );
    cmd->add_option( "--formula-file", f.formula_file, "Read the formula from a file" );
}

void add_solver_flags( CLI::App* cmd, RepairFlags& f )
{
    cmd->add_option( "--solver", f.solver, "External DIMACS solver command (default: $MREPAIR_SOLVER, else embedded)" );
    cmd->add_option( "--seed", f.seed, "Seed of the embedded solver" )->capture_default_str();
    cmd->add_option( "--conflict-budget", f.conflict_budget, "Conflict limit of the embedded solver (-1: none)" )
            ->capture_default_str();
}

void add_option_flags( CLI::App* cmd, RepairFlags& f )
{
    cmd->add_option( "--uncontrollable", f.uncontrollable, "File of uncontrollable transitions, one 's t' per line" );
    cmd->add_option( "--symmetry", f.symmetry, "File of 'state a b' / 'edge a b c d' pairs" );
    cmd->add_option( "--constraint", f.constraint, "Extra constraint over E(s,t) and N(s)" );
    cmd->add_flag( "--allow-state-deletion", f.state_deletion, "Add N(s) propositions" );
    cmd->add_option( "--families", f.families, "File of 'family <name> s t [s t ...]' lines" );
}

std::string formula_source( const RepairFlags& f )
{
    if ( f.formula_text.empty() == f.formula_file.empty() )
        throw InvalidInput( "give exactly one of a formula argument or --formula-file" );
    return f.formula_text.empty() ? read_text( f.formula_file ) : f.formula_text;
}

SolverConfig solver_config( const RepairFlags& f )
{
    SolverConfig cfg;
    cfg.options.seed = f.seed;
    cfg.options.conflict_budget = f.conflict_budget;
    if ( !f.solver.empty() )
        cfg.external_command = f.solver;
    else if ( const char* env = std::getenv( "MREPAIR_SOLVER" ); env && *env )
        cfg.external_command = std::string( env );
    return cfg;
}

Edge edge( const std::string& a, const std::string& b )
{
    return { StateId{ a }, StateId{ b } };
}

RepairOptions repair_options( const RepairFlags& f )
{
    RepairOptions o;
    o.solver = solver_config( f );
    o.allow_state_deletion = f.state_deletion;
    if ( !f.uncontrollable.empty() )
    {
        for ( const auto& t : read_lines( f.uncontrollable ) )
        {
            std::size_t at = t[ 0 ] == "edge" ? 1 : 0;
            if ( t.size() != at + 2 )
                throw InvalidInput( "uncontrollable file: expected 's t' per line" );
            o.uncontrollable.insert( edge( t[ at ], t[ at + 1 ] ) );
        }
    }
    if ( !f.symmetry.empty() )
    {
        for ( const auto& t : read_lines( f.symmetry ) )
        {
            if ( t[ 0 ] == "state" && t.size() == 3 )
                o.symmetric_states.insert( { StateId{ t[ 1 ] }, StateId{ t[ 2 ] } } );
            else if ( t[ 0 ] == "edge" && t.size() == 5 )
                o.symmetric_edges.insert( { edge( t[ 1 ], t[ 2 ] ), edge( t[ 3 ], t[ 4 ] ) } );
            else
                throw InvalidInput( "symmetry file: expected 'state a b' or 'edge a b c d'" );
        }
    }
    if ( !f.families.empty() )
    {
        for ( const auto& t : read_lines( f.families ) )
        {
            if ( t[ 0 ] != "family" || t.size() < 4 || t.size() % 2 != 0 )
                throw InvalidInput( "families file: expected 'family <name> s t [s t ...]'" );
            std::set< Edge > fam;
            for ( std::size_t i = 2; i < t.size(); i += 2 )
                fam.insert( edge( t[ i ], t[ i + 1 ] ) );
            o.families.push_back( std::move( fam ) );
        }
    }
    if ( !f.constraint.empty() )
        o.constraint = parse_constraint( f.constraint );
    return o;
}

void print_stats( std::ostream& os, const RepairResult& r )
{
    if ( !r.stats )
        return;
    os << "# propositions: " << r.stats->propositions << "\n";
    os << "# clauses: " << r.stats->clauses << "\n";
    os << "# solve-seconds: " << std::fixed << std::setprecision( 3 ) << r.stats->solve_seconds << "\n";
    os.unsetf( std::ios::fixed );
}

/// Shared tail of repair / repair-atl.
int report_repair( const RepairFlags& f, const RepairResult& r, const std::string& input_text,
                   const std::function< std::string() >& print_result )
{
    switch ( r.status )
    {
    case RepairStatus::Unchanged:
        std::cerr << "structure already satisfies the formula\n";
        std::cout << input_text;
        if ( !f.out.empty() )
            write_text( f.out, input_text );
        return 0;
    case RepairStatus::Failure:
        std::cout << "# status: failure\n# no repair exists\n";
        print_stats( std::cout, r );
        return kExitNoRepair;
    case RepairStatus::Repaired: break;
    }
    std::cout << "# status: repaired\n";
    std::cout << "# seed: " << f.seed << "\n";
    for ( const auto& e : r.deleted_edges )
        std::cout << "# deleted-edge: " << edge_to_string( e ) << "\n";
    for ( const auto& s : r.deleted_states )
        std::cout << "# deleted-state: " << s.name << "\n";
    print_stats( std::cout, r );
    auto text = print_result();
    std::cout << text;
    if ( !f.out.empty() )
        write_text( f.out, text );
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_check( const std::string& input, const RepairFlags& f, bool labels, bool atl )
{
    auto text = read_text( input );
    auto src = formula_source( f );
    CheckResult r = atl ? check_atl( load_game( text ), parse_atl( src ) ) : check_ctl( load_structure( text ), parse_ctl( src ) );
    std::cout << ( r.holds ? "holds" : "fails" ) << "\n";
    if ( labels )
        std::cout << r.labels.to_table();
    return r.holds ? 0 : 1;
}

int cmd_repair( const RepairFlags& f )
{
    auto text = read_text( f.input );
    auto m = load_structure( text );
    auto eta = parse_ctl( formula_source( f ) );
    auto opts = repair_options( f );
    if ( !f.emit_dimacs.empty() )
    {
        auto p = prepare_ctl( m, eta, opts );
        write_text( f.emit_dimacs, to_dimacs( p.cnf.cnf, p.cnf.vars ) );
    }
    auto r = repair_ctl( m, eta, opts );
    return report_repair( f, r, text, [ & ] { return print_structure( r.model ); } );
}

int cmd_repair_atl( const RepairFlags& f )
{
    auto text = read_text( f.input );
    auto g = load_game( text );
    auto eta = parse_atl( formula_source( f ) );
    auto opts = repair_options( f );
    if ( !f.emit_dimacs.empty() )
    {
        auto p = prepare_atl( g, eta, opts );
        write_text( f.emit_dimacs, to_dimacs( p.cnf.cnf, p.cnf.vars ) );
    }
    auto r = repair_atl( g, eta, opts );
    return report_repair( f, r, text, [ & ] { return print_game( *r.game ); } );
}

int cmd_skeleton_repair( const RepairFlags& f )
{
    auto text = read_text( f.input );
    auto program = parse_program( text );
    auto eta = parse_ctl( formula_source( f ) );
    RepairOptions opts;
    opts.solver = solver_config( f );
    StgOptions stg;
    stg.max_states = f.max_states;
    if ( !f.emit_dimacs.empty() )
    {
        auto g = build_global_stg( program, stg );
        RepairOptions with_families = opts;
        for ( const auto& fam : g.families )
            with_families.families.push_back( fam.transitions );
        auto p = prepare_ctl( g.structure, eta, with_families );
        write_text( f.emit_dimacs, to_dimacs( p.cnf.cnf, p.cnf.vars ) );
    }
    auto r = repair_program( program, eta, opts, stg );
    switch ( r.status )
    {
    case RepairStatus::Unchanged:
        std::cerr << "program already satisfies the formula\n";
        std::cout << text;
        if ( !f.out.empty() )
            write_text( f.out, text );
        return 0;
    case RepairStatus::Failure:
        std::cout << "# status: failure\n# no repair exists\n";
        print_stats( std::cout, *r.result );
        return kExitNoRepair;
    case RepairStatus::Repaired: break;
    }
    std::cout << "# status: repaired\n";
    std::cout << "# seed: " << f.seed << "\n";
    std::cout << "# global-states: " << r.stg.structure.states.size() << " -> " << r.result->model.states.size() << "\n";
    for ( const auto& a : r.removed_arcs )
        std::cout << "# removed-arc: " << a << "\n";
    for ( const auto& a : r.partially_deleted_arcs )
        std::cout << "# partially-deleted-arc: " << a << "\n";
    print_stats( std::cout, *r.result );
    auto out = print_program( r.program );
    std::cout << out;
    if ( !f.out.empty() )
        write_text( f.out, out );
    return 0;
}

int cmd_encode( const RepairFlags& f, bool atl )
{
    auto text = read_text( f.input );
    auto opts = repair_options( f );
    auto p = atl ? prepare_atl( load_game( text ), parse_atl( formula_source( f ) ), opts )
                 : prepare_ctl( load_structure( text ), parse_ctl( formula_source( f ) ), opts );
    auto dimacs = to_dimacs( p.cnf.cnf, p.cnf.vars );
    if ( f.out.empty() )
        std::cout << dimacs;
    else
        write_text( f.out, dimacs );
    return 0;
}

int cmd_solve( const RepairFlags& f )
{
    auto cnf = parse_dimacs( read_text( f.input ) );
    auto cfg = solver_config( f );
    auto r = cfg.external_command ? solve_external( cnf, *cfg.external_command ) : solve( cnf, cfg.options );
    std::cout << "c seed " << f.seed << "\n" << to_dimacs_result( r.status, r.model );
    switch ( r.status )
    {
    case SatStatus::Sat: return 10;
    case SatStatus::Unsat: return 20;
    case SatStatus::Unknown: return kExitResource;
    }
    return kExitInternal;
}

std::set< std::string > split_list( const std::string& s )
{
    std::set< std::string > out;
    std::stringstream ss( s );
    for ( std::string item; std::getline( ss, item, ',' ); )
        if ( !item.empty() )
            out.insert( item );
    return out;
}

int cmd_gen_random( int nodes, double p, const std::string& ap, std::uint64_t seed, const std::string& out )
{
    auto m = random_model( nodes, p, split_list( ap ), seed );
    std::ostringstream os;
    os << "# gen-random nodes=" << nodes << " p=" << p << " seed=" << seed << "\n" << print_structure( m );
    if ( out.empty() )
        std::cout << os.str();
    else
        write_text( out, os.str() );
    return 0;
}

int cmd_gen_3sat( int vars, int clauses, std::uint64_t seed, const std::string& dimacs, const std::string& out,
                  const std::string& formula_out )
{
    std::vector< std::vector< int > > cls;
    int num_vars = vars;
    if ( !dimacs.empty() )
    {
        auto cnf = parse_dimacs( read_text( dimacs ) );
        num_vars = cnf.num_vars;
        cls = cnf.clauses;
    }
    else
    {
        std::mt19937_64 rng( seed );
        std::uniform_int_distribution< int > var( 1, vars );
        std::bernoulli_distribution sign( 0.5 );
        for ( int i = 0; i < clauses; ++i )
        {
            std::vector< int > c;
            for ( int k = 0; k < 3; ++k )
                c.push_back( sign( rng ) ? var( rng ) : -var( rng ) );
            cls.push_back( std::move( c ) );
        }
    }
    auto red = reduce_3sat( num_vars, cls );
    std::ostringstream os;
    os << "# gen-3sat vars=" << num_vars << " clauses=" << cls.size() << " seed=" << seed << "\n";
    os << "# cnf:";
    for ( const auto& c : cls )
    {
        os << " (";
        for ( std::size_t i = 0; i < c.size(); ++i )
            os << ( i ? " " : "" ) << c[ i ];
        os << ")";
    }
    os << "\n# formula: " << print( red.formula ) << "\n" << print_structure( red.structure );
    if ( out.empty() )
        std::cout << os.str();
    else
        write_text( out, os.str() );
    if ( !formula_out.empty() )
        write_text( formula_out, print( red.formula ) + "\n" );
    return 0;
}

int cmd_bench( const std::string& nodes, double p, const std::string& formula, int trials, std::uint64_t seed,
               const std::string& ap, const RepairFlags& f )
{
    auto eta = parse_ctl( formula );
    std::vector< int > ns;
    for ( const auto& item : split_list( nodes ) )
        ns.push_back( std::stoi( item ) );
    std::sort( ns.begin(), ns.end() );
    RepairOptions opts;
    opts.solver = solver_config( f );
    opts.always_encode = true;
    auto props = split_list( ap );

    std::cout << "# bench seed=" << seed << " p=" << p << " trials=" << trials << " formula=" << print( eta ) << "\n";
    std::cout << "nodes,trials,propositions,clauses,seconds,repaired,failed\n";
    for ( int n : ns )
    {
        double total_props = 0, total_clauses = 0, total_seconds = 0;
        int repaired = 0, failed = 0;
        for ( int t = 0; t < trials; ++t )
        {
            auto m = random_model( n, p, props, seed + 7919 * static_cast< std::uint64_t >( n ) + static_cast< std::uint64_t >( t ) );
            auto t0 = std::chrono::steady_clock::now();
            auto r = repair_ctl( m, eta, opts );
            total_seconds += std::chrono::duration< double >( std::chrono::steady_clock::now() - t0 ).count();
            total_props += r.stats->propositions;
            total_clauses += static_cast< double >( r.stats->clauses );
            ( r.status == RepairStatus::Failure ? failed : repaired ) += 1;
        }
        std::cout << n << "," << trials << "," << std::llround( total_props / trials ) << ","
                  << std::llround( total_clauses / trials ) << "," << std::fixed << std::setprecision( 3 )
                  << total_seconds / trials << "," << repaired << "," << failed << "\n";
        std::cout.unsetf( std::ios::fixed );
    }
    return 0;
}

} // namespace

int main( int argc, char** argv )
{
    CLI::App app{ "Model repair of Kripke structures, game structures and synchronization skeletons" };
    app.require_subcommand( 1 );

    RepairFlags f;
    bool labels = false;
    bool atl = false;

    auto* check = app.add_subcommand( "check", "Model check a structure (exit 0 holds, 1 fails)" );
    check->add_option( "structure", f.input, "Structure file" )->required();
    add_formula_flags( check, f );
    check->add_flag( "--labels", labels, "Print the label table" );
    check->add_flag( "--atl", atl, "Input is a game structure and the formula is ATL" );

    auto* repair = app.add_subcommand( "repair", "Repair a Kripke structure against a CTL formula" );
    repair->add_option( "structure", f.input, "Structure file" )->required();
    add_formula_flags( repair, f );
    add_option_flags( repair, f );
    add_solver_flags( repair, f );
    repair->add_option( "--emit-dimacs", f.emit_dimacs, "Also write the repair formula as DIMACS" );
    repair->add_option( "--out", f.out, "Write the repaired structure to a file" );

    auto* repair_atl_cmd = app.add_subcommand( "repair-atl", "Repair a turn-based game structure against an ATL formula" );
    repair_atl_cmd->add_option( "game", f.input, "Game structure file" )->required();
    add_formula_flags( repair_atl_cmd, f );
    add_option_flags( repair_atl_cmd, f );
    add_solver_flags( repair_atl_cmd, f );
    repair_atl_cmd->add_option( "--emit-dimacs", f.emit_dimacs, "Also write the repair formula as DIMACS" );
    repair_atl_cmd->add_option( "--out", f.out, "Write the repaired game to a file" );

    auto* skel = app.add_subcommand( "skeleton-repair", "Repair a synchronization-skeleton program" );
    skel->add_option( "program", f.input, "Program file" )->required();
    add_formula_flags( skel, f );
    add_solver_flags( skel, f );
    skel->add_option( "--max-states", f.max_states, "Bound on global states" )->capture_default_str();
    skel->add_option( "--emit-dimacs", f.emit_dimacs, "Also write the repair formula as DIMACS" );
    skel->add_option( "--out", f.out, "Write the repaired program to a file" );

    auto* encode = app.add_subcommand( "encode", "Write the repair formula as DIMACS" );
    encode->add_option( "structure", f.input, "Structure (or game) file" )->required();
    add_formula_flags( encode, f );
    add_option_flags( encode, f );
    encode->add_flag( "--atl", atl, "Input is a game structure and the formula is ATL" );
    encode->add_option( "--out", f.out, "Output path (default stdout)" );

    auto* solve_cmd = app.add_subcommand( "solve", "Solve a DIMACS file (exit 10 SAT, 20 UNSAT)" );
    solve_cmd->add_option( "dimacs", f.input, "DIMACS cnf file" )->required();
    add_solver_flags( solve_cmd, f );

    int nodes = 10;
    double prob = 0.1;
    std::string ap = "p,q";
    std::uint64_t gen_seed = 1;
    std::string out;
    auto* gen_random = app.add_subcommand( "gen-random", "Generate a random total Kripke structure" );
    gen_random->add_option( "--nodes", nodes, "Number of states" )->capture_default_str();
    gen_random->add_option( "--p", prob, "Edge probability" )->capture_default_str();
    gen_random->add_option( "--ap", ap, "Comma-separated propositions" )->capture_default_str();
    gen_random->add_option( "--seed", gen_seed, "Random seed" )->capture_default_str();
    gen_random->add_option( "--out", out, "Output path (default stdout)" );

    int sat_vars = 3, sat_clauses = 5;
    std::string sat_dimacs, formula_out;
    auto* gen_3sat = app.add_subcommand( "gen-3sat", "Reduce a (random or given) 3SAT instance to a repair instance" );
    gen_3sat->add_option( "--vars", sat_vars, "Variables of the random instance" )->capture_default_str();
    gen_3sat->add_option( "--clauses", sat_clauses, "Clauses of the random instance" )->capture_default_str();
    gen_3sat->add_option( "--seed", gen_seed, "Random seed" )->capture_default_str();
    gen_3sat->add_option( "--dimacs", sat_dimacs, "Reduce this DIMACS instance instead" );
    gen_3sat->add_option( "--out", out, "Output path (default stdout)" );
    gen_3sat->add_option( "--formula-out", formula_out, "Also write the formula to this file" );

    std::string bench_nodes = "30,40,50,60,70,80";
    std::string bench_formula = "A[p V q]";
    int trials = 1;
    auto* bench = app.add_subcommand( "bench", "Time repairs of random structures (CSV)" );
    bench->add_option( "--nodes", bench_nodes, "Comma-separated node counts" )->capture_default_str();
    bench->add_option( "--p", prob, "Edge probability" )->capture_default_str();
    bench->add_option( "--formula", bench_formula, "CTL formula" )->capture_default_str();
    bench->add_option( "--trials", trials, "Instances per node count" )->capture_default_str();
    bench->add_option( "--seed", gen_seed, "Random seed" )->capture_default_str();
    bench->add_option( "--ap", ap, "Comma-separated propositions" )->capture_default_str();
    bench->add_option( "--solver", f.solver, "External DIMACS solver command" );

    try
    {
        app.parse( argc, argv );
    }
    catch ( const CLI::CallForHelp& e )
    {
        return app.exit( e );
    }
    catch ( const CLI::ParseError& e )
    {
        app.exit( e );
        return kExitUsage;
    }

    try
    {
        if ( check->parsed() )
            return cmd_check( f.input, f, labels, atl );
        if ( repair->parsed() )
            return cmd_repair( f );
        if ( repair_atl_cmd->parsed() )
            return cmd_repair_atl( f );
        if ( skel->parsed() )
            return cmd_skeleton_repair( f );
        if ( encode->parsed() )
            return cmd_encode( f, atl );
        if ( solve_cmd->parsed() )
            return cmd_solve( f );
        if ( gen_random->parsed() )
            return cmd_gen_random( nodes, prob, ap, gen_seed, out );
        if ( gen_3sat->parsed() )
            return cmd_gen_3sat( sat_vars, sat_clauses, gen_seed, sat_dimacs, out, formula_out );
        if ( bench->parsed() )
        {
            if ( trials < 1 )
                throw InvalidInput( "--trials must be at least 1" );
            return cmd_bench( bench_nodes, prob, bench_formula, trials, gen_seed, ap, f );
        }
    }
    catch ( const ResourceLimit& e )
    {
        std::cerr << "resource limit: " << e.what() << "\n";
        return kExitResource;
    }
    catch ( const InternalError& e )
    {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    catch ( const Error& e )
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    catch ( const std::exception& e )
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
