#include "mrepair/solver.hpp"

#include "mrepair/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <random>
#include <sys/wait.h>
#include <unistd.h>

namespace mrepair {

namespace {

// Literals are coded as 2*v + sign with v 0-based; sign 1 means negated.
using Lit = std::uint32_t;
using CRef = std::uint32_t;
constexpr CRef kNoReason = UINT32_MAX;

Lit make_lit( int dimacs )
{
    auto v = static_cast< Lit >( std::abs( dimacs ) - 1 );
    return 2 * v + ( dimacs < 0 ? 1u : 0u );
}
std::uint32_t var_of( Lit l )
{
    return l >> 1;
}
Lit neg( Lit l )
{
    return l ^ 1u;
}

constexpr std::int8_t kFalse = 0;
constexpr std::int8_t kTrue = 1;
constexpr std::int8_t kUndef = 2;

struct Clause
{
    std::vector< Lit > lits;
    bool learnt = false;
    bool deleted = false;
    double activity = 0;
};

struct Watcher
{
    CRef cref;
    Lit blocker;
};

class Cdcl
{
public:
    Cdcl( const CnfFormula& c, const SolverOptions& opts )
            : n_{ static_cast< std::uint32_t >( c.num_vars ) }, opts_{ opts }, rng_{ opts.seed }
    {
        value_.assign( n_, kUndef );
        level_.assign( n_, 0 );
        reason_.assign( n_, kNoReason );
        phase_.assign( n_, 0 );
        activity_.assign( n_, 0.0 );
        seen_.assign( n_, 0 );
        heap_index_.assign( n_, -1 );
        watches_.resize( 2 * static_cast< std::size_t >( n_ ) );
        for ( std::uint32_t v = 0; v < n_; ++v )
            heap_insert( v );

        for ( const auto& clause : c.clauses )
        {
            std::vector< Lit > lits;
            for ( int l : clause )
                lits.push_back( make_lit( l ) );
            if ( !add_input_clause( std::move( lits ) ) )
            {
                unsat_ = true;
                break;
            }
        }
    }

    SatStatus run()
    {
        if ( unsat_ || propagate() != kNoReason )
            return SatStatus::Unsat;

        double restart_limit = 100;
        std::int64_t conflicts_since_restart = 0;
        std::size_t max_learnts = std::max< std::size_t >( clauses_.size() / 3, 2000 );
        std::vector< Lit > learnt;

        for ( ;; )
        {
            CRef confl = propagate();
            if ( confl != kNoReason )
            {
                ++stats.conflicts;
                ++conflicts_since_restart;
                if ( decision_level() == 0 )
                    return SatStatus::Unsat;
                int bt = analyze( confl, learnt );
                backtrack( bt );
                if ( learnt.size() == 1 )
                    enqueue( learnt[ 0 ], kNoReason );
                else
                {
                    CRef cr = attach( { learnt, true, false, 0 } );
                    bump_clause( clauses_[ cr ] );
                    enqueue( learnt[ 0 ], cr );
                    ++num_learnts_;
                    ++stats.learnt_clauses;
                }
                var_inc_ /= kVarDecay;
                clause_inc_ /= kClauseDecay;
                if ( opts_.conflict_budget >= 0 && stats.conflicts >= opts_.conflict_budget )
                    return SatStatus::Unknown;
                continue;
            }

            if ( static_cast< double >( conflicts_since_restart ) >= restart_limit )
            {
                ++stats.restarts;
                conflicts_since_restart = 0;
                restart_limit *= 1.5;
                backtrack( 0 );
                if ( num_learnts_ > max_learnts )
                {
                    reduce_learnts();
                    max_learnts = max_learnts * 11 / 10;
                }
                continue;
            }

            auto next = pick_branch();
            if ( !next )
                return SatStatus::Sat;
            ++stats.decisions;
            trail_lim_.push_back( trail_.size() );
            enqueue( *next, kNoReason );
        }
    }

    Assignment model() const
    {
        Assignment a( static_cast< int >( n_ ) );
        for ( std::uint32_t v = 0; v < n_; ++v )
            a.set( static_cast< int >( v + 1 ), value_[ v ] == kTrue );
        return a;
    }

    SolverStats stats;

private:
    static constexpr double kVarDecay = 0.95;
    static constexpr double kClauseDecay = 0.999;

    std::int8_t value( Lit l ) const
    {
        std::int8_t v = value_[ var_of( l ) ];
        return v == kUndef ? kUndef : static_cast< std::int8_t >( v ^ static_cast< std::int8_t >( l & 1u ) );
    }

    int decision_level() const { return static_cast< int >( trail_lim_.size() ); }

    /// Returns false when the formula is already refuted at level 0.
    bool add_input_clause( std::vector< Lit > lits )
    {
        std::sort( lits.begin(), lits.end() );
        lits.erase( std::unique( lits.begin(), lits.end() ), lits.end() );
        for ( std::size_t i = 1; i < lits.size(); ++i )
            if ( lits[ i ] == neg( lits[ i - 1 ] ) )
                return true;
        std::erase_if( lits, [ & ]( Lit l ) { return value( l ) == kFalse; } );
        if ( std::any_of( lits.begin(), lits.end(), [ & ]( Lit l ) { return value( l ) == kTrue; } ) )
            return true;
        if ( lits.empty() )
            return false;
        if ( lits.size() == 1 )
        {
            enqueue( lits[ 0 ], kNoReason );
            return propagate() == kNoReason;
        }
        attach( { std::move( lits ), false, false, 0 } );
        return true;
    }

    CRef attach( Clause c )
    {
        auto cr = static_cast< CRef >( clauses_.size() );
        watches_[ c.lits[ 0 ] ].push_back( { cr, c.lits[ 1 ] } );
        watches_[ c.lits[ 1 ] ].push_back( { cr, c.lits[ 0 ] } );
        clauses_.push_back( std::move( c ) );
        return cr;
    }

    void enqueue( Lit l, CRef reason )
    {
        auto v = var_of( l );
        value_[ v ] = static_cast< std::int8_t >( ( l & 1u ) ? kFalse : kTrue );
        level_[ v ] = decision_level();
        reason_[ v ] = reason;
        trail_.push_back( l );
    }

    /// Watch lists are indexed by the watched literal; when it becomes false
    /// the clause looks for a replacement.
    CRef propagate()
    {
        while ( qhead_ < trail_.size() )
        {
            Lit falsified = neg( trail_[ qhead_++ ] );
            ++stats.propagations;
            auto& ws = watches_[ falsified ];
            std::size_t i = 0, j = 0;
            while ( i < ws.size() )
            {
                Watcher w = ws[ i++ ];
                if ( value( w.blocker ) == kTrue )
                {
                    ws[ j++ ] = w;
                    continue;
                }
                auto& lits = clauses_[ w.cref ].lits;
                if ( lits[ 0 ] == falsified )
                    std::swap( lits[ 0 ], lits[ 1 ] );
                Lit first = lits[ 0 ];
                if ( first != w.blocker && value( first ) == kTrue )
                {
                    ws[ j++ ] = { w.cref, first };
                    continue;
                }
                bool moved = false;
                for ( std::size_t k = 2; k < lits.size(); ++k )
                {
                    if ( value( lits[ k ] ) != kFalse )
                    {
                        std::swap( lits[ 1 ], lits[ k ] );
                        watches_[ lits[ 1 ] ].push_back( { w.cref, first } );
                        moved = true;
                        break;
                    }
                }
                if ( moved )
                    continue;
                ws[ j++ ] = { w.cref, first };
                if ( value( first ) == kFalse )
                {
                    while ( i < ws.size() )
                        ws[ j++ ] = ws[ i++ ];
                    ws.resize( j );
                    qhead_ = trail_.size();
                    return w.cref;
                }
                enqueue( first, w.cref );
            }
            ws.resize( j );
        }
        return kNoReason;
    }

    /// First-UIP analysis. Leaves the asserting literal at learnt[0] and a
    /// literal of the backjump level at learnt[1]; returns that level.
    int analyze( CRef confl, std::vector< Lit >& learnt )
    {
        learnt.assign( 1, 0 );
        int path = 0;
        bool have_p = false;
        Lit p = 0;
        std::size_t idx = trail_.size();
        CRef cr = confl;
        do
        {
            auto& c = clauses_[ cr ];
            if ( c.learnt )
                bump_clause( c );
            for ( std::size_t k = have_p ? 1 : 0; k < c.lits.size(); ++k )
            {
                Lit q = c.lits[ k ];
                auto v = var_of( q );
                if ( seen_[ v ] || level_[ v ] == 0 )
                    continue;
                bump_var( v );
                seen_[ v ] = 1;
                if ( level_[ v ] >= decision_level() )
                    ++path;
                else
                    learnt.push_back( q );
            }
            while ( !seen_[ var_of( trail_[ --idx ] ) ] )
                ;
            p = trail_[ idx ];
            have_p = true;
            cr = reason_[ var_of( p ) ];
            seen_[ var_of( p ) ] = 0;
            --path;
        } while ( path > 0 );
        learnt[ 0 ] = neg( p );

        // Drop literals implied by the rest of the clause through their reason.
        std::vector< Lit > original( learnt.begin() + 1, learnt.end() );
        std::size_t keep = 1;
        for ( std::size_t k = 1; k < learnt.size(); ++k )
        {
            CRef r = reason_[ var_of( learnt[ k ] ) ];
            bool redundant = r != kNoReason;
            if ( redundant )
            {
                const auto& rl = clauses_[ r ].lits;
                for ( std::size_t m = 1; m < rl.size(); ++m )
                {
                    auto v = var_of( rl[ m ] );
                    if ( !seen_[ v ] && level_[ v ] > 0 )
                    {
                        redundant = false;
                        break;
                    }
                }
            }
            if ( !redundant )
                learnt[ keep++ ] = learnt[ k ];
        }
        learnt.resize( keep );
        for ( Lit l : original )
            seen_[ var_of( l ) ] = 0;

        if ( learnt.size() == 1 )
            return 0;
        std::size_t max_k = 1;
        for ( std::size_t k = 2; k < learnt.size(); ++k )
            if ( level_[ var_of( learnt[ k ] ) ] > level_[ var_of( learnt[ max_k ] ) ] )
                max_k = k;
        std::swap( learnt[ 1 ], learnt[ max_k ] );
        return level_[ var_of( learnt[ 1 ] ) ];
    }

    void backtrack( int level )
    {
        if ( decision_level() <= level )
            return;
        std::size_t stop = trail_lim_[ static_cast< std::size_t >( level ) ];
        for ( std::size_t k = trail_.size(); k-- > stop; )
        {
            auto v = var_of( trail_[ k ] );
            phase_[ v ] = value_[ v ];
            value_[ v ] = kUndef;
            reason_[ v ] = kNoReason;
            if ( heap_index_[ v ] < 0 )
                heap_insert( v );
        }
        trail_.resize( stop );
        trail_lim_.resize( static_cast< std::size_t >( level ) );
        qhead_ = trail_.size();
    }

    std::optional< Lit > pick_branch()
    {
        std::optional< std::uint32_t > v;
        if ( !heap_.empty() && std::uniform_real_distribution< double >( 0, 1 )( rng_ ) < opts_.random_branch_freq )
        {
            auto cand = heap_[ std::uniform_int_distribution< std::size_t >( 0, heap_.size() - 1 )( rng_ ) ];
            if ( value_[ cand ] == kUndef )
                v = cand;
        }
        while ( !v && !heap_.empty() )
        {
            auto cand = heap_pop();
            if ( value_[ cand ] == kUndef )
                v = cand;
        }
        if ( !v )
            return std::nullopt;
        return 2 * *v + ( phase_[ *v ] == kTrue ? 0u : 1u );
    }

    void bump_var( std::uint32_t v )
    {
        activity_[ v ] += var_inc_;
        if ( activity_[ v ] > 1e100 )
        {
            for ( auto& a : activity_ )
                a *= 1e-100;
            var_inc_ *= 1e-100;
        }
        if ( heap_index_[ v ] >= 0 )
            sift_up( static_cast< std::size_t >( heap_index_[ v ] ) );
    }

    void bump_clause( Clause& c )
    {
        c.activity += clause_inc_;
        if ( c.activity > 1e20 )
        {
            for ( auto& x : clauses_ )
                if ( x.learnt )
                    x.activity *= 1e-20;
            clause_inc_ *= 1e-20;
        }
    }

    /// Called at decision level 0: drops the less active half of the long
    /// learnt clauses and every clause satisfied at the root, then compacts.
    void reduce_learnts()
    {
        std::vector< CRef > learnts;
        for ( CRef cr = 0; cr < clauses_.size(); ++cr )
            if ( clauses_[ cr ].learnt && clauses_[ cr ].lits.size() > 2 )
                learnts.push_back( cr );
        std::sort( learnts.begin(), learnts.end(), [ & ]( CRef a, CRef b ) {
            if ( clauses_[ a ].activity != clauses_[ b ].activity )
                return clauses_[ a ].activity < clauses_[ b ].activity;
            return a < b;
        } );
        for ( std::size_t k = 0; k < learnts.size() / 2; ++k )
            clauses_[ learnts[ k ] ].deleted = true;
        for ( auto& c : clauses_ )
            if ( std::any_of( c.lits.begin(), c.lits.end(), [ & ]( Lit l ) { return value( l ) == kTrue; } ) )
                c.deleted = true;

        std::erase_if( clauses_, []( const Clause& c ) { return c.deleted; } );
        num_learnts_ = static_cast< std::size_t >(
                std::count_if( clauses_.begin(), clauses_.end(), []( const Clause& c ) { return c.learnt; } ) );
        for ( Lit l : trail_ )
            reason_[ var_of( l ) ] = kNoReason;
        for ( auto& w : watches_ )
            w.clear();
        for ( CRef cr = 0; cr < clauses_.size(); ++cr )
        {
            const auto& lits = clauses_[ cr ].lits;
            watches_[ lits[ 0 ] ].push_back( { cr, lits[ 1 ] } );
            watches_[ lits[ 1 ] ].push_back( { cr, lits[ 0 ] } );
        }
    }

    // Binary max-heap on activity; ties broken by the smaller variable index.
    bool heap_less( std::uint32_t a, std::uint32_t b ) const
    {
        return activity_[ a ] != activity_[ b ] ? activity_[ a ] > activity_[ b ] : a < b;
    }

    void heap_insert( std::uint32_t v )
    {
        heap_index_[ v ] = static_cast< int >( heap_.size() );
        heap_.push_back( v );
        sift_up( heap_.size() - 1 );
    }

    std::uint32_t heap_pop()
    {
        auto top = heap_.front();
        heap_index_[ top ] = -1;
        heap_.front() = heap_.back();
        heap_.pop_back();
        if ( !heap_.empty() )
        {
            heap_index_[ heap_.front() ] = 0;
            sift_down( 0 );
        }
        return top;
    }

    void sift_up( std::size_t i )
    {
        auto v = heap_[ i ];
        while ( i > 0 )
        {
            std::size_t parent = ( i - 1 ) / 2;
            if ( !heap_less( v, heap_[ parent ] ) )
                break;
            heap_[ i ] = heap_[ parent ];
            heap_index_[ heap_[ i ] ] = static_cast< int >( i );
            i = parent;
        }
        heap_[ i ] = v;
        heap_index_[ v ] = static_cast< int >( i );
    }

    void sift_down( std::size_t i )
    {
        auto v = heap_[ i ];
        for ( ;; )
        {
            std::size_t child = 2 * i + 1;
            if ( child >= heap_.size() )
                break;
            if ( child + 1 < heap_.size() && heap_less( heap_[ child + 1 ], heap_[ child ] ) )
                ++child;
            if ( !heap_less( heap_[ child ], v ) )
                break;
            heap_[ i ] = heap_[ child ];
            heap_index_[ heap_[ i ] ] = static_cast< int >( i );
            i = child;
        }
        heap_[ i ] = v;
        heap_index_[ v ] = static_cast< int >( i );
    }

    std::uint32_t n_;
    SolverOptions opts_;
    std::mt19937_64 rng_;
    bool unsat_ = false;

    std::vector< Clause > clauses_;
    std::vector< std::vector< Watcher > > watches_;
    std::size_t num_learnts_ = 0;

    std::vector< std::int8_t > value_;
    std::vector< int > level_;
    std::vector< CRef > reason_;
    std::vector< std::int8_t > phase_;
    std::vector< Lit > trail_;
    std::vector< std::size_t > trail_lim_;
    std::size_t qhead_ = 0;

    std::vector< double > activity_;
    double var_inc_ = 1;
    double clause_inc_ = 1;
    std::vector< char > seen_;
    std::vector< std::uint32_t > heap_;
    std::vector< int > heap_index_;
};

void check_literals( const CnfFormula& c )
{
    if ( c.num_vars < 0 )
        throw InvalidInput( "negative variable count" );
    for ( const auto& clause : c.clauses )
        for ( int l : clause )
            if ( l == 0 || std::abs( l ) > c.num_vars )
                throw InvalidInput( "literal " + std::to_string( l ) + " out of range" );
}

} // namespace

SolveResult solve( const CnfFormula& c, const SolverOptions& opts )
{
    check_literals( c );
    Cdcl solver( c, opts );
    SolveResult r;
    r.status = solver.run();
    r.stats = solver.stats;
    if ( r.status == SatStatus::Sat )
    {
        r.model = solver.model();
        if ( !satisfies( c, r.model ) )
            throw InternalError( "embedded solver produced a non-model" );
    }
    return r;
}

SolveResult solve_external( const CnfFormula& c, const std::string& command )
{
    check_literals( c );
    auto path = std::filesystem::temp_directory_path() / "mrepair-XXXXXX.cnf";
    std::string templ = path.string();
    int fd = mkstemps( templ.data(), 4 );
    if ( fd < 0 )
        throw Error( "cannot create temporary DIMACS file" );
    close( fd );
    struct Remove
    {
        std::string p;
        ~Remove() { std::filesystem::remove( p ); }
    } cleanup{ templ };
    detail::write_file( templ, to_dimacs( c ) );

    std::string cmd = command + " '" + templ + "'";
    FILE* pipe = popen( cmd.c_str(), "r" );
    if ( !pipe )
        throw Error( "cannot launch external solver: " + command );
    std::string output;
    char buf[ 4096 ];
    std::size_t got;
    while ( ( got = fread( buf, 1, sizeof buf, pipe ) ) > 0 )
        output.append( buf, got );
    int status = pclose( pipe );
    int code = WIFEXITED( status ) ? WEXITSTATUS( status ) : -1;
    if ( code != 0 && code != 10 && code != 20 )
        throw Error( "external solver exited with status " + std::to_string( code ) + ": " + command );

    DimacsResult parsed;
    try
    {
        parsed = from_dimacs_result( output, c.num_vars );
    }
    catch ( const ParseError& e )
    {
        throw Error( std::string( "unparseable external solver output: " ) + e.what() );
    }
    SolveResult r;
    r.status = parsed.status;
    if ( r.status == SatStatus::Sat )
    {
        r.model = std::move( parsed.model );
        if ( !satisfies( c, r.model ) )
            throw InternalError( "external solver returned an assignment that violates the formula" );
    }
    return r;
}

Enumeration enumerate_projected( const CnfFormula& c, const std::set< int >& vars, std::size_t limit,
                                 const SolverOptions& opts )
{
    if ( limit == 0 )
        throw InvalidInput( "enumeration limit must be at least 1" );
    for ( int v : vars )
        if ( v < 1 || v > c.num_vars )
            throw InvalidInput( "projection variable " + std::to_string( v ) + " out of range" );
    CnfFormula work = c;
    Enumeration out;
    for ( ;; )
    {
        auto r = solve( work, opts );
        if ( r.status == SatStatus::Unknown )
            throw ResourceLimit( "conflict budget exhausted during enumeration" );
        if ( r.status == SatStatus::Unsat )
            break;
        if ( out.projections.size() == limit )
        {
            out.truncated = true;
            break;
        }
        std::vector< bool > proj;
        std::vector< int > block;
        for ( int v : vars )
        {
            proj.push_back( r.model.value( v ) );
            block.push_back( r.model.value( v ) ? -v : v );
        }
        out.projections.push_back( std::move( proj ) );
        work.clauses.push_back( std::move( block ) );
    }
    return out;
}

} // namespace mrepair
