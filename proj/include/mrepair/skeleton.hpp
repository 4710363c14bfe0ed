#pragma once

#include "mrepair/engine.hpp"
#include "mrepair/formula.hpp"
#include "mrepair/kripke.hpp"

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mrepair {

/// One conjunct of a guard: `true`, a proposition of another process, or `x=c`.
struct GuardTerm
{
    enum class Kind
    {
        Prop,
        VarEq,
    };
    Kind kind = Kind::Prop;
    std::string name;  // proposition or shared variable
    std::string value; // VarEq only

    bool operator==( const GuardTerm& ) const = default;
};

struct Action
{
    enum class Kind
    {
        Skip,
        WriteLocal, // writes the process's location counter
        Assign,     // x := c
    };
    Kind kind = Kind::Skip;
    std::string var;
    std::string value;

    bool operator==( const Action& ) const = default;
};

struct Arc
{
    std::string id;
    std::string from;
    std::string to;
    std::vector< GuardTerm > guard; // empty means true
    Action action;

    bool operator==( const Arc& ) const = default;
};

struct LocalState
{
    std::string name;
    std::set< std::string > props;

    bool operator==( const LocalState& ) const = default;
};

struct Process
{
    std::string name;
    std::vector< LocalState > locals;
    std::string init;
    std::vector< Arc > arcs;
    /// Arcs deleted by a repair; emitted as comments only.
    std::vector< Arc > removed;

    [[nodiscard]] const LocalState* local( const std::string& n ) const;
    bool operator==( const Process& ) const = default;
};

struct SharedVar
{
    std::string name;
    std::vector< std::string > domain;
    std::string init;

    bool operator==( const SharedVar& ) const = default;
};

struct Program
{
    std::vector< SharedVar > shared;
    std::vector< Process > processes;

    bool operator==( const Program& ) const = default;
};

// ---------------------------------------------------------------------------
// Text format
//
//   shared x domain 0,1 init 0
//   process 1
//   local SA1 : SA1
//   init SA1
//   arc a1 SA1 EA1 guard true do L1
//   arc r1 EA1 EA1w guard EA2 do skip
//   arc w1 C D guard true do x:=1
//   arc g1 D E guard x=1 do skip
// ---------------------------------------------------------------------------

Program parse_program( std::string_view text );
std::string print_program( const Program& p );

struct ProgramViolation
{
    std::string arc; // empty for violations not tied to an arc
    std::string reason;

    [[nodiscard]] std::string to_string() const;
    bool operator==( const ProgramViolation& ) const = default;
};

/// Well-formedness plus the atomic read/write restriction: every arc is either
/// unguarded and single-writing, or single-reading (one simple term) and nonwriting.
std::vector< ProgramViolation > validate_arw( const Program& p );

struct Family
{
    std::string arc;
    std::set< Edge > transitions;
};

struct StgOptions
{
    std::size_t max_states = 200000;
    /// Round-robin turn-based scheduling: the process whose turn it is moves
    /// (or passes when it has no enabled arc), then the turn advances. Each
    /// global state also yields a GameStructure with processes as players.
    bool turn_based = false;
};

struct Stg
{
    KripkeStructure structure;
    std::optional< GameStructure > game;
    /// One family per arc with at least one enabled occurrence, in program order.
    std::vector< Family > families;
};

/// Explores the global states reachable from the initial tuple. Global state
/// names join local state names with '.', followed by `.x=v` per shared
/// variable; labels are the union of local labels plus one `x=v` proposition
/// per shared variable. Throws InvalidInput for invalid programs and
/// ResourceLimit when more than max_states states are reachable.
Stg build_global_stg( const Program& p, const StgOptions& opts = {} );

struct ProgramRepair
{
    RepairStatus status = RepairStatus::Failure;
    /// Repaired program (or the input when unchanged).
    Program program;
    Stg stg;
    /// Result of the structure repair; absent when unchanged.
    std::optional< RepairResult > result;
    /// Arcs whose whole family was deleted.
    std::vector< std::string > removed_arcs;
    /// Arcs whose family lost transitions only at unreachable states.
    std::vector< std::string > partially_deleted_arcs;
};

/// Repairs the program's global state graph under reachability and family
/// constraints and removes every arc whose family is entirely deleted. The
/// rebuilt graph of the emitted program is checked against eta (InternalError
/// on failure).
ProgramRepair repair_program( const Program& p, const Formula& eta, RepairOptions opts = {}, const StgOptions& stg = {} );

} // namespace mrepair
