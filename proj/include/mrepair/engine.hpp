#pragma once

#include "mrepair/cnf.hpp"
#include "mrepair/encoder.hpp"
#include "mrepair/formula.hpp"
#include "mrepair/kripke.hpp"
#include "mrepair/solver.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mrepair {

struct SolverConfig
{
    /// Shell command of a DIMACS solver; the embedded solver is used when empty.
    std::optional< std::string > external_command;
    SolverOptions options;
};

struct RepairOptions
{
    std::set< Edge > uncontrollable;
    std::set< std::pair< StateId, StateId > > symmetric_states;
    std::set< std::pair< Edge, Edge > > symmetric_edges;
    std::optional< BoolExpr > constraint;
    bool allow_state_deletion = false;
    std::vector< std::set< Edge > > families;
    SolverConfig solver;
    /// Run the encoder even when the input already satisfies eta.
    bool always_encode = false;

    /// True when any option adds conjuncts to the repair formula.
    [[nodiscard]] bool constrains() const;
};

enum class RepairStatus
{
    Unchanged,
    Repaired,
    Failure,
};

std::string to_string( RepairStatus s );

struct EncodingStats
{
    int propositions = 0;    // CNF variables, auxiliaries included
    int original_vars = 0;   // typed propositions of the repair formula
    std::size_t clauses = 0;
    std::size_t conjuncts = 0;
    std::size_t circuit_size = 0;
    double encode_seconds = 0;
    double solve_seconds = 0;
    SolverStats solver;
};

struct RepairResult
{
    RepairStatus status = RepairStatus::Failure;
    /// The input for Unchanged, the repaired structure for Repaired.
    KripkeStructure model;
    /// Turn function restricted to the kept states (repair_atl only).
    std::optional< GameStructure > game;
    /// Transitions whose Edge proposition is false.
    std::set< Edge > deleted_edges;
    /// States of the input absent from the repaired structure.
    std::set< StateId > deleted_states;
    Assignment assignment;
    /// Values of the typed propositions under the solver's model.
    std::map< PropVar, bool > valuation;
    /// Empty when the encoder was not run.
    std::optional< EncodingStats > stats;
};

/// The repair formula with every option conjoined, and its CNF.
struct PreparedRepair
{
    RepairFormula formula;
    TseitinResult cnf;
    double encode_seconds = 0;
};

PreparedRepair prepare_ctl( const KripkeStructure& m, const Formula& eta, const RepairOptions& opts );
PreparedRepair prepare_atl( const GameStructure& g, const Formula& eta, const RepairOptions& opts );

/// Model check, then encode, solve and decode. Every Repaired result is
/// re-verified (totality, substructure, eta, DESC, families, custom
/// constraints) and a failed check raises InternalError. Throws ResourceLimit
/// when the solver gives up.
RepairResult repair_ctl( const KripkeStructure& m, const Formula& eta, const RepairOptions& opts = {} );
RepairResult repair_atl( const GameStructure& g, const Formula& eta, const RepairOptions& opts = {} );

/// Adds states (with their labels) and transitions to `m`, then repairs the
/// enlarged structure.
RepairResult additive_repair( const KripkeStructure& m, const std::map< StateId, std::set< std::string > >& added_states,
                              const std::set< Edge >& added_edges, const Formula& eta, const RepairOptions& opts = {} );

/// Kept-edge sets (projections onto the Edge propositions) of the prepared
/// repair formula, at most `limit` of them.
struct EdgeSolutions
{
    std::set< std::set< Edge > > kept;
    bool truncated = false;
};
EdgeSolutions enumerate_edge_solutions( const PreparedRepair& p, std::size_t limit, const SolverOptions& opts = {} );

/// Exhaustive search over edge subsets, for |R| <= 20. `admissible` filters
/// candidate kept-edge sets before they are checked.
using EdgeFilter = std::function< bool( const std::set< Edge >& kept ) >;
RepairResult brute_force_repair( const KripkeStructure& m, const Formula& eta, const EdgeFilter& admissible = {} );
RepairResult brute_force_repair_atl( const GameStructure& g, const Formula& eta, const EdgeFilter& admissible = {} );

/// Structure/formula pair that is repairable iff the 3SAT instance over
/// x1..num_vars is satisfiable. Clauses hold 1 to 3 nonzero literals.
struct Reduction
{
    KripkeStructure structure;
    Formula formula;
};
Reduction reduce_3sat( int num_vars, const std::vector< std::vector< int > >& clauses );

/// n states named s0.., each ordered pair an edge with probability p, each
/// proposition in each label with probability 1/2; edgeless states then get
/// one random successor. The first state is initial.
KripkeStructure random_model( int n, double p, const std::set< std::string >& ap, std::uint64_t seed );

} // namespace mrepair
