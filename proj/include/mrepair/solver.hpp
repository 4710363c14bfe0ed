#pragma once

#include "mrepair/cnf.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace mrepair {

struct SolverOptions
{
    std::uint64_t seed = 1;
    /// Stop with SatStatus::Unknown after this many conflicts; negative means unlimited.
    std::int64_t conflict_budget = -1;
    /// Probability of a uniformly random branching variable.
    double random_branch_freq = 0.01;
};

struct SolverStats
{
    std::int64_t conflicts = 0;
    std::int64_t decisions = 0;
    std::int64_t propagations = 0;
    std::int64_t restarts = 0;
    std::int64_t learnt_clauses = 0;
};

struct SolveResult
{
    SatStatus status = SatStatus::Unknown;
    Assignment model; // total; meaningful when status == Sat
    SolverStats stats;
};

/// Embedded CDCL solver: two watched literals, first-UIP learning with clause
/// minimization, VSIDS branching with phase saving, geometric restarts and
/// activity-based learnt-clause deletion. Deterministic for a fixed seed.
/// Models are checked against `c` before they are returned.
SolveResult solve( const CnfFormula& c, const SolverOptions& opts = {} );

/// Runs `command <dimacs-file>` through the shell and parses its `s`/`v` output.
/// Exit codes 10 and 20 are accepted alongside 0. Throws Error when the process
/// fails or prints no result, and InternalError when a claimed model does not
/// satisfy `c`.
SolveResult solve_external( const CnfFormula& c, const std::string& command );

struct Enumeration
{
    /// Projections onto the requested variables, each aligned with `vars` in ascending order.
    std::vector< std::vector< bool > > projections;
    /// True when more than `limit` distinct projections exist.
    bool truncated = false;
};

/// Distinct projections of the models of `c` onto `vars`, found with blocking
/// clauses. Throws ResourceLimit if a call runs out of budget.
Enumeration enumerate_projected( const CnfFormula& c, const std::set< int >& vars, std::size_t limit,
                                 const SolverOptions& opts = {} );

} // namespace mrepair
