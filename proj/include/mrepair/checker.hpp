#pragma once

#include "mrepair/formula.hpp"
#include "mrepair/kripke.hpp"

#include <map>
#include <string>
#include <vector>

namespace mrepair {

/// Truth value of every closure formula at every state.
class LabelMap
{
public:
    LabelMap() = default;
    LabelMap( std::vector< StateId > states, std::vector< Formula > formulas );

    [[nodiscard]] bool holds( const StateId& s, const Formula& f ) const;
    [[nodiscard]] bool holds( std::size_t state, std::size_t formula ) const { return truth_[ formula ][ state ]; }
    void set( std::size_t state, std::size_t formula, bool v ) { truth_[ formula ][ state ] = v; }

    [[nodiscard]] const std::vector< StateId >& states() const { return states_; }
    [[nodiscard]] const std::vector< Formula >& formulas() const { return formulas_; }
    [[nodiscard]] std::size_t formula_index( const Formula& f ) const;

    /// Deterministic text table: one row per closure formula, one column per state.
    [[nodiscard]] std::string to_table() const;

private:
    std::vector< StateId > states_;
    std::vector< Formula > formulas_;
    std::map< std::string, std::size_t > index_;
    std::vector< std::vector< bool > > truth_; // [formula][state]
};

struct CheckResult
{
    bool holds = false; // at the initial state
    LabelMap labels;
};

/// Explicit-state CTL model checking. The formula is desugared first; release
/// operators are evaluated as greatest fixpoints.
/// Throws InvalidInput if `m` is invalid or not total, or `eta` mentions a
/// proposition outside m.ap.
CheckResult check_ctl( const KripkeStructure& m, const Formula& eta );

/// Explicit-state ATL model checking on a turn-based synchronous game.
CheckResult check_atl( const GameStructure& g, const Formula& eta );

} // namespace mrepair
