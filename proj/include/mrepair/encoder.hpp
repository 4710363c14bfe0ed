#pragma once

#include "mrepair/boolexpr.hpp"
#include "mrepair/formula.hpp"
#include "mrepair/kripke.hpp"

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace mrepair {

/// Which constraint group a top-level conjunct belongs to.
enum class Group : std::uint8_t
{
    Spec,          // X(s0, eta)
    Totality,      // every state keeps an outgoing edge
    Labeling,      // X(s,p) fixed by L(s)
    Consistency,   // ~, &, | in the closure
    Nexttime,      // AX/EX, <<A>>X
    Release,       // AV/EV, <<A>>V and their level chains
    Reachability,  // R^m(s), R(s)
    Desc,          // uncontrollable edges are kept
    StateDeletion, // N(s)
    Symmetry,
    Family,
    Custom,
};

std::string to_string( Group g );

struct Conjunct
{
    Group group;
    BoolExpr expr;
};

/// The repair formula for one instance: a list of grouped top-level conjuncts
/// together with the structure it was generated from.
class RepairFormula
{
public:
    RepairFormula( KripkeStructure m, std::vector< Conjunct > conjuncts );

    [[nodiscard]] const KripkeStructure& structure() const { return structure_; }
    [[nodiscard]] const std::vector< Conjunct >& conjuncts() const { return conjuncts_; }
    [[nodiscard]] bool has_node_vars() const { return has_node_vars_; }
    [[nodiscard]] bool has_reach_vars() const { return has_reach_vars_; }

    /// The whole formula as a single n-ary conjunction.
    [[nodiscard]] BoolExpr expr() const;
    [[nodiscard]] std::size_t size() const;

    /// One conjunct per line, `[group] expr`, in generation order.
    [[nodiscard]] std::string dump() const;

    // Used by the conjoin_* operations.
    void add( Group g, BoolExpr e ) { conjuncts_.push_back( { g, std::move( e ) } ); }
    void remove_group( Group g );
    void mark_node_vars() { has_node_vars_ = true; }
    void mark_reach_vars() { has_reach_vars_ = true; }

private:
    KripkeStructure structure_;
    std::vector< Conjunct > conjuncts_;
    bool has_node_vars_ = false;
    bool has_reach_vars_ = false;
};

/// Repair formula of a CTL instance. `eta` must be in core form and `m` valid
/// and total; satisfiable iff a total substructure satisfying eta exists.
RepairFormula encode_ctl_repair( const KripkeStructure& m, const Formula& eta );

/// Repair formula of an ATL instance on a turn-based game. Coalition modalities
/// combine successors existentially at states owned by a coalition member and
/// universally elsewhere.
RepairFormula encode_atl_repair( const GameStructure& g, const Formula& eta );

/// Exact level-indexed encoding of reachability under the Edge propositions:
/// R^0(s) <-> (s = s0), R^m(s) <-> R^{m-1}(s) | OR_{t->s} (R^{m-1}(t) & E(t,s)),
/// R(s) <-> R^n(s).
BoolExpr encode_reachability( const KripkeStructure& m );
RepairFormula conjoin_reachability( RepairFormula e );

/// Keeps every uncontrollable transition. Throws InvalidInput for pairs not in R.
RepairFormula conjoin_desc( RepairFormula e, const std::set< Edge >& uncontrollable );

/// Introduces N(s): kept states need an outgoing edge, dropped states have no
/// edges at all, and the initial state is kept. Replaces the totality group.
RepairFormula conjoin_state_deletion( RepairFormula e );

/// N(s) <-> N(s') for each state pair and E(s,t) <-> E(s',t') for each edge pair.
RepairFormula conjoin_symmetry( RepairFormula e, const std::set< std::pair< StateId, StateId > >& state_pairs,
                                const std::set< std::pair< Edge, Edge > >& edge_pairs );

/// For each family F:
///   (AND_{(s,t) in F} (~E(s,t) -> ~R(s))) | (AND_{(s,t) in F} ~E(s,t)).
/// Requires conjoin_reachability() first.
RepairFormula conjoin_family_constraints( RepairFormula e, const std::vector< std::set< Edge > >& families );

/// Conjoins an arbitrary constraint over Edge/Node propositions.
RepairFormula conjoin_custom( RepairFormula e, const BoolExpr& c );

} // namespace mrepair
