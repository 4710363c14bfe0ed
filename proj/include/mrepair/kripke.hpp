#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mrepair {

/// Name of a state. Equality is exact string equality, ordering is lexicographic.
struct StateId
{
    std::string name;

    StateId() = default;
    explicit StateId( std::string n ) : name{ std::move( n ) } {}

    auto operator<=>( const StateId& ) const = default;
};

using Edge = std::pair< StateId, StateId >;

/// A finite Kripke structure (s0, S, R, L) over the proposition set `ap`.
///
/// This is a plain value: it may hold data that violates the structural
/// invariants. Use validate() before handing it to anything that assumes them.
struct KripkeStructure
{
    StateId initial;
    std::set< StateId > states;
    std::set< Edge > transitions;
    std::map< StateId, std::set< std::string > > labels;
    std::set< std::string > ap;

    bool operator==( const KripkeStructure& ) const = default;
};

/// Turn-based synchronous game structure: a Kripke structure plus a turn function.
struct GameStructure
{
    KripkeStructure base;
    std::set< std::string > players;
    std::map< StateId, std::string > turn;

    bool operator==( const GameStructure& ) const = default;
};

struct Violation
{
    std::string kind;    // e.g. "dangling-edge"
    std::string element; // the offending state, edge or proposition

    [[nodiscard]] std::string to_string() const { return kind + ": " + element; }
    bool operator==( const Violation& ) const = default;
};

std::vector< Violation > validate( const KripkeStructure& m );
std::vector< Violation > validate( const GameStructure& g );

bool is_total( const KripkeStructure& m );

/// True iff `sub` is obtained from `super` by deleting transitions and states:
/// same initial state, states(sub) ⊆ states(super), transitions(sub) ⊆
/// transitions(super) restricted to states(sub), labels agree on states(sub).
bool is_substructure( const KripkeStructure& sub, const KripkeStructure& super );

/// Least set containing the initial state and closed under `edges`.
std::set< StateId > reachable( const KripkeStructure& m, const std::set< Edge >& edges );

/// The substructure induced by keeping `kept` edges: states reachable from the
/// initial state, their outgoing kept edges, restricted labels, same ap.
KripkeStructure restrict_to( const KripkeStructure& m, const std::set< Edge >& kept );

std::string edge_to_string( const Edge& e );

// ---------------------------------------------------------------------------
// Text format
//
//   ap p q r                      (optional; defaults to the union of labels)
//   players 1 2                   (games only)
//   state <name> [init] : p q
//   edge <from> <to>
//   turn <state> <player>         (games only)
//   # comment
// ---------------------------------------------------------------------------

KripkeStructure parse_structure( std::string_view text );
GameStructure parse_game( std::string_view text );
std::string print_structure( const KripkeStructure& m );
std::string print_game( const GameStructure& g );

/// Parse and validate; throws InvalidInput listing every violation.
KripkeStructure load_structure( std::string_view text );
GameStructure load_game( std::string_view text );

/// Dense, index-based view of a valid structure for the algorithms.
/// States are numbered in lexicographic order of their names.
class StateGraph
{
public:
    explicit StateGraph( const KripkeStructure& m );

    [[nodiscard]] std::size_t size() const { return names_.size(); }
    [[nodiscard]] int initial() const { return initial_; }
    [[nodiscard]] int index( const StateId& s ) const;
    [[nodiscard]] const StateId& name( int i ) const { return names_[ static_cast< std::size_t >( i ) ]; }

    [[nodiscard]] std::span< const int > successors( int i ) const { return succ_[ static_cast< std::size_t >( i ) ]; }
    [[nodiscard]] std::span< const int > predecessors( int i ) const { return pred_[ static_cast< std::size_t >( i ) ]; }
    [[nodiscard]] std::size_t max_out_degree() const;

    [[nodiscard]] bool has_label( int i, const std::string& p ) const;
    [[nodiscard]] const std::set< std::string >& label( int i ) const { return labels_[ static_cast< std::size_t >( i ) ]; }

private:
    std::vector< StateId > names_;
    std::map< StateId, int > index_;
    std::vector< std::vector< int > > succ_;
    std::vector< std::vector< int > > pred_;
    std::vector< std::set< std::string > > labels_;
    int initial_ = 0;
};

} // namespace mrepair
