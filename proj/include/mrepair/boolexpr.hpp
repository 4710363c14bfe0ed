#pragma once

#include "mrepair/formula.hpp"
#include "mrepair/kripke.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mrepair {

/// A typed proposition of the repair formula.
///
///   Edge(s,t)        transition (s,t) is kept
///   Sat(s,f)         f holds at s in the repaired structure
///   SatLvl(s,f,m)    level-m approximation of release formula f at s
///   Node(s)          state s is kept
///   ReachLvl(s,m)    s is reachable from the initial state in at most m steps
///   Reach(s)         s is reachable from the initial state
struct PropVar
{
    enum class Kind : std::uint8_t
    {
        Edge,
        Sat,
        SatLvl,
        Node,
        ReachLvl,
        Reach,
    };

    Kind kind = Kind::Edge;
    StateId s;
    StateId t;           // Edge only
    std::string formula; // Sat / SatLvl: printed form of the formula
    int level = 0;       // SatLvl / ReachLvl

    static PropVar edge( StateId from, StateId to ) { return { Kind::Edge, std::move( from ), std::move( to ), {}, 0 }; }
    static PropVar edge( const Edge& e ) { return edge( e.first, e.second ); }
    static PropVar sat( StateId s, const Formula& f ) { return { Kind::Sat, std::move( s ), {}, f.key(), 0 }; }
    static PropVar sat_level( StateId s, const Formula& f, int m ) { return { Kind::SatLvl, std::move( s ), {}, f.key(), m }; }
    static PropVar node( StateId s ) { return { Kind::Node, std::move( s ), {}, {}, 0 }; }
    static PropVar reach_level( StateId s, int m ) { return { Kind::ReachLvl, std::move( s ), {}, {}, m }; }
    static PropVar reach( StateId s ) { return { Kind::Reach, std::move( s ), {}, {}, 0 }; }

    auto operator<=>( const PropVar& ) const = default;

    /// E(s,t), X(s,f), X^m(s,f), N(s), R^m(s), R(s)
    [[nodiscard]] std::string to_string() const;
};

/// Immutable boolean circuit over PropVar leaves. Sharing a BoolExpr value in
/// several places shares the node, so the encoder's output is a DAG.
class BoolExpr
{
public:
    enum class Kind : std::uint8_t
    {
        Const,
        Var,
        Not,
        And,
        Or,
        Implies,
        Iff,
    };

    BoolExpr(); // constant true

    static BoolExpr constant( bool v );
    static BoolExpr var( PropVar v );

    [[nodiscard]] Kind kind() const { return node_->kind; }
    [[nodiscard]] bool value() const { return node_->value; }
    [[nodiscard]] const PropVar& var() const { return node_->var; }
    [[nodiscard]] const std::vector< BoolExpr >& children() const { return node_->children; }
    [[nodiscard]] const void* id() const { return node_.get(); }

    [[nodiscard]] bool evaluate( const std::function< bool( const PropVar& ) >& valuation ) const;
    [[nodiscard]] std::string to_string() const;

    friend BoolExpr b_not( BoolExpr a );
    friend BoolExpr b_and( std::vector< BoolExpr > xs );
    friend BoolExpr b_or( std::vector< BoolExpr > xs );
    friend BoolExpr b_implies( BoolExpr a, BoolExpr b );
    friend BoolExpr b_iff( BoolExpr a, BoolExpr b );

private:
    struct Node
    {
        Kind kind = Kind::Const;
        bool value = true;
        PropVar var;
        std::vector< BoolExpr > children;
    };

    explicit BoolExpr( std::shared_ptr< const Node > n ) : node_{ std::move( n ) } {}
    static BoolExpr gate( Kind k, std::vector< BoolExpr > children );

    std::shared_ptr< const Node > node_;
};

BoolExpr b_not( BoolExpr a );
/// n-ary conjunction; the empty conjunction is true and a singleton is its element.
BoolExpr b_and( std::vector< BoolExpr > xs );
/// n-ary disjunction; the empty disjunction is false and a singleton is its element.
BoolExpr b_or( std::vector< BoolExpr > xs );
BoolExpr b_implies( BoolExpr a, BoolExpr b );
BoolExpr b_iff( BoolExpr a, BoolExpr b );

/// Number of distinct nodes in the DAG.
std::size_t circuit_size( const BoolExpr& e );
std::size_t circuit_size( const std::vector< BoolExpr >& roots );

/// PropVars in order of first appearance (depth-first, left to right).
std::vector< PropVar > variables( const BoolExpr& e );

/// Parses a constraint over Edge/Node propositions:
///   E(s,t)  N(s)  true  false  ~ & | -> <->  ( )
BoolExpr parse_constraint( std::string_view text );

} // namespace mrepair
