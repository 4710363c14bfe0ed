#pragma once

#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mrepair {

/// Formula constructors. The CTL core is {True, False, Prop, Not, And, Or, AX,
/// EX, AV, EV}; the ATL core is {True, False, Prop, Not, And, Or, CoalX,
/// CoalV}. Everything else is sugar removed by desugar()/atl_desugar().
enum class Op
{
    True,
    False,
    Prop,
    Not,
    And,
    Or,
    Implies,
    AX,
    EX,
    AF,
    EF,
    AG,
    EG,
    AU,
    EU,
    AV,
    EV,
    CoalX,
    CoalF,
    CoalG,
    CoalU,
    CoalV,
};

/// Immutable formula tree. Two formulas are equal iff they print identically;
/// the printed form doubles as the structural hash key.
class Formula
{
public:
    using Coalition = std::set< std::string >;

    Formula(); // true

    [[nodiscard]] Op op() const { return node_->op; }
    [[nodiscard]] const std::string& name() const { return node_->name; }
    [[nodiscard]] const Formula& lhs() const { return node_->children.at( 0 ); }
    [[nodiscard]] const Formula& rhs() const { return node_->children.at( 1 ); }
    [[nodiscard]] const std::vector< Formula >& children() const { return node_->children; }
    [[nodiscard]] const Coalition& coalition() const { return node_->coalition; }

    /// Canonical printed form; parses back to an equal formula.
    [[nodiscard]] const std::string& key() const { return node_->key; }
    [[nodiscard]] std::size_t size() const { return node_->size; }
    [[nodiscard]] std::size_t depth() const { return node_->depth; }

    bool operator==( const Formula& o ) const { return node_ == o.node_ || key() == o.key(); }
    bool operator<( const Formula& o ) const { return key() < o.key(); }

    static Formula make( Op op, std::vector< Formula > children, std::string name = {}, Coalition coalition = {} );

private:
    struct Node
    {
        Op op;
        std::string name;
        Coalition coalition;
        std::vector< Formula > children;
        std::string key;
        std::size_t size;
        std::size_t depth;
    };

    explicit Formula( std::shared_ptr< const Node > n ) : node_{ std::move( n ) } {}

    std::shared_ptr< const Node > node_;
};

/// Short-hand constructors.
namespace fml {

Formula tt();
Formula ff();
Formula prop( std::string name );
Formula neg( Formula f );
Formula conj( Formula a, Formula b );
Formula disj( Formula a, Formula b );
Formula implies( Formula a, Formula b );
Formula AX( Formula f );
Formula EX( Formula f );
Formula AF( Formula f );
Formula EF( Formula f );
Formula AG( Formula f );
Formula EG( Formula f );
Formula AU( Formula a, Formula b );
Formula EU( Formula a, Formula b );
Formula AV( Formula a, Formula b );
Formula EV( Formula a, Formula b );
Formula coal_x( Formula::Coalition a, Formula f );
Formula coal_f( Formula::Coalition a, Formula f );
Formula coal_g( Formula::Coalition a, Formula f );
Formula coal_u( Formula::Coalition a, Formula f, Formula g );
Formula coal_v( Formula::Coalition a, Formula f, Formula g );

} // namespace fml

/// Concrete syntax:
///   atoms, `true`, `false`, `~f`, `f & g`, `f | g`, `f -> g` (right assoc),
///   `AX EX AF EF AG EG f`, `A[f U g]`, `A[f V g]`, `E[f U g]`, `E[f V g]`,
///   `<<a,b>>X f`, `<<a>>F f`, `<<a>>G f`, `<<a>>[f U g]`, `<<a>>[f V g]`.
/// Precedence, tightest first: prefix operators, &, |, ->.
Formula parse_ctl( std::string_view text );
Formula parse_atl( std::string_view text );
std::string print( const Formula& f );

bool is_ctl_core( const Formula& f );
bool is_atl_core( const Formula& f );
bool is_ctl( const Formula& f ); // core or sugar, no coalition operators
bool is_atl( const Formula& f ); // core or sugar, no path quantifiers

/// Rewrites CTL sugar into the core constructors.
Formula desugar( const Formula& f );

/// Rewrites ATL sugar into the core constructors. Until is dualised against
/// the complement coalition `players - A`, so the player set is needed.
Formula atl_desugar( const Formula& f, const std::set< std::string >& players );

/// Sub-formula closure of a core formula, children before parents
/// (ordered by size, then by printed form). Each release formula contributes
/// its three one-step expansion formulas as well.
std::vector< Formula > sub( const Formula& f );
std::vector< Formula > atl_sub( const Formula& f );

/// Atomic propositions mentioned in `f` (excluding true/false).
std::set< std::string > propositions( const Formula& f );

} // namespace mrepair
