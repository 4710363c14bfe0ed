#pragma once

#include "mrepair/boolexpr.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mrepair {

/// Clauses over variables 1..num_vars; a literal is a nonzero signed integer.
struct CnfFormula
{
    int num_vars = 0;
    std::vector< std::vector< int > > clauses;

    bool operator==( const CnfFormula& ) const = default;
};

/// Total truth assignment over variables 1..num_vars.
class Assignment
{
public:
    Assignment() = default;
    explicit Assignment( int num_vars ) : values_( static_cast< std::size_t >( num_vars ), false ) {}

    [[nodiscard]] int num_vars() const { return static_cast< int >( values_.size() ); }
    [[nodiscard]] bool value( int var ) const { return values_.at( static_cast< std::size_t >( var - 1 ) ); }
    [[nodiscard]] bool satisfies( int lit ) const { return lit > 0 ? value( lit ) : !value( -lit ); }
    void set( int var, bool v ) { values_.at( static_cast< std::size_t >( var - 1 ) ) = v; }

    bool operator==( const Assignment& ) const = default;

private:
    std::vector< bool > values_;
};

enum class SatStatus
{
    Sat,
    Unsat,
    Unknown, // resource limit
};

std::string to_string( SatStatus s );

bool satisfies( const CnfFormula& c, const Assignment& a );

/// Numbering of the circuit's variables. The PropVars of the input circuit take
/// 1..num_original() in order of first appearance; auxiliary gate variables follow.
class VarMap
{
public:
    [[nodiscard]] int num_original() const { return static_cast< int >( originals_.size() ); }
    [[nodiscard]] int num_aux() const { return static_cast< int >( aux_.size() ); }

    /// 0 when the PropVar does not occur in the circuit.
    [[nodiscard]] int index( const PropVar& v ) const;
    [[nodiscard]] const PropVar& prop( int var ) const { return originals_.at( static_cast< std::size_t >( var - 1 ) ); }
    [[nodiscard]] bool is_original( int var ) const { return var >= 1 && var <= num_original(); }
    /// Defining gate of an auxiliary variable, e.g. "and(1,-3)".
    [[nodiscard]] const std::string& definition( int var ) const;

    [[nodiscard]] const std::vector< PropVar >& originals() const { return originals_; }

    int add_original( const PropVar& v );
    int add_aux( std::string definition );

private:
    std::vector< PropVar > originals_;
    std::map< PropVar, int > index_;
    std::vector< std::string > aux_;
};

struct TseitinResult
{
    CnfFormula cnf;
    VarMap vars;
};

/// Equisatisfiable CNF with full biconditional clauses for every gate.
/// Structurally equal gates share one auxiliary variable, constants are
/// propagated, top-level conjunctions are split into separate assertions, and
/// a top-level `v <-> gate` uses v itself as the gate output.
TseitinResult tseitin( const BoolExpr& e );

/// `p cnf V C` followed by zero-terminated clauses.
std::string to_dimacs( const CnfFormula& c );
/// Same, preceded by `c var <int> <propvar>` comment lines for the original variables.
std::string to_dimacs( const CnfFormula& c, const VarMap& vars );

/// Parses a DIMACS cnf file. Throws ParseError.
CnfFormula parse_dimacs( std::string_view text );

struct DimacsResult
{
    SatStatus status = SatStatus::Unknown;
    Assignment model; // meaningful when status == Sat
};

/// Parses solver output (`s SATISFIABLE` / `s UNSATISFIABLE` / `s UNKNOWN` and
/// `v` lines). Unmentioned variables default to false. Throws ParseError.
DimacsResult from_dimacs_result( std::string_view text, int num_vars );

/// Inverse of from_dimacs_result.
std::string to_dimacs_result( SatStatus status, const Assignment& model );

} // namespace mrepair
