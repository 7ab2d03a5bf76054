#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fm/core.hpp"

namespace fm {

/// Compilation semantics.
///   Strict: tree formulas plus child=>parent for every edge and pairwise
///     at-most-one for alternative groups; the usual feature-model reading,
///     and the default everywhere.
///   PaperLiteral: the bare per-row formulas only; under it an unselected
///     alternative parent tolerates several selected children.
enum class SemanticsMode { Strict, PaperLiteral };

const char* semantics_mode_name(SemanticsMode m);

/// Provenance of a formula conjunct or a CNF clause: a relation, a
/// cross-tree constraint, or structural glue (root assertion, Tseitin
/// definitions of untagged subtrees).
struct Origin {
    enum class Kind { Structural, Relation, Constraint };
    Kind kind = Kind::Structural;
    int id = -1;

    bool operator==(const Origin&) const = default;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Immutable propositional AST node.
struct Formula {
    enum class Kind { Var, Not, And, Or, Implies, Iff, ExactlyOne };
    Kind kind;
    std::string var;              // Kind::Var only
    std::vector<FormulaPtr> args; // Not: 1; Implies/Iff: 2; And/Or: >=1; ExactlyOne: >=2
    Origin origin;                // provenance tag, set by compile_model
};

FormulaPtr f_var(std::string name);
FormulaPtr f_not(FormulaPtr f);
FormulaPtr f_and(std::vector<FormulaPtr> args);
FormulaPtr f_or(std::vector<FormulaPtr> args);
FormulaPtr f_implies(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr f_iff(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr f_exactly_one(std::vector<FormulaPtr> args);

/// Copy of `f` carrying the given provenance tag.
FormulaPtr with_origin(const FormulaPtr& f, Origin origin);

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b);

/// Renders with `!`, `&`, `|`, `->`, `<->` and `exactly_one(...)`.
std::string render(const FormulaPtr& f);

/// Distinct variable names in AST preorder of first occurrence.
std::vector<std::string> formula_variables(const FormulaPtr& f);

/// One relation row:
///   Mandatory            parent <-> child
///   Optional             child -> parent
///   Or                   parent <-> (c1 | ... | cn)
///   Alternative          parent <-> exactly_one(c1, ..., cn)
///   OptionalOr           (c1 | ... | cn) -> parent
///   OptionalAlternative  exactly_one(c1, ..., cn) -> parent
/// Strict mode conjoins child->parent per child, and pairwise !(ci & cj)
/// for (optional) alternatives.
FormulaPtr compile_relation(const Relation& r, SemanticsMode mode);

/// Requires(a, b) -> (a -> b); Excludes(a, b) -> !(a & b).
FormulaPtr compile_constraint(const CrossTreeConstraint& c);

/// And(root, relations..., constraints...) in declaration order, each
/// conjunct tagged with its origin.
FormulaPtr compile_model(const FeatureModel& m, SemanticsMode mode);

/// Standard propositional evaluation; ExactlyOne is true iff exactly one
/// member is true. Throws UndecidedVariable unless the configuration is
/// total over the formula's variables.
bool evaluate(const FormulaPtr& f, const Configuration& config);

/// CNF with clause provenance. Variables are names; literals are
/// 1-based signed indices into `variables`.
struct Cnf {
    std::vector<std::string> variables;  // base variables first, auxiliaries after
    int base_var_count = 0;              // prefix that is non-auxiliary
    std::vector<std::vector<int>> clauses;
    std::vector<Origin> clause_origin;   // parallel to clauses

    int index_of(const std::string& name) const;
};

/// Definitional (Tseitin-style) transformation. Auxiliary variables are
/// numbered in AST preorder; the only rewrites short of a definition are
/// double negation and negation of a literal conjunction. When `var_order`
/// is given it fixes the base variable numbering (the formula's variables
/// must all appear in it); otherwise first occurrence in preorder decides.
Cnf to_cnf(const FormulaPtr& f, const std::vector<std::string>* var_order = nullptr);

/// DIMACS text: `c <index> <name>` comment per base variable, then the
/// `p cnf V C` header and clauses.
std::string dimacs_export(const Cnf& cnf);

}  // namespace fm
