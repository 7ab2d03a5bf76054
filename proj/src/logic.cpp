#include "fm/logic.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace fm {

const char* semantics_mode_name(SemanticsMode m) {
    return m == SemanticsMode::Strict ? "strict" : "paper-literal";
}

namespace {

FormulaPtr make(Formula::Kind kind, std::string var, std::vector<FormulaPtr> args) {
    auto f = std::make_shared<Formula>();
    f->kind = kind;
    f->var = std::move(var);
    f->args = std::move(args);
    return f;
}

}  // namespace

FormulaPtr f_var(std::string name) {
    return make(Formula::Kind::Var, std::move(name), {});
}

FormulaPtr f_not(FormulaPtr f) { return make(Formula::Kind::Not, {}, {std::move(f)}); }

FormulaPtr f_and(std::vector<FormulaPtr> args) {
    if (args.empty()) throw std::invalid_argument("And needs at least one member");
    return make(Formula::Kind::And, {}, std::move(args));
}

FormulaPtr f_or(std::vector<FormulaPtr> args) {
    if (args.empty()) throw std::invalid_argument("Or needs at least one member");
    return make(Formula::Kind::Or, {}, std::move(args));
}

FormulaPtr f_implies(FormulaPtr lhs, FormulaPtr rhs) {
    return make(Formula::Kind::Implies, {}, {std::move(lhs), std::move(rhs)});
}

FormulaPtr f_iff(FormulaPtr lhs, FormulaPtr rhs) {
    return make(Formula::Kind::Iff, {}, {std::move(lhs), std::move(rhs)});
}

FormulaPtr f_exactly_one(std::vector<FormulaPtr> args) {
    if (args.size() < 2)
        throw std::invalid_argument("ExactlyOne needs at least two members");
    return make(Formula::Kind::ExactlyOne, {}, std::move(args));
}

FormulaPtr with_origin(const FormulaPtr& f, Origin origin) {
    auto copy = std::make_shared<Formula>(*f);
    copy->origin = origin;
    return copy;
}

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (a->kind != b->kind || a->var != b->var || a->args.size() != b->args.size())
        return false;
    for (size_t i = 0; i < a->args.size(); ++i)
        if (!formula_equal(a->args[i], b->args[i])) return false;
    return true;
}

namespace {

// !  binds tightest, then &, |, ->, <->; exactly_one uses call syntax.
int precedence(Formula::Kind k) {
    switch (k) {
        case Formula::Kind::Var:
        case Formula::Kind::ExactlyOne: return 5;
        case Formula::Kind::Not: return 4;
        case Formula::Kind::And: return 3;
        case Formula::Kind::Or: return 2;
        case Formula::Kind::Implies: return 1;
        case Formula::Kind::Iff: return 0;
    }
    return 0;
}

void render_into(const FormulaPtr& f, std::string& out) {
    auto child = [&](const FormulaPtr& c, bool strict) {
        bool parens = strict ? precedence(c->kind) <= precedence(f->kind)
                             : precedence(c->kind) < precedence(f->kind);
        if (parens) out += '(';
        render_into(c, out);
        if (parens) out += ')';
    };
    switch (f->kind) {
        case Formula::Kind::Var: out += f->var; return;
        case Formula::Kind::Not:
            out += '!';
            child(f->args[0], false);
            return;
        case Formula::Kind::And:
        case Formula::Kind::Or: {
            const char* op = f->kind == Formula::Kind::And ? " & " : " | ";
            for (size_t i = 0; i < f->args.size(); ++i) {
                if (i) out += op;
                child(f->args[i], false);
            }
            return;
        }
        case Formula::Kind::Implies:
        case Formula::Kind::Iff:
            child(f->args[0], true);
            out += f->kind == Formula::Kind::Implies ? " -> " : " <-> ";
            child(f->args[1], true);
            return;
        case Formula::Kind::ExactlyOne:
            out += "exactly_one(";
            for (size_t i = 0; i < f->args.size(); ++i) {
                if (i) out += ", ";
                render_into(f->args[i], out);
            }
            out += ')';
            return;
    }
}

}  // namespace

std::string render(const FormulaPtr& f) {
    std::string out;
    render_into(f, out);
    return out;
}

std::vector<std::string> formula_variables(const FormulaPtr& f) {
    std::vector<std::string> order;
    std::unordered_set<std::string> seen;
    std::vector<const Formula*> stack{f.get()};
    // explicit stack, children pushed in reverse to keep preorder
    while (!stack.empty()) {
        const Formula* n = stack.back();
        stack.pop_back();
        if (n->kind == Formula::Kind::Var) {
            if (seen.insert(n->var).second) order.push_back(n->var);
            continue;
        }
        for (auto it = n->args.rbegin(); it != n->args.rend(); ++it)
            stack.push_back(it->get());
    }
    return order;
}

FormulaPtr compile_relation(const Relation& r, SemanticsMode mode) {
    FormulaPtr parent = f_var(r.parent);
    std::vector<FormulaPtr> children;
    children.reserve(r.children.size());
    for (const FeatureId& c : r.children) children.push_back(f_var(c));

    FormulaPtr row;
    switch (r.type) {
        case RelationType::Mandatory: row = f_iff(parent, children[0]); break;
        case RelationType::Optional: row = f_implies(children[0], parent); break;
        case RelationType::Or: row = f_iff(parent, f_or(children)); break;
        case RelationType::Alternative:
            row = f_iff(parent, f_exactly_one(children));
            break;
        case RelationType::OptionalOr:
            row = f_implies(f_or(children), parent);
            break;
        case RelationType::OptionalAlternative:
            row = f_implies(f_exactly_one(children), parent);
            break;
    }
    if (mode == SemanticsMode::PaperLiteral) return row;

    std::vector<FormulaPtr> parts{row};
    for (const FormulaPtr& c : children) parts.push_back(f_implies(c, parent));
    if (r.type == RelationType::Alternative ||
        r.type == RelationType::OptionalAlternative) {
        for (size_t i = 0; i < children.size(); ++i)
            for (size_t j = i + 1; j < children.size(); ++j)
                parts.push_back(f_not(f_and({children[i], children[j]})));
    }
    return f_and(std::move(parts));
}

FormulaPtr compile_constraint(const CrossTreeConstraint& c) {
    if (c.kind == ConstraintKind::Requires)
        return f_implies(f_var(c.source), f_var(c.target));
    return f_not(f_and({f_var(c.source), f_var(c.target)}));
}

FormulaPtr compile_model(const FeatureModel& m, SemanticsMode mode) {
    std::vector<FormulaPtr> parts;
    parts.reserve(1 + m.relations.size() + m.constraints.size());
    parts.push_back(
        with_origin(f_var(m.root), Origin{Origin::Kind::Structural, -1}));
    for (const Relation& r : m.relations)
        parts.push_back(
            with_origin(compile_relation(r, mode), Origin{Origin::Kind::Relation, r.id}));
    for (const CrossTreeConstraint& c : m.constraints)
        parts.push_back(
            with_origin(compile_constraint(c), Origin{Origin::Kind::Constraint, c.id}));
    return f_and(std::move(parts));
}

namespace {

bool eval_node(const Formula* f, const Configuration& config) {
    switch (f->kind) {
        case Formula::Kind::Var: {
            Truth t = config.get(f->var);
            if (t == Truth::Undecided)
                throw Error(ErrorCode::UndecidedVariable,
                            "feature '" + f->var + "' is undecided");
            return t == Truth::True;
        }
        case Formula::Kind::Not: return !eval_node(f->args[0].get(), config);
        case Formula::Kind::And:
            return std::all_of(f->args.begin(), f->args.end(), [&](const FormulaPtr& a) {
                return eval_node(a.get(), config);
            });
        case Formula::Kind::Or:
            return std::any_of(f->args.begin(), f->args.end(), [&](const FormulaPtr& a) {
                return eval_node(a.get(), config);
            });
        case Formula::Kind::Implies:
            return !eval_node(f->args[0].get(), config) ||
                   eval_node(f->args[1].get(), config);
        case Formula::Kind::Iff:
            return eval_node(f->args[0].get(), config) ==
                   eval_node(f->args[1].get(), config);
        case Formula::Kind::ExactlyOne: {
            int count = 0;
            for (const FormulaPtr& a : f->args)
                if (eval_node(a.get(), config) && ++count > 1) break;
            return count == 1;
        }
    }
    return false;
}

}  // namespace

bool evaluate(const FormulaPtr& f, const Configuration& config) {
    return eval_node(f.get(), config);
}

int Cnf::index_of(const std::string& name) const {
    for (size_t i = 0; i < variables.size(); ++i)
        if (variables[i] == name) return static_cast<int>(i);
    return -1;
}

namespace {

class CnfBuilder {
public:
    CnfBuilder(const FormulaPtr& root, const std::vector<std::string>* var_order) {
        if (var_order) {
            cnf_.variables = *var_order;
            for (size_t i = 0; i < cnf_.variables.size(); ++i)
                index_.emplace(cnf_.variables[i], static_cast<int>(i));
            for (const std::string& v : formula_variables(root))
                if (!index_.count(v))
                    throw Error(ErrorCode::UnknownFeature,
                                "variable '" + v + "' missing from the variable order");
        } else {
            for (const std::string& v : formula_variables(root)) {
                index_.emplace(v, static_cast<int>(cnf_.variables.size()));
                cnf_.variables.push_back(v);
            }
        }
        cnf_.base_var_count = static_cast<int>(cnf_.variables.size());
        assert_true(root, root->origin);
    }

    Cnf take() { return std::move(cnf_); }

private:
    // A literal usable without a definition: a variable or its negation.
    static const Formula* as_literal(const Formula* f, bool& negated) {
        negated = false;
        while (f->kind == Formula::Kind::Not) {
            negated = !negated;
            f = f->args[0].get();
        }
        return f->kind == Formula::Kind::Var ? f : nullptr;
    }

    int var_literal(const std::string& name) { return index_.at(name) + 1; }

    void emit(std::vector<int> clause, Origin origin) {
        cnf_.clauses.push_back(std::move(clause));
        cnf_.clause_origin.push_back(origin);
    }

    static Origin effective(const Formula* f, Origin inherited) {
        return f->origin.id >= 0 ? f->origin : inherited;
    }

    void assert_true(const FormulaPtr& f, Origin origin) {
        const Formula* n = f.get();
        origin = effective(n, origin);
        switch (n->kind) {
            case Formula::Kind::And:
                for (const FormulaPtr& a : n->args) assert_true(a, origin);
                return;
            case Formula::Kind::Var:
                emit({var_literal(n->var)}, origin);
                return;
            case Formula::Kind::Not: {
                bool neg = false;
                if (const Formula* v = as_literal(n, neg)) {
                    emit({neg ? -var_literal(v->var) : var_literal(v->var)}, origin);
                    return;
                }
                // fold double negation before anything else
                const Formula* inner = n->args[0].get();
                bool inner_neg = true;
                while (inner->kind == Formula::Kind::Not) {
                    inner_neg = !inner_neg;
                    inner = inner->args[0].get();
                }
                if (!inner_neg) {
                    assert_subtree(inner, origin);
                    return;
                }
                // !(l1 & ... & ln) over literals becomes one clause
                if (inner->kind == Formula::Kind::And) {
                    std::vector<int> clause;
                    bool all_literals = true;
                    for (const FormulaPtr& a : inner->args) {
                        bool aneg = false;
                        const Formula* v = as_literal(a.get(), aneg);
                        if (!v) {
                            all_literals = false;
                            break;
                        }
                        clause.push_back(aneg ? var_literal(v->var)
                                              : -var_literal(v->var));
                    }
                    if (all_literals) {
                        emit(std::move(clause), origin);
                        return;
                    }
                }
                emit({-define(inner, origin)}, origin);
                return;
            }
            default:
                emit({literal_for(n, origin)}, origin);
                return;
        }
    }

    // Re-dispatch a positive subtree reached by stripping an even number of
    // negations.
    void assert_subtree(const Formula* n, Origin origin) {
        switch (n->kind) {
            case Formula::Kind::And:
                for (const FormulaPtr& a : n->args) assert_true(a, origin);
                return;
            case Formula::Kind::Var:
                emit({var_literal(n->var)}, origin);
                return;
            default:
                emit({literal_for(n, origin)}, origin);
                return;
        }
    }

    int literal_for(const Formula* n, Origin origin) {
        bool neg = false;
        if (const Formula* v = as_literal(n, neg)) {
            int lit = var_literal(v->var);
            return neg ? -lit : lit;
        }
        if (n->kind == Formula::Kind::Not)
            return -literal_for(n->args[0].get(), origin);
        return define(n, origin);
    }

    // Fresh auxiliary defined as t <-> n, in AST preorder.
    int define(const Formula* n, Origin origin) {
        int t = static_cast<int>(cnf_.variables.size()) + 1;
        cnf_.variables.push_back("$" + std::to_string(++aux_count_));
        std::vector<int> lits;
        lits.reserve(n->args.size());
        for (const FormulaPtr& a : n->args) lits.push_back(literal_for(a.get(), origin));

        switch (n->kind) {
            case Formula::Kind::And: {
                std::vector<int> back{t};
                for (int l : lits) {
                    emit({-t, l}, origin);
                    back.push_back(-l);
                }
                emit(std::move(back), origin);
                return t;
            }
            case Formula::Kind::Or: {
                std::vector<int> fwd{-t};
                for (int l : lits) {
                    fwd.push_back(l);
                    emit({t, -l}, origin);
                }
                emit(std::move(fwd), origin);
                return t;
            }
            case Formula::Kind::Implies:
                emit({-t, -lits[0], lits[1]}, origin);
                emit({t, lits[0]}, origin);
                emit({t, -lits[1]}, origin);
                return t;
            case Formula::Kind::Iff:
                emit({-t, -lits[0], lits[1]}, origin);
                emit({-t, lits[0], -lits[1]}, origin);
                emit({t, lits[0], lits[1]}, origin);
                emit({t, -lits[0], -lits[1]}, origin);
                return t;
            case Formula::Kind::ExactlyOne: {
                std::vector<int> at_least{-t};
                for (int l : lits) at_least.push_back(l);
                emit(std::move(at_least), origin);
                for (size_t i = 0; i < lits.size(); ++i)
                    for (size_t j = i + 1; j < lits.size(); ++j)
                        emit({-t, -lits[i], -lits[j]}, origin);
                for (size_t i = 0; i < lits.size(); ++i) {
                    std::vector<int> one_hot{t, -lits[i]};
                    for (size_t j = 0; j < lits.size(); ++j)
                        if (j != i) one_hot.push_back(lits[j]);
                    emit(std::move(one_hot), origin);
                }
                return t;
            }
            case Formula::Kind::Var:
            case Formula::Kind::Not:
                break;  // unreachable: handled by literal_for
        }
        throw std::logic_error("define() on a literal node");
    }

    Cnf cnf_;
    std::unordered_map<std::string, int> index_;
    int aux_count_ = 0;
};

}  // namespace

Cnf to_cnf(const FormulaPtr& f, const std::vector<std::string>* var_order) {
    CnfBuilder builder(f, var_order);
    return builder.take();
}

std::string dimacs_export(const Cnf& cnf) {
    std::string out;
    for (int i = 0; i < cnf.base_var_count; ++i) {
        out += "c ";
        out += std::to_string(i + 1);
        out += ' ';
        out += cnf.variables[static_cast<size_t>(i)];
        out += '\n';
    }
    out += "p cnf " + std::to_string(cnf.variables.size()) + ' ' +
           std::to_string(cnf.clauses.size()) + '\n';
    for (const std::vector<int>& clause : cnf.clauses) {
        for (int lit : clause) {
            out += std::to_string(lit);
            out += ' ';
        }
        out += "0\n";
    }
    return out;
}

}  // namespace fm
