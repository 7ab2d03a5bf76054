#include "fm/sat.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace fm {

std::vector<std::string> SolutionSet::selected_names(std::size_t i) const {
    std::vector<std::string> names;
    const std::vector<bool>& row = solutions.at(i);
    for (std::size_t j = 0; j < row.size(); ++j)
        if (row[j]) names.push_back(variables[j]);
    return names;
}

namespace {

constexpr signed char kFalse = 0;
constexpr signed char kTrue = 1;
constexpr signed char kUnknown = 2;

class Dpll {
public:
    Dpll(int nvars, const std::vector<std::vector<int>>& clauses)
        : nvars_(nvars), clauses_(clauses) {}

    bool run(const std::vector<int>& assumptions) {
        std::vector<signed char> vals(static_cast<size_t>(nvars_) + 1, kUnknown);
        for (int lit : assumptions) {
            int v = std::abs(lit);
            if (v < 1 || v > nvars_)
                throw std::invalid_argument("assumption literal out of range");
            signed char want = lit > 0 ? kTrue : kFalse;
            if (vals[v] == kUnknown)
                vals[v] = want;
            else if (vals[v] != want)
                return false;
        }
        return search(std::move(vals));
    }

    const std::vector<signed char>& result() const { return final_; }

private:
    enum class State { Conflict, Satisfied, Open };

    State simplify(std::vector<signed char>& vals) const {
        for (;;) {
            bool changed = false;
            bool all_satisfied = true;
            for (const std::vector<int>& clause : clauses_) {
                bool sat = false;
                int unassigned = 0;
                int unit = 0;
                for (int lit : clause) {
                    signed char v = vals[static_cast<size_t>(std::abs(lit))];
                    if (v == kUnknown) {
                        ++unassigned;
                        unit = lit;
                    } else if ((v == kTrue) == (lit > 0)) {
                        sat = true;
                        break;
                    }
                }
                if (sat) continue;
                if (unassigned == 0) return State::Conflict;
                all_satisfied = false;
                if (unassigned == 1) {
                    vals[static_cast<size_t>(std::abs(unit))] =
                        unit > 0 ? kTrue : kFalse;
                    changed = true;
                }
            }
            if (changed) continue;
            if (all_satisfied) return State::Satisfied;

            std::vector<unsigned char> pos(static_cast<size_t>(nvars_) + 1, 0);
            std::vector<unsigned char> neg(static_cast<size_t>(nvars_) + 1, 0);
            for (const std::vector<int>& clause : clauses_) {
                bool sat = false;
                for (int lit : clause) {
                    signed char v = vals[static_cast<size_t>(std::abs(lit))];
                    if (v != kUnknown && (v == kTrue) == (lit > 0)) {
                        sat = true;
                        break;
                    }
                }
                if (sat) continue;
                for (int lit : clause) {
                    size_t v = static_cast<size_t>(std::abs(lit));
                    if (vals[v] != kUnknown) continue;
                    (lit > 0 ? pos : neg)[v] = 1;
                }
            }
            bool assigned = false;
            for (int v = 1; v <= nvars_; ++v) {
                size_t u = static_cast<size_t>(v);
                if (vals[u] != kUnknown) continue;
                if (pos[u] && !neg[u]) {
                    vals[u] = kTrue;
                    assigned = true;
                } else if (neg[u] && !pos[u]) {
                    vals[u] = kFalse;
                    assigned = true;
                }
            }
            if (!assigned) return State::Open;
        }
    }

    bool search(std::vector<signed char> vals) {
        for (;;) {
            switch (simplify(vals)) {
                case State::Conflict: return false;
                case State::Satisfied: final_ = std::move(vals); return true;
                case State::Open: break;
            }
            int branch = 0;
            for (int v = 1; v <= nvars_; ++v)
                if (vals[static_cast<size_t>(v)] == kUnknown) {
                    branch = v;
                    break;
                }
            std::vector<signed char> tried = vals;
            tried[static_cast<size_t>(branch)] = kTrue;
            if (search(std::move(tried))) return true;
            vals[static_cast<size_t>(branch)] = kFalse;
        }
    }

    int nvars_;
    const std::vector<std::vector<int>>& clauses_;
    std::vector<signed char> final_;
};

std::vector<bool> witness_from(const std::vector<signed char>& vals, int nvars) {
    std::vector<bool> witness(static_cast<size_t>(nvars));
    for (int v = 1; v <= nvars; ++v)
        witness[static_cast<size_t>(v - 1)] = vals[static_cast<size_t>(v)] == kTrue;
    return witness;
}

void sort_solutions(std::vector<std::vector<bool>>& solutions) {
    std::sort(solutions.begin(), solutions.end(),
              [](const std::vector<bool>& a, const std::vector<bool>& b) {
                  for (size_t i = 0; i < a.size() && i < b.size(); ++i)
                      if (a[i] != b[i]) return a[i];
                  return false;
              });
}

}  // namespace

SatResult solve(const Cnf& cnf, const std::vector<int>& assumptions) {
    int nvars = static_cast<int>(cnf.variables.size());
    Dpll solver(nvars, cnf.clauses);
    SatResult result;
    if (solver.run(assumptions)) {
        result.status = SatResult::Status::Sat;
        result.witness = witness_from(solver.result(), nvars);
    }
    return result;
}

SolutionSet enumerate(const Cnf& cnf, const std::vector<std::string>& projection,
                      std::optional<std::size_t> limit) {
    SolutionSet set;
    set.variables = projection;
    set.limit = limit;

    std::vector<int> proj;
    proj.reserve(projection.size());
    for (const std::string& name : projection) {
        int idx = cnf.index_of(name);
        if (idx < 0)
            throw Error(ErrorCode::UnknownFeature,
                        "projection variable '" + name + "' is not in the CNF");
        proj.push_back(idx);
    }

    int nvars = static_cast<int>(cnf.variables.size());
    std::vector<std::vector<int>> clauses = cnf.clauses;
    for (;;) {
        if (limit && set.solutions.size() >= *limit) {
            set.truncated = true;
            break;
        }
        Dpll solver(nvars, clauses);
        if (!solver.run({})) break;
        std::vector<bool> witness = witness_from(solver.result(), nvars);
        std::vector<bool> solution;
        std::vector<int> blocking;
        solution.reserve(proj.size());
        blocking.reserve(proj.size());
        for (int idx : proj) {
            bool value = witness[static_cast<size_t>(idx)];
            solution.push_back(value);
            blocking.push_back(value ? -(idx + 1) : idx + 1);
        }
        set.solutions.push_back(std::move(solution));
        if (blocking.empty()) break;
        clauses.push_back(std::move(blocking));
    }
    sort_solutions(set.solutions);
    return set;
}

std::uint64_t count(const Cnf& cnf, const std::vector<std::string>& projection) {
    return enumerate(cnf, projection).size();
}

namespace {

struct FastNode {
    Formula::Kind kind;
    int var = -1;
    std::vector<FastNode> kids;
};

FastNode index_formula(const Formula* f,
                       const std::unordered_map<std::string, int>& index) {
    FastNode node;
    node.kind = f->kind;
    if (f->kind == Formula::Kind::Var) {
        auto it = index.find(f->var);
        if (it == index.end())
            throw Error(ErrorCode::UnknownFeature,
                        "variable '" + f->var + "' is not in the oracle variable list");
        node.var = it->second;
        return node;
    }
    node.kids.reserve(f->args.size());
    for (const FormulaPtr& a : f->args)
        node.kids.push_back(index_formula(a.get(), index));
    return node;
}

bool eval_fast(const FastNode& n, const std::vector<char>& vals) {
    switch (n.kind) {
        case Formula::Kind::Var: return vals[static_cast<size_t>(n.var)] != 0;
        case Formula::Kind::Not: return !eval_fast(n.kids[0], vals);
        case Formula::Kind::And:
            for (const FastNode& k : n.kids)
                if (!eval_fast(k, vals)) return false;
            return true;
        case Formula::Kind::Or:
            for (const FastNode& k : n.kids)
                if (eval_fast(k, vals)) return true;
            return false;
        case Formula::Kind::Implies:
            return !eval_fast(n.kids[0], vals) || eval_fast(n.kids[1], vals);
        case Formula::Kind::Iff:
            return eval_fast(n.kids[0], vals) == eval_fast(n.kids[1], vals);
        case Formula::Kind::ExactlyOne: {
            int hits = 0;
            for (const FastNode& k : n.kids)
                if (eval_fast(k, vals) && ++hits > 1) return false;
            return hits == 1;
        }
    }
    return false;
}

}  // namespace

SolutionSet oracle_enumerate(const FormulaPtr& f, const std::vector<std::string>& vars) {
    if (vars.size() > kOracleVariableCap)
        throw Error(ErrorCode::TooManyVariables,
                    "oracle enumeration is capped at " +
                        std::to_string(kOracleVariableCap) + " variables, got " +
                        std::to_string(vars.size()));
    std::unordered_map<std::string, int> index;
    for (size_t i = 0; i < vars.size(); ++i)
        index.emplace(vars[i], static_cast<int>(i));

    FastNode root = index_formula(f.get(), index);

    SolutionSet set;
    set.variables = vars;
    size_t n = vars.size();
    std::vector<char> vals(n);
    // counter bit 0 means True and vars[0] is the most significant bit, so
    // ascending counters emit solutions already in sorted order
    for (std::uint64_t counter = 0; counter < (1ull << n); ++counter) {
        for (size_t i = 0; i < n; ++i)
            vals[i] = ((counter >> (n - 1 - i)) & 1) == 0 ? 1 : 0;
        if (eval_fast(root, vals))
            set.solutions.emplace_back(vals.begin(), vals.end());
    }
    return set;
}

Cnf parse_dimacs(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::unordered_map<int, std::string> names;
    int nvars = -1;
    bool seen_header = false;
    std::vector<std::vector<int>> clauses;
    std::vector<int> current;

    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head)) continue;
        if (head == "c") {
            int idx;
            std::string name;
            if (ls >> idx >> name) names.emplace(idx, name);
            continue;
        }
        if (head == "p") {
            std::string fmt;
            int v = 0, c = 0;
            if (!(ls >> fmt >> v >> c) || fmt != "cnf" || v < 0 || c < 0)
                throw std::invalid_argument("malformed DIMACS problem line");
            nvars = v;
            seen_header = true;
            continue;
        }
        if (!seen_header)
            throw std::invalid_argument("DIMACS clause before the problem line");
        ls.clear();
        ls.str(line);
        int lit;
        while (ls >> lit) {
            if (lit == 0) {
                clauses.push_back(current);
                current.clear();
            } else {
                if (std::abs(lit) > nvars)
                    throw std::invalid_argument("DIMACS literal out of range");
                current.push_back(lit);
            }
        }
    }
    if (!seen_header) throw std::invalid_argument("missing DIMACS problem line");
    if (!current.empty()) throw std::invalid_argument("unterminated DIMACS clause");

    Cnf cnf;
    int base = 0;
    while (names.count(base + 1)) ++base;
    cnf.base_var_count = base;
    for (int i = 1; i <= nvars; ++i) {
        auto it = names.find(i);
        if (it != names.end() && i <= base)
            cnf.variables.push_back(it->second);
        else
            cnf.variables.push_back("$" + std::to_string(i - base));
    }
    cnf.clauses = std::move(clauses);
    cnf.clause_origin.assign(cnf.clauses.size(), Origin{});
    return cnf;
}

}  // namespace fm
