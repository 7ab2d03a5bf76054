#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fm/logic.hpp"

namespace fm {

struct SatResult {
    enum class Status { Sat, Unsat };
    Status status = Status::Unsat;
    // Total assignment over all CNF variables, meaningful only when Sat.
    std::vector<bool> witness;

    bool sat() const { return status == Status::Sat; }
};

// Assignments projected onto a fixed variable list, sorted lexicographically
// with True ordered before False, first variable most significant.
struct SolutionSet {
    std::vector<std::string> variables;
    std::vector<std::vector<bool>> solutions;
    bool truncated = false;
    std::optional<std::size_t> limit;

    std::size_t size() const { return solutions.size(); }
    std::vector<std::string> selected_names(std::size_t i) const;
};

// Deterministic DPLL with unit propagation and pure-literal elimination.
// Branches on the lowest-index unassigned variable, True first; variables
// left unconstrained in the final state are reported False. Assumptions are
// extra unit literals (1-based, negative for False).
SatResult solve(const Cnf& cnf, const std::vector<int>& assumptions = {});

// All satisfying assignments projected onto the named variables, found by
// iterated solving with blocking clauses over the projection literals.
SolutionSet enumerate(const Cnf& cnf, const std::vector<std::string>& projection,
                      std::optional<std::size_t> limit = std::nullopt);

std::uint64_t count(const Cnf& cnf, const std::vector<std::string>& projection);

// Exhaustive evaluation of the formula over every assignment of the given
// variables; the reference the clause-based path is checked against.
SolutionSet oracle_enumerate(const FormulaPtr& f, const std::vector<std::string>& vars);

inline constexpr std::size_t kOracleVariableCap = 24;

// Reads the dialect dimacs_export produces: leading `c <index> <name>`
// comments name the projected variables, unnamed indices become auxiliaries.
Cnf parse_dimacs(const std::string& text);

}  // namespace fm
