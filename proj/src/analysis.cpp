#include "fm/analysis.hpp"

#include <set>

namespace fm {

namespace {

Cnf model_cnf(const FeatureModel& m, SemanticsMode mode) {
    return to_cnf(compile_model(m, mode), &m.features);
}

int require_index(const FeatureModel& m, const FeatureId& f) {
    int i = m.index_of(f);
    if (i < 0) throw Error(ErrorCode::UnknownFeature, "unknown feature '" + f + "'");
    return i;
}

void require_not_void(const FeatureModel& m, const Cnf& cnf) {
    if (!solve(cnf).sat())
        throw Error(ErrorCode::VoidModel, "model '" + m.name + "' has no products");
}

std::vector<FeatureId> dead_from(const FeatureModel& m, const Cnf& cnf) {
    std::vector<FeatureId> dead;
    for (size_t i = 0; i < m.features.size(); ++i)
        if (!solve(cnf, {static_cast<int>(i) + 1}).sat()) dead.push_back(m.features[i]);
    return dead;
}

std::vector<FeatureId> false_optionals_from(const FeatureModel& m, const Cnf& cnf,
                                            const std::vector<FeatureId>& dead) {
    std::set<FeatureId> buried(dead.begin(), dead.end());
    std::vector<FeatureId> out;
    for (size_t i = 0; i < m.features.size(); ++i) {
        const FeatureId& f = m.features[i];
        int rel = m.incoming_relation(f);
        if (rel < 0) continue;
        const Relation& in = m.relations[static_cast<size_t>(rel)];
        if (in.type == RelationType::Mandatory) continue;
        if (buried.count(f) || buried.count(in.parent)) continue;
        int parent = m.index_of(in.parent);
        if (!solve(cnf, {parent + 1, -(static_cast<int>(i) + 1)}).sat())
            out.push_back(f);
    }
    return out;
}

}  // namespace

ConfigVerdict check_config(const FeatureModel& m, const Configuration& config,
                           SemanticsMode mode) {
    if (!config.total)
        throw Error(ErrorCode::UndecidedVariable, "configuration must be total");
    ConfigVerdict verdict;
    for (const Relation& r : m.relations) {
        FormulaPtr f = compile_relation(r, mode);
        if (!evaluate(f, config))
            verdict.violations.push_back(
                {Origin{Origin::Kind::Relation, r.id}, render(f), false});
    }
    for (const CrossTreeConstraint& c : m.constraints) {
        FormulaPtr f = compile_constraint(c);
        if (!evaluate(f, config))
            verdict.violations.push_back(
                {Origin{Origin::Kind::Constraint, c.id}, render(f), false});
    }
    verdict.valid = verdict.violations.empty();
    return verdict;
}

bool is_void(const FeatureModel& m, SemanticsMode mode) {
    return !solve(model_cnf(m, mode)).sat();
}

std::vector<FeatureId> dead_features(const FeatureModel& m, SemanticsMode mode) {
    Cnf cnf = model_cnf(m, mode);
    require_not_void(m, cnf);
    return dead_from(m, cnf);
}

std::vector<FeatureId> false_optionals(const FeatureModel& m, SemanticsMode mode) {
    Cnf cnf = model_cnf(m, mode);
    require_not_void(m, cnf);
    return false_optionals_from(m, cnf, dead_from(m, cnf));
}

std::vector<FeatureId> core_features(const FeatureModel& m, SemanticsMode mode) {
    Cnf cnf = model_cnf(m, mode);
    require_not_void(m, cnf);
    std::vector<FeatureId> core;
    for (size_t i = 0; i < m.features.size(); ++i)
        if (!solve(cnf, {-(static_cast<int>(i) + 1)}).sat())
            core.push_back(m.features[i]);
    return core;
}

Rational commonality(const FeatureModel& m, const FeatureId& f, SemanticsMode mode) {
    int i = require_index(m, f);
    Cnf cnf = model_cnf(m, mode);
    require_not_void(m, cnf);
    std::uint64_t total = count(cnf, m.features);
    Cnf with = cnf;
    with.clauses.push_back({i + 1});
    with.clause_origin.push_back(Origin{});
    return {count(with, m.features), total};
}

SolutionSet list_products(const FeatureModel& m, SemanticsMode mode,
                          std::optional<std::size_t> limit) {
    return enumerate(model_cnf(m, mode), m.features, limit);
}

std::uint64_t count_products(const FeatureModel& m, SemanticsMode mode) {
    return count(model_cnf(m, mode), m.features);
}

PropagationResult propagate(const FeatureModel& m, const Configuration& config,
                            SemanticsMode mode) {
    Cnf cnf = model_cnf(m, mode);
    std::vector<int> assumptions;
    std::vector<size_t> undecided;
    for (size_t i = 0; i < m.features.size(); ++i) {
        switch (config.get(m.features[i])) {
            case Truth::True: assumptions.push_back(static_cast<int>(i) + 1); break;
            case Truth::False: assumptions.push_back(-(static_cast<int>(i) + 1)); break;
            case Truth::Undecided: undecided.push_back(i); break;
        }
    }
    PropagationResult result;
    if (!solve(cnf, assumptions).sat()) {
        result.conflict = true;
        return result;
    }
    for (size_t i : undecided) {
        assumptions.push_back(-(static_cast<int>(i) + 1));
        bool can_be_false = solve(cnf, assumptions).sat();
        assumptions.back() = static_cast<int>(i) + 1;
        bool can_be_true = solve(cnf, assumptions).sat();
        assumptions.pop_back();
        if (!can_be_false)
            result.forced_in.push_back(m.features[i]);
        else if (!can_be_true)
            result.forced_out.push_back(m.features[i]);
        else
            result.free.push_back(m.features[i]);
    }
    return result;
}

std::vector<ElementRef> explain(const FeatureModel& m, SemanticsMode mode,
                                const ExplainTarget& target) {
    Cnf cnf = model_cnf(m, mode);
    bool model_void = !solve(cnf).sat();

    std::vector<int> extras;
    switch (target.kind) {
        case ExplainTarget::Kind::VoidModel:
            if (!model_void)
                throw Error(ErrorCode::ConditionAbsent,
                            "model '" + m.name + "' is not void");
            break;
        case ExplainTarget::Kind::Dead: {
            int i = require_index(m, target.feature);
            if (model_void)
                throw Error(ErrorCode::ConditionAbsent,
                            "model '" + m.name + "' is void; no feature is singled "
                            "out as dead");
            if (solve(cnf, {i + 1}).sat())
                throw Error(ErrorCode::ConditionAbsent,
                            "'" + target.feature + "' is not dead");
            extras = {i + 1};
            break;
        }
        case ExplainTarget::Kind::FalseOptional: {
            int i = require_index(m, target.feature);
            if (model_void)
                throw Error(ErrorCode::ConditionAbsent,
                            "model '" + m.name + "' is void; no feature is singled "
                            "out as false optional");
            int rel = m.incoming_relation(target.feature);
            if (rel < 0 ||
                m.relations[static_cast<size_t>(rel)].type == RelationType::Mandatory)
                throw Error(ErrorCode::ConditionAbsent,
                            "'" + target.feature + "' is not declared optional");
            int parent =
                m.index_of(m.relations[static_cast<size_t>(rel)].parent);
            if (!solve(cnf, {i + 1}).sat() || !solve(cnf, {parent + 1}).sat() ||
                solve(cnf, {parent + 1, -(i + 1)}).sat())
                throw Error(ErrorCode::ConditionAbsent,
                            "'" + target.feature + "' is not a false optional");
            extras = {parent + 1, -(i + 1)};
            break;
        }
    }

    std::vector<ElementRef> kept;
    kept.reserve(m.relations.size() + m.constraints.size());
    for (const Relation& r : m.relations)
        kept.push_back({ElementRef::Kind::Relation, r.id});
    for (const CrossTreeConstraint& c : m.constraints)
        kept.push_back({ElementRef::Kind::Constraint, c.id});

    auto condition_holds = [&](const std::vector<ElementRef>& subset) {
        std::vector<char> rel_in(m.relations.size(), 0);
        std::vector<char> con_in(m.constraints.size(), 0);
        for (const ElementRef& e : subset)
            (e.kind == ElementRef::Kind::Relation ? rel_in : con_in)
                [static_cast<size_t>(e.id)] = 1;
        Cnf sub;
        sub.variables = cnf.variables;
        sub.base_var_count = cnf.base_var_count;
        for (size_t k = 0; k < cnf.clauses.size(); ++k) {
            const Origin& o = cnf.clause_origin[k];
            bool keep = false;
            switch (o.kind) {
                case Origin::Kind::Structural: keep = true; break;
                case Origin::Kind::Relation:
                    keep = rel_in[static_cast<size_t>(o.id)] != 0;
                    break;
                case Origin::Kind::Constraint:
                    keep = con_in[static_cast<size_t>(o.id)] != 0;
                    break;
            }
            if (keep) {
                sub.clauses.push_back(cnf.clauses[k]);
                sub.clause_origin.push_back(o);
            }
        }
        return !solve(sub, extras).sat();
    };

    // One deletion pass: the condition is monotone in the element set, so
    // every element kept here stays necessary for the final set.
    for (size_t k = 0; k < kept.size();) {
        std::vector<ElementRef> trial = kept;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(k));
        if (condition_holds(trial))
            kept = std::move(trial);
        else
            ++k;
    }
    return kept;
}

ModelHealthReport health_report(const FeatureModel& m, SemanticsMode mode) {
    ModelHealthReport report;
    Cnf cnf = model_cnf(m, mode);
    if (!solve(cnf).sat()) {
        report.void_model = true;
        return report;
    }
    report.dead = dead_from(m, cnf);
    report.false_optional = false_optionals_from(m, cnf, report.dead);
    std::set<FeatureId> dead(report.dead.begin(), report.dead.end());
    std::set<FeatureId> optional(report.false_optional.begin(),
                                 report.false_optional.end());
    for (const FeatureId& f : m.features) {
        if (dead.count(f))
            report.implicated.emplace_back(f,
                                           explain(m, mode, ExplainTarget::dead(f)));
        else if (optional.count(f))
            report.implicated.emplace_back(
                f, explain(m, mode, ExplainTarget::false_optional(f)));
    }
    return report;
}

}  // namespace fm
