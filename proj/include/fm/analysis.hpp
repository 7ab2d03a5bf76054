#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fm/core.hpp"
#include "fm/logic.hpp"
#include "fm/sat.hpp"

namespace fm {

struct Violation {
    Origin source;
    std::string rendering;
    bool value = false;
};

struct ConfigVerdict {
    bool valid = true;
    std::vector<Violation> violations;
};

struct ElementRef {
    enum class Kind { Relation, Constraint };
    Kind kind = Kind::Relation;
    int id = -1;

    friend bool operator==(const ElementRef&, const ElementRef&) = default;
};

struct ModelHealthReport {
    bool void_model = false;
    std::vector<FeatureId> dead;
    std::vector<FeatureId> false_optional;
    // declaration-ordered explanations for every dead or false-optional feature
    std::vector<std::pair<FeatureId, std::vector<ElementRef>>> implicated;
};

struct PropagationResult {
    bool conflict = false;
    std::vector<FeatureId> forced_in;
    std::vector<FeatureId> forced_out;
    std::vector<FeatureId> free;
};

// Kept unreduced so counts stay recognizable, e.g. 38/74 rather than 19/37.
struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    double value() const {
        return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    }
    friend bool operator==(const Rational&, const Rational&) = default;
};

struct ExplainTarget {
    enum class Kind { VoidModel, Dead, FalseOptional };
    Kind kind = Kind::VoidModel;
    FeatureId feature;

    static ExplainTarget void_model() { return {Kind::VoidModel, {}}; }
    static ExplainTarget dead(FeatureId f) { return {Kind::Dead, std::move(f)}; }
    static ExplainTarget false_optional(FeatureId f) {
        return {Kind::FalseOptional, std::move(f)};
    }
};

// Evaluates every relation and constraint independently against a total
// configuration; the verdict carries each false conjunct.
ConfigVerdict check_config(const FeatureModel& m, const Configuration& config,
                           SemanticsMode mode = SemanticsMode::Strict);

bool is_void(const FeatureModel& m, SemanticsMode mode = SemanticsMode::Strict);

// Features that appear in no product. Throws VoidModel on void input.
std::vector<FeatureId> dead_features(const FeatureModel& m,
                                     SemanticsMode mode = SemanticsMode::Strict);

// Non-mandatory features forced true whenever their parent is selected,
// excluding dead features and children of dead parents.
std::vector<FeatureId> false_optionals(const FeatureModel& m,
                                       SemanticsMode mode = SemanticsMode::Strict);

// Features present in every product.
std::vector<FeatureId> core_features(const FeatureModel& m,
                                     SemanticsMode mode = SemanticsMode::Strict);

// Share of products that contain f.
Rational commonality(const FeatureModel& m, const FeatureId& f,
                     SemanticsMode mode = SemanticsMode::Strict);

SolutionSet list_products(const FeatureModel& m,
                          SemanticsMode mode = SemanticsMode::Strict,
                          std::optional<std::size_t> limit = std::nullopt);

std::uint64_t count_products(const FeatureModel& m,
                             SemanticsMode mode = SemanticsMode::Strict);

// Consequences of the decided features in a partial configuration.
PropagationResult propagate(const FeatureModel& m, const Configuration& config,
                            SemanticsMode mode = SemanticsMode::Strict);

// Subset-minimal set of relations/constraints that keeps the target
// condition true, found by deletion in declaration order. Throws
// ConditionAbsent when the condition does not hold to begin with.
std::vector<ElementRef> explain(const FeatureModel& m, SemanticsMode mode,
                                const ExplainTarget& target);

ModelHealthReport health_report(const FeatureModel& m,
                                SemanticsMode mode = SemanticsMode::Strict);

}  // namespace fm
