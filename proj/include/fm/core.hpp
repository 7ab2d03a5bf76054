#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace fm {

/// Feature names: `[A-Za-z_][A-Za-z0-9_.]*`. Dots are legal so names like
/// `v2.3.1` can be used directly.
using FeatureId = std::string;

bool is_valid_feature_name(const std::string& name);

/// The six parent/child relation kinds of a feature tree.
enum class RelationType {
    Mandatory,
    Optional,
    Or,
    Alternative,
    OptionalOr,
    OptionalAlternative,
};

/// DSL keyword for a relation type (`mandatory`, `optional_or`, ...).
const char* relation_type_name(RelationType t);

/// True for Or/Alternative/OptionalOr/OptionalAlternative, which carry
/// child groups of size >= 2. Mandatory/Optional carry exactly one child.
bool is_group_type(RelationType t);

enum class ConstraintKind { Requires, Excludes };

const char* constraint_kind_name(ConstraintKind k);

/// One tree edge set: a parent and its ordered children. `id` is the
/// declaration ordinal and doubles as the index into FeatureModel::relations.
struct Relation {
    int id = -1;
    FeatureId parent;
    std::vector<FeatureId> children;
    RelationType type = RelationType::Mandatory;
};

/// Directed requires/excludes edge between two features outside the tree
/// hierarchy.
struct CrossTreeConstraint {
    int id = -1;
    ConstraintKind kind = ConstraintKind::Requires;
    FeatureId source;
    FeatureId target;
};

enum class FeatureKind { Root, VariationPoint, Variant };

/// Everything that can go wrong while assembling a model from relations and
/// constraints. `relation_id`/`constraint_id` point at the offending
/// declaration when one exists, so front ends can attach source spans.
struct StructuralError {
    enum class Kind {
        DuplicateFeature,
        MultipleParents,
        NoRoot,
        MultipleRoots,
        Cycle,
        UnknownFeatureInConstraint,
        HierarchicalConstraint,
        EmptyChildList,
        BadGroupArity,
        InvalidFeatureName,  // API-only; the DSL lexer rules this out
    };
    Kind kind;
    std::string message;
    FeatureId feature;       // offending feature name when applicable
    int relation_id = -1;
    int constraint_id = -1;
};

const char* structural_error_kind_name(StructuralError::Kind k);

/// Validated feature model. Immutable after build_model; all orderings are
/// declaration order. Feature declaration order is first appearance while
/// scanning relations (parent, then children, per relation).
class FeatureModel {
public:
    std::string name;
    FeatureId root;
    std::vector<FeatureId> features;
    std::vector<Relation> relations;
    std::vector<CrossTreeConstraint> constraints;

    int feature_count() const { return static_cast<int>(features.size()); }

    /// Index of a feature in declaration order, or -1 if unknown.
    int index_of(const FeatureId& f) const;
    bool has_feature(const FeatureId& f) const { return index_of(f) >= 0; }

    /// Incoming relation of a non-root feature; -1 for the root.
    int incoming_relation(const FeatureId& f) const;

    /// Parent feature; empty optional for the root.
    std::optional<FeatureId> parent_of(const FeatureId& f) const;

    /// True if `a` is a strict ancestor of `b` along tree edges.
    bool is_ancestor(const FeatureId& a, const FeatureId& b) const;

    bool operator==(const FeatureModel& other) const;

private:
    friend std::variant<FeatureModel, StructuralError> build_model(
        const std::string&, std::vector<Relation>, std::vector<CrossTreeConstraint>,
        const std::optional<FeatureId>&);
    std::unordered_map<std::string, int> index_;
    std::vector<int> incoming_;  // per feature index: relation id or -1
};

/// Truth value of a feature inside a configuration.
enum class Truth : unsigned char { False, True, Undecided };

/// Total or partial truth assignment over the features of one model.
/// The root is always True. `total` holds iff no feature is Undecided.
struct Configuration {
    const FeatureModel* model = nullptr;
    std::vector<Truth> values;  // indexed by feature declaration position
    bool total = false;

    Truth get(const FeatureId& f) const;
    /// Selected feature names in declaration order (True entries).
    std::vector<FeatureId> selected() const;
};

/// Library error codes for operation precondition violations and failed
/// lookups. Structural model assembly problems go through StructuralError
/// instead.
enum class ErrorCode {
    UnknownFeature,
    UndecidedVariable,
    VoidModel,
    TooManyVariables,
    ConditionAbsent,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

/// Assembles and validates a feature model. The root is inferred as the
/// unique feature that never appears as a child; `explicit_root` must agree
/// with the inference when relations exist, and is required when they don't
/// (single-feature models).
std::variant<FeatureModel, StructuralError> build_model(
    const std::string& name,
    std::vector<Relation> relations,
    std::vector<CrossTreeConstraint> constraints,
    const std::optional<FeatureId>& explicit_root = std::nullopt);

/// Root / VariationPoint (has children) / Variant (leaf).
FeatureKind feature_kind(const FeatureModel& model, const FeatureId& f);

/// Builds a configuration with `selected` True and the rest False (total)
/// or Undecided (partial). The root is forced True either way.
Configuration make_config(const FeatureModel& model,
                          const std::vector<FeatureId>& selected,
                          bool total);

}  // namespace fm
