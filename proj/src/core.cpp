#include "fm/core.hpp"

#include <algorithm>
#include <set>

namespace fm {

bool is_valid_feature_name(const std::string& name) {
    if (name.empty()) return false;
    auto head = [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
    };
    auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9') || c == '.'; };
    if (!head(name[0])) return false;
    return std::all_of(name.begin() + 1, name.end(), tail);
}

const char* relation_type_name(RelationType t) {
    switch (t) {
        case RelationType::Mandatory: return "mandatory";
        case RelationType::Optional: return "optional";
        case RelationType::Or: return "or";
        case RelationType::Alternative: return "alternative";
        case RelationType::OptionalOr: return "optional_or";
        case RelationType::OptionalAlternative: return "optional_alternative";
    }
    return "?";
}

bool is_group_type(RelationType t) {
    return t != RelationType::Mandatory && t != RelationType::Optional;
}

const char* constraint_kind_name(ConstraintKind k) {
    return k == ConstraintKind::Requires ? "requires" : "excludes";
}

const char* structural_error_kind_name(StructuralError::Kind k) {
    switch (k) {
        case StructuralError::Kind::DuplicateFeature: return "DuplicateFeature";
        case StructuralError::Kind::MultipleParents: return "MultipleParents";
        case StructuralError::Kind::NoRoot: return "NoRoot";
        case StructuralError::Kind::MultipleRoots: return "MultipleRoots";
        case StructuralError::Kind::Cycle: return "Cycle";
        case StructuralError::Kind::UnknownFeatureInConstraint: return "UnknownFeatureInConstraint";
        case StructuralError::Kind::HierarchicalConstraint: return "HierarchicalConstraint";
        case StructuralError::Kind::EmptyChildList: return "EmptyChildList";
        case StructuralError::Kind::BadGroupArity: return "BadGroupArity";
        case StructuralError::Kind::InvalidFeatureName: return "InvalidFeatureName";
    }
    return "?";
}

int FeatureModel::index_of(const FeatureId& f) const {
    auto it = index_.find(f);
    return it == index_.end() ? -1 : it->second;
}

int FeatureModel::incoming_relation(const FeatureId& f) const {
    int i = index_of(f);
    if (i < 0) throw Error(ErrorCode::UnknownFeature, "unknown feature '" + f + "'");
    return incoming_[static_cast<size_t>(i)];
}

std::optional<FeatureId> FeatureModel::parent_of(const FeatureId& f) const {
    int r = incoming_relation(f);
    if (r < 0) return std::nullopt;
    return relations[static_cast<size_t>(r)].parent;
}

bool FeatureModel::is_ancestor(const FeatureId& a, const FeatureId& b) const {
    auto p = parent_of(b);
    while (p) {
        if (*p == a) return true;
        p = parent_of(*p);
    }
    return false;
}

bool FeatureModel::operator==(const FeatureModel& other) const {
    auto rel_eq = [](const Relation& x, const Relation& y) {
        return x.id == y.id && x.parent == y.parent && x.children == y.children &&
               x.type == y.type;
    };
    auto con_eq = [](const CrossTreeConstraint& x, const CrossTreeConstraint& y) {
        return x.id == y.id && x.kind == y.kind && x.source == y.source &&
               x.target == y.target;
    };
    return name == other.name && root == other.root && features == other.features &&
           std::equal(relations.begin(), relations.end(), other.relations.begin(),
                      other.relations.end(), rel_eq) &&
           std::equal(constraints.begin(), constraints.end(), other.constraints.begin(),
                      other.constraints.end(), con_eq);
}

Truth Configuration::get(const FeatureId& f) const {
    int i = model->index_of(f);
    if (i < 0) throw Error(ErrorCode::UnknownFeature, "unknown feature '" + f + "'");
    return values[static_cast<size_t>(i)];
}

std::vector<FeatureId> Configuration::selected() const {
    std::vector<FeatureId> out;
    for (size_t i = 0; i < values.size(); ++i)
        if (values[i] == Truth::True) out.push_back(model->features[i]);
    return out;
}

namespace {

StructuralError err(StructuralError::Kind kind, std::string message,
                    FeatureId feature = {}, int relation_id = -1,
                    int constraint_id = -1) {
    return StructuralError{kind, std::move(message), std::move(feature), relation_id,
                           constraint_id};
}

}  // namespace

std::variant<FeatureModel, StructuralError> build_model(
    const std::string& name, std::vector<Relation> relations,
    std::vector<CrossTreeConstraint> constraints,
    const std::optional<FeatureId>& explicit_root) {
    using Kind = StructuralError::Kind;

    for (size_t i = 0; i < relations.size(); ++i) relations[i].id = static_cast<int>(i);
    for (size_t i = 0; i < constraints.size(); ++i)
        constraints[i].id = static_cast<int>(i);

    // Per-relation shape checks, in declaration order.
    for (const Relation& r : relations) {
        if (r.children.empty())
            return err(Kind::EmptyChildList,
                       "relation under '" + r.parent + "' has no children", r.parent,
                       r.id);
        if (!is_group_type(r.type) && r.children.size() != 1)
            return err(Kind::BadGroupArity,
                       std::string(relation_type_name(r.type)) + " relation under '" +
                           r.parent + "' must have exactly one child",
                       r.parent, r.id);
        if (is_group_type(r.type) && r.children.size() < 2)
            return err(Kind::BadGroupArity,
                       std::string(relation_type_name(r.type)) + " group under '" +
                           r.parent + "' needs at least two children",
                       r.parent, r.id);
        if (!is_valid_feature_name(r.parent))
            return err(Kind::InvalidFeatureName,
                       "invalid feature name '" + r.parent + "'", r.parent, r.id);
        std::set<FeatureId> seen;
        for (const FeatureId& c : r.children) {
            if (!is_valid_feature_name(c))
                return err(Kind::InvalidFeatureName, "invalid feature name '" + c + "'",
                           c, r.id);
            if (c == r.parent)
                return err(Kind::Cycle,
                           "'" + c + "' appears among its own children", c, r.id);
            if (!seen.insert(c).second)
                return err(Kind::DuplicateFeature,
                           "duplicate child '" + c + "' in one relation", c, r.id);
        }
    }

    // Feature declaration order: first appearance scanning relations.
    FeatureModel m;
    m.name = name;
    auto add_feature = [&m](const FeatureId& f) {
        if (m.index_.emplace(f, static_cast<int>(m.features.size())).second)
            m.features.push_back(f);
    };
    for (const Relation& r : relations) {
        add_feature(r.parent);
        for (const FeatureId& c : r.children) add_feature(c);
    }

    // Each feature may be the child of at most one relation.
    m.incoming_.assign(m.features.size(), -1);
    for (const Relation& r : relations) {
        for (const FeatureId& c : r.children) {
            int ci = m.index_of(c);
            int& in = m.incoming_[static_cast<size_t>(ci)];
            if (in >= 0)
                return err(Kind::MultipleParents,
                           "'" + c + "' is a child of both '" +
                               relations[static_cast<size_t>(in)].parent + "' and '" +
                               r.parent + "'",
                           c, r.id);
            in = r.id;
        }
    }

    // Root: the unique feature that is never a child.
    std::vector<FeatureId> root_candidates;
    for (size_t i = 0; i < m.features.size(); ++i)
        if (m.incoming_[i] < 0) root_candidates.push_back(m.features[i]);

    if (explicit_root && !is_valid_feature_name(*explicit_root))
        return err(Kind::InvalidFeatureName,
                   "invalid feature name '" + *explicit_root + "'", *explicit_root);

    if (relations.empty()) {
        if (!explicit_root)
            return err(Kind::NoRoot, "model declares no relations and no root");
        add_feature(*explicit_root);
        m.incoming_.assign(1, -1);
        m.root = *explicit_root;
    } else {
        if (root_candidates.empty())
            return err(Kind::Cycle, "every feature has a parent; the hierarchy is cyclic");
        if (root_candidates.size() > 1)
            return err(Kind::MultipleRoots,
                       "both '" + root_candidates[0] + "' and '" + root_candidates[1] +
                           "' lack a parent",
                       root_candidates[1]);
        m.root = root_candidates[0];
        if (explicit_root && *explicit_root != m.root)
            return err(Kind::MultipleRoots,
                       "declared root '" + *explicit_root +
                           "' disagrees with inferred root '" + m.root + "'",
                       *explicit_root);
    }

    m.relations = std::move(relations);
    m.constraints = std::move(constraints);

    // Reachability from the root; with single parents, anything unreached
    // sits on a cycle.
    {
        std::vector<char> reached(m.features.size(), 0);
        std::vector<int> stack{m.index_of(m.root)};
        reached[static_cast<size_t>(stack[0])] = 1;
        std::vector<std::vector<int>> children_of(m.features.size());
        for (const Relation& r : m.relations) {
            int pi = m.index_of(r.parent);
            for (const FeatureId& c : r.children)
                children_of[static_cast<size_t>(pi)].push_back(m.index_of(c));
        }
        while (!stack.empty()) {
            int f = stack.back();
            stack.pop_back();
            for (int c : children_of[static_cast<size_t>(f)]) {
                if (!reached[static_cast<size_t>(c)]) {
                    reached[static_cast<size_t>(c)] = 1;
                    stack.push_back(c);
                }
            }
        }
        for (size_t i = 0; i < m.features.size(); ++i)
            if (!reached[i]) {
                int rel = m.incoming_[i];
                return err(Kind::Cycle,
                           "'" + m.features[i] + "' is not reachable from root '" +
                               m.root + "'",
                           m.features[i], rel);
            }
    }

    // Cross-tree constraints: endpoints must exist and be hierarchy-unrelated.
    for (const CrossTreeConstraint& c : m.constraints) {
        if (!m.has_feature(c.source))
            return err(Kind::UnknownFeatureInConstraint,
                       "constraint references undeclared feature '" + c.source + "'",
                       c.source, -1, c.id);
        if (!m.has_feature(c.target))
            return err(Kind::UnknownFeatureInConstraint,
                       "constraint references undeclared feature '" + c.target + "'",
                       c.target, -1, c.id);
        if (c.source == c.target)
            return err(Kind::HierarchicalConstraint,
                       "constraint relates '" + c.source + "' to itself", c.source, -1,
                       c.id);
        if (m.is_ancestor(c.source, c.target) || m.is_ancestor(c.target, c.source))
            return err(Kind::HierarchicalConstraint,
                       "'" + c.source + "' and '" + c.target +
                           "' are related by the tree hierarchy",
                       c.source, -1, c.id);
    }

    return m;
}

FeatureKind feature_kind(const FeatureModel& model, const FeatureId& f) {
    int i = model.index_of(f);
    if (i < 0) throw Error(ErrorCode::UnknownFeature, "unknown feature '" + f + "'");
    if (f == model.root) return FeatureKind::Root;
    for (const Relation& r : model.relations)
        if (r.parent == f) return FeatureKind::VariationPoint;
    return FeatureKind::Variant;
}

Configuration make_config(const FeatureModel& model,
                          const std::vector<FeatureId>& selected, bool total) {
    Configuration cfg;
    cfg.model = &model;
    cfg.values.assign(model.features.size(),
                      total ? Truth::False : Truth::Undecided);
    for (const FeatureId& f : selected) {
        int i = model.index_of(f);
        if (i < 0) throw Error(ErrorCode::UnknownFeature, "unknown feature '" + f + "'");
        cfg.values[static_cast<size_t>(i)] = Truth::True;
    }
    cfg.values[static_cast<size_t>(model.index_of(model.root))] = Truth::True;
    cfg.total = std::none_of(cfg.values.begin(), cfg.values.end(),
                             [](Truth t) { return t == Truth::Undecided; });
    return cfg;
}

}  // namespace fm
