#include "fm/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace fm {

const char* parse_error_kind_name(ParseError::Kind k) {
    switch (k) {
        case ParseError::Kind::Lexical: return "lexical";
        case ParseError::Kind::Syntactic: return "syntax";
        case ParseError::Kind::Semantic: return "semantic";
    }
    return "syntax";
}

namespace {

struct Token {
    enum class Type { Ident, LBrace, RBrace, End };
    Type type = Type::End;
    std::string text;
    SourceSpan span;
};

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_part(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

std::pair<std::vector<Token>, std::vector<ParseError>> tokenize(
    const std::string& text) {
    std::vector<Token> tokens;
    std::vector<ParseError> errors;
    int line = 1, column = 1;
    size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') {
            ++line;
            column = 1;
            ++i;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++column;
            ++i;
            continue;
        }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') {
                ++i;
                ++column;
            }
            continue;
        }
        if (c == '{' || c == '}') {
            tokens.push_back({c == '{' ? Token::Type::LBrace : Token::Type::RBrace,
                              std::string(1, c), SourceSpan{line, column, 1}});
            ++column;
            ++i;
            continue;
        }
        if (ident_start(c)) {
            size_t start = i;
            int col = column;
            while (i < text.size() && ident_part(text[i])) {
                ++i;
                ++column;
            }
            tokens.push_back({Token::Type::Ident, text.substr(start, i - start),
                              SourceSpan{line, col, static_cast<int>(i - start)}});
            continue;
        }
        // one diagnostic per run of stray characters
        size_t start = i;
        int col = column;
        while (i < text.size()) {
            char d = text[i];
            if (d == '\n' || d == ' ' || d == '\t' || d == '\r' || d == '#' ||
                d == '{' || d == '}' || ident_start(d))
                break;
            ++i;
            ++column;
        }
        errors.push_back({ParseError::Kind::Lexical,
                          SourceSpan{line, col, static_cast<int>(i - start)},
                          std::string(i - start > 1 ? "unexpected characters '"
                                                    : "unexpected character '") +
                              text.substr(start, i - start) + "'"});
    }
    tokens.push_back({Token::Type::End, "", SourceSpan{line, column, 1}});
    return {std::move(tokens), std::move(errors)};
}

std::optional<RelationType> relation_type_from_name(const std::string& s) {
    static constexpr RelationType kAll[] = {
        RelationType::Mandatory,     RelationType::Optional,
        RelationType::Or,            RelationType::Alternative,
        RelationType::OptionalOr,    RelationType::OptionalAlternative,
    };
    for (RelationType t : kAll)
        if (s == relation_type_name(t)) return t;
    return std::nullopt;
}

struct RelDecl {
    Relation rel;
    SourceSpan kind_span;
    SourceSpan parent_span;
    std::vector<SourceSpan> child_spans;
};

struct ConDecl {
    CrossTreeConstraint con;
    SourceSpan source_span;
    SourceSpan kind_span;
    SourceSpan target_span;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    void run() {
        parse_header();
        parse_features();
        parse_constraints();
        if (!at_end()) error_at(peek(), "unexpected input after the model");
    }

    const std::vector<ParseError>& errors() const { return errors_; }
    const std::vector<RelDecl>& relations() const { return rels_; }
    const std::vector<ConDecl>& constraints() const { return cons_; }
    const std::string& model_name() const { return model_name_; }
    std::optional<FeatureId> root_name() const {
        if (root_decl_) return root_decl_->first;
        return std::nullopt;
    }

    std::set<FeatureId> declared_features() const {
        std::set<FeatureId> out;
        for (const RelDecl& d : rels_) {
            out.insert(d.rel.parent);
            out.insert(d.rel.children.begin(), d.rel.children.end());
        }
        if (root_decl_) out.insert(root_decl_->first);
        return out;
    }

    // Best source position for a structural error reported by build_model.
    SourceSpan locate(const StructuralError& e) const {
        if (e.constraint_id >= 0 &&
            e.constraint_id < static_cast<int>(cons_.size())) {
            const ConDecl& c = cons_[static_cast<size_t>(e.constraint_id)];
            if (!e.feature.empty() && e.feature == c.con.target &&
                e.feature != c.con.source)
                return c.target_span;
            return c.source_span;
        }
        if (e.relation_id >= 0 && e.relation_id < static_cast<int>(rels_.size())) {
            const RelDecl& r = rels_[static_cast<size_t>(e.relation_id)];
            int hits = 0;
            for (size_t i = 0; i < r.rel.children.size(); ++i)
                if (r.rel.children[i] == e.feature && ++hits == 2)
                    return r.child_spans[i];
            for (size_t i = 0; i < r.rel.children.size(); ++i)
                if (r.rel.children[i] == e.feature) return r.child_spans[i];
            if (e.feature == r.rel.parent) return r.parent_span;
            return r.kind_span;
        }
        if (!e.feature.empty()) {
            if (root_decl_ && root_decl_->first == e.feature)
                return root_decl_->second;
            auto it = first_occurrence_.find(e.feature);
            if (it != first_occurrence_.end()) return it->second;
        }
        return model_name_span_;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    bool at_end() const { return peek().type == Token::Type::End; }

    const Token& advance() {
        const Token& t = tokens_[pos_];
        if (t.type != Token::Type::End) ++pos_;
        return t;
    }

    bool check_keyword(const char* kw) const {
        return peek().type == Token::Type::Ident && peek().text == kw;
    }

    bool match_keyword(const char* kw) {
        if (!check_keyword(kw)) return false;
        advance();
        return true;
    }

    void error_at(const Token& t, std::string msg) {
        errors_.push_back({ParseError::Kind::Syntactic, t.span, std::move(msg)});
    }

    // Skip to the next line or to a closing brace, whichever comes first.
    void resync(int error_line) {
        while (!at_end() && peek().type != Token::Type::RBrace &&
               peek().span.line <= error_line)
            advance();
    }

    // Consume a balanced {...} block starting at the current '{'.
    void skip_braced_block() {
        if (peek().type != Token::Type::LBrace) return;
        int depth = 0;
        while (!at_end()) {
            const Token& t = advance();
            if (t.type == Token::Type::LBrace) ++depth;
            if (t.type == Token::Type::RBrace && --depth == 0) return;
        }
    }

    void note_occurrence(const Token& t) {
        first_occurrence_.emplace(t.text, t.span);
    }

    bool expect_lbrace(const char* where) {
        if (peek().type == Token::Type::LBrace) {
            advance();
            return true;
        }
        error_at(peek(), std::string("expected '{' ") + where);
        return false;
    }

    void expect_rbrace(const char* where) {
        if (peek().type == Token::Type::RBrace) {
            advance();
            return;
        }
        error_at(peek(), std::string("expected '}' ") + where);
    }

    void parse_header() {
        if (!match_keyword("model")) error_at(peek(), "expected 'model' to open the file");
        if (peek().type == Token::Type::Ident) {
            const Token& t = advance();
            model_name_ = t.text;
            model_name_span_ = t.span;
        } else {
            error_at(peek(), "expected a model name");
        }
        if (check_keyword("root")) {
            advance();
            if (peek().type == Token::Type::Ident) {
                const Token& t = advance();
                root_decl_ = {t.text, t.span};
                note_occurrence(t);
            } else {
                error_at(peek(), "expected a feature name after 'root'");
            }
        }
    }

    void parse_features() {
        if (!match_keyword("features")) {
            error_at(peek(), "expected 'features'");
            while (!at_end() && !check_keyword("features") &&
                   !check_keyword("constraints"))
                advance();
            if (!match_keyword("features")) return;
        }
        if (!expect_lbrace("after 'features'")) return;
        while (!at_end() && peek().type != Token::Type::RBrace) parse_node();
        expect_rbrace("to close the features block");
    }

    void parse_node() {
        if (peek().type != Token::Type::Ident) {
            error_at(peek(), "expected a feature name");
            if (peek().type == Token::Type::LBrace) {
                skip_braced_block();
            } else {
                const Token& bad = advance();
                resync(bad.span.line);
            }
            return;
        }
        Token parent = advance();
        note_occurrence(parent);
        if (!expect_lbrace("after the feature name")) {
            resync(parent.span.line);
            return;
        }
        bool any_group = false;
        bool any_tokens = false;
        while (!at_end() && peek().type != Token::Type::RBrace) {
            any_tokens = true;
            if (parse_group(parent)) any_group = true;
        }
        expect_rbrace("to close the feature block");
        if (!any_tokens && !any_group)
            error_at(parent, "feature '" + parent.text +
                                 "' has an empty block; declare a group or use "
                                 "the name only as a leaf");
    }

    bool parse_group(const Token& parent) {
        const Token& kind_tok = peek();
        if (kind_tok.type != Token::Type::Ident) {
            error_at(kind_tok, "expected a group kind");
            if (kind_tok.type == Token::Type::LBrace) {
                skip_braced_block();
            } else {
                advance();
                resync(kind_tok.span.line);
            }
            return false;
        }
        std::optional<RelationType> kind = relation_type_from_name(kind_tok.text);
        if (!kind) {
            error_at(kind_tok, "unknown group kind '" + kind_tok.text + "'");
            int line = kind_tok.span.line;
            advance();
            if (peek().type == Token::Type::LBrace)
                skip_braced_block();
            else
                resync(line);
            return false;
        }
        Token kind_copy = advance();
        if (!expect_lbrace("after the group kind")) {
            resync(kind_copy.span.line);
            return false;
        }
        std::vector<Token> children;
        while (peek().type == Token::Type::Ident) children.push_back(advance());
        if (children.empty()) {
            error_at(peek(), "group '" + kind_copy.text + "' lists no children");
            if (peek().type == Token::Type::RBrace)
                advance();
            else
                resync(kind_copy.span.line);
            return false;
        }
        expect_rbrace("to close the group");

        if (!is_group_type(*kind)) {
            for (const Token& child : children) {
                RelDecl d;
                d.rel = Relation{0, parent.text, {child.text}, *kind};
                d.kind_span = kind_copy.span;
                d.parent_span = parent.span;
                d.child_spans = {child.span};
                rels_.push_back(std::move(d));
                note_occurrence(child);
            }
        } else {
            RelDecl d;
            d.rel = Relation{0, parent.text, {}, *kind};
            d.kind_span = kind_copy.span;
            d.parent_span = parent.span;
            for (const Token& child : children) {
                d.rel.children.push_back(child.text);
                d.child_spans.push_back(child.span);
                note_occurrence(child);
            }
            rels_.push_back(std::move(d));
        }
        return true;
    }

    void parse_constraints() {
        if (!match_keyword("constraints")) return;
        if (!expect_lbrace("after 'constraints'")) return;
        while (!at_end() && peek().type != Token::Type::RBrace) parse_constraint();
        expect_rbrace("to close the constraints block");
    }

    void parse_constraint() {
        if (peek().type != Token::Type::Ident) {
            const Token& bad = advance();
            error_at(bad, "expected a feature name");
            resync(bad.span.line);
            return;
        }
        Token src = advance();
        if (!check_keyword("requires") && !check_keyword("excludes")) {
            error_at(peek(), "expected 'requires' or 'excludes'");
            resync(src.span.line);
            return;
        }
        Token kw = advance();
        if (peek().type != Token::Type::Ident) {
            error_at(peek(), "expected a feature name after '" + kw.text + "'");
            resync(kw.span.line);
            return;
        }
        Token tgt = advance();
        ConDecl d;
        d.con = CrossTreeConstraint{0,
                                    kw.text == "requires" ? ConstraintKind::Requires
                                                          : ConstraintKind::Excludes,
                                    src.text, tgt.text};
        d.source_span = src.span;
        d.kind_span = kw.span;
        d.target_span = tgt.span;
        cons_.push_back(std::move(d));
    }

    std::vector<Token> tokens_;
    size_t pos_ = 0;
    std::vector<ParseError> errors_;
    std::vector<RelDecl> rels_;
    std::vector<ConDecl> cons_;
    std::string model_name_;
    SourceSpan model_name_span_;
    std::optional<std::pair<FeatureId, SourceSpan>> root_decl_;
    std::map<FeatureId, SourceSpan> first_occurrence_;
};

}  // namespace

ParseResult parse(const std::string& text) {
    auto [tokens, lex_errors] = tokenize(text);
    Parser parser(std::move(tokens));
    parser.run();

    std::vector<ParseError> errors = std::move(lex_errors);
    errors.insert(errors.end(), parser.errors().begin(), parser.errors().end());
    std::stable_sort(errors.begin(), errors.end(),
                     [](const ParseError& a, const ParseError& b) {
                         if (a.span.line != b.span.line) return a.span.line < b.span.line;
                         return a.span.column < b.span.column;
                     });
    if (!errors.empty()) return {std::nullopt, std::move(errors)};

    std::set<FeatureId> declared = parser.declared_features();
    for (const ConDecl& c : parser.constraints()) {
        if (!declared.count(c.con.source))
            errors.push_back({ParseError::Kind::Semantic, c.source_span,
                              "unknown feature '" + c.con.source + "' in constraint"});
        if (!declared.count(c.con.target))
            errors.push_back({ParseError::Kind::Semantic, c.target_span,
                              "unknown feature '" + c.con.target + "' in constraint"});
    }
    if (!errors.empty()) return {std::nullopt, std::move(errors)};

    std::vector<Relation> relations;
    relations.reserve(parser.relations().size());
    for (const RelDecl& d : parser.relations()) relations.push_back(d.rel);
    std::vector<CrossTreeConstraint> constraints;
    constraints.reserve(parser.constraints().size());
    for (const ConDecl& d : parser.constraints()) constraints.push_back(d.con);

    auto built = build_model(parser.model_name(), std::move(relations),
                             std::move(constraints), parser.root_name());
    if (std::holds_alternative<StructuralError>(built)) {
        const StructuralError& e = std::get<StructuralError>(built);
        errors.push_back({ParseError::Kind::Semantic, parser.locate(e), e.message});
        return {std::nullopt, std::move(errors)};
    }
    return {std::move(std::get<FeatureModel>(built)), {}};
}

std::string serialize(const FeatureModel& m) {
    std::string out;
    out += "model " + m.name + "\n";
    out += "root " + m.root + "\n";
    if (m.relations.empty()) {
        out += "features { }\n";
    } else {
        out += "features {\n";
        size_t i = 0;
        while (i < m.relations.size()) {
            const FeatureId parent = m.relations[i].parent;
            out += "  " + parent + " {\n";
            while (i < m.relations.size() && m.relations[i].parent == parent) {
                const Relation& r = m.relations[i];
                out += "    ";
                out += relation_type_name(r.type);
                out += " {";
                if (!is_group_type(r.type)) {
                    RelationType t = r.type;
                    while (i < m.relations.size() && m.relations[i].parent == parent &&
                           m.relations[i].type == t) {
                        out += " " + m.relations[i].children[0];
                        ++i;
                    }
                } else {
                    for (const FeatureId& c : r.children) out += " " + c;
                    ++i;
                }
                out += " }\n";
            }
            out += "  }\n";
        }
        out += "}\n";
    }
    if (!m.constraints.empty()) {
        out += "constraints {\n";
        for (const CrossTreeConstraint& c : m.constraints)
            out += "  " + c.source +
                   (c.kind == ConstraintKind::Requires ? " requires " : " excludes ") +
                   c.target + "\n";
        out += "}\n";
    }
    return out;
}

namespace {

const char* group_edge_label(RelationType t) {
    switch (t) {
        case RelationType::Or: return "OR";
        case RelationType::Alternative: return "ALT";
        case RelationType::OptionalOr: return "OPT-OR";
        case RelationType::OptionalAlternative: return "OPT-ALT";
        default: return "";
    }
}

}  // namespace

std::string export_dot(const FeatureModel& m) {
    std::string out = "digraph \"" + m.name + "\" {\n";
    out += "  rankdir=TB;\n";
    out += "  node [shape=box, style=rounded];\n";
    for (const FeatureId& f : m.features) out += "  \"" + f + "\";\n";
    for (const Relation& r : m.relations) {
        std::string attrs;
        if (r.type == RelationType::Mandatory)
            attrs = "arrowhead=dot";
        else if (r.type == RelationType::Optional)
            attrs = "arrowhead=odot";
        else
            attrs = std::string("arrowhead=none, label=\"") +
                    group_edge_label(r.type) + "\"";
        for (const FeatureId& c : r.children)
            out += "  \"" + r.parent + "\" -> \"" + c + "\" [" + attrs + "];\n";
    }
    for (const CrossTreeConstraint& c : m.constraints)
        out += "  \"" + c.source + "\" -> \"" + c.target +
               "\" [style=dashed, constraint=false, label=\"" +
               (c.kind == ConstraintKind::Requires ? "requires" : "excludes") +
               "\"];\n";
    out += "}\n";
    return out;
}

namespace {

std::string mangle(const std::string& name) {
    std::string out = name;
    std::replace(out.begin(), out.end(), '.', '_');
    return out;
}

const char* alloy_type_name(RelationType t) {
    switch (t) {
        case RelationType::Mandatory: return "Mandatory";
        case RelationType::Optional: return "Optional";
        case RelationType::Or: return "OrFeature";
        case RelationType::Alternative: return "Alternative";
        case RelationType::OptionalOr: return "OptionalOr";
        case RelationType::OptionalAlternative: return "OptionalAlternative";
    }
    return "Mandatory";
}

}  // namespace

std::string export_alloy(const FeatureModel& m) {
    std::string out;
    out += "abstract sig Name { }\n";
    out += "abstract sig Type { }\n";
    out +=
        "one sig Mandatory, Optional, OrFeature, Alternative, "
        "OptionalAlternative, OptionalOr extends Type { }\n";
    out += "sig Relation {\n";
    out += "  type: one Type,\n";
    out += "  parent: one Name,\n";
    out += "  child: set Name\n";
    out += "}\n";
    out += "abstract sig FM {\n";
    out += "  features: set Name,\n";
    out += "  root: one Name,\n";
    out += "  relation: set Relation\n";
    out += "}\n";
    out += "\n";

    out += "one sig ";
    for (size_t i = 0; i < m.features.size(); ++i) {
        if (i) out += ", ";
        out += mangle(m.features[i]);
    }
    out += " extends Name { }\n";

    const std::string model_atom = mangle(m.name);
    out += "one sig " + model_atom + " extends FM { }\n";

    if (!m.relations.empty()) {
        out += "one sig ";
        for (size_t i = 0; i < m.relations.size(); ++i) {
            if (i) out += ", ";
            out += "c" + std::to_string(i + 1);
        }
        out += " extends Relation { }\n";
    }

    out += "\nfact elements {\n";
    out += "  " + model_atom + ".root = " + mangle(m.root) + "\n";
    out += "  " + model_atom + ".features = ";
    for (size_t i = 0; i < m.features.size(); ++i) {
        if (i) out += " + ";
        out += mangle(m.features[i]);
    }
    out += "\n";
    out += "  " + model_atom + ".relation = ";
    if (m.relations.empty()) {
        out += "none";
    } else {
        for (size_t i = 0; i < m.relations.size(); ++i) {
            if (i) out += " + ";
            out += "c" + std::to_string(i + 1);
        }
    }
    out += "\n}\n";

    if (!m.relations.empty()) {
        out += "\nfact relations {\n";
        for (size_t i = 0; i < m.relations.size(); ++i) {
            const Relation& r = m.relations[i];
            const std::string atom = "c" + std::to_string(i + 1);
            out += "  " + atom + ".type = " + alloy_type_name(r.type) + "\n";
            out += "  " + atom + ".parent = " + mangle(r.parent) + "\n";
            out += "  " + atom + ".child = ";
            for (size_t j = 0; j < r.children.size(); ++j) {
                if (j) out += " + ";
                out += mangle(r.children[j]);
            }
            out += "\n";
        }
        out += "}\n";
    }

    if (!m.constraints.empty()) {
        out += "\nabstract sig DependencyKind { }\n";
        out += "one sig Requires, Excludes extends DependencyKind { }\n";
        out += "sig Dependency {\n";
        out += "  kind: one DependencyKind,\n";
        out += "  source: one Name,\n";
        out += "  target: one Name\n";
        out += "}\n";
        out += "one sig ";
        for (size_t i = 0; i < m.constraints.size(); ++i) {
            if (i) out += ", ";
            out += "d" + std::to_string(i + 1);
        }
        out += " extends Dependency { }\n";
        out += "\nfact dependencies {\n";
        for (size_t i = 0; i < m.constraints.size(); ++i) {
            const CrossTreeConstraint& c = m.constraints[i];
            const std::string atom = "d" + std::to_string(i + 1);
            out += "  " + atom + ".kind = " +
                   (c.kind == ConstraintKind::Requires ? "Requires" : "Excludes") +
                   "\n";
            out += "  " + atom + ".source = " + mangle(c.source) + "\n";
            out += "  " + atom + ".target = " + mangle(c.target) + "\n";
        }
        out += "}\n";
    }
    return out;
}

}  // namespace fm
