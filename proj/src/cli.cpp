#include "fm/cli.hpp"

#include <cstddef>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fm/analysis.hpp"
#include "fm/core.hpp"
#include "fm/dsl.hpp"
#include "fm/logic.hpp"
#include "fm/sat.hpp"

namespace fm {
namespace {

using nlohmann::ordered_json;

constexpr const char* kSchemaTag = "fm/1";
constexpr std::size_t kDefaultProductCap = 10000;

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Loads and parses a model file. On failure prints one
/// `file:line:column: kind: message` diagnostic per error and returns
/// nothing.
std::optional<FeatureModel> load_model(const std::string& path,
                                       std::ostream& err) {
    std::optional<std::string> text = read_file(path);
    if (!text) {
        err << "error: cannot open '" << path << "'\n";
        return std::nullopt;
    }
    ParseResult result = parse(*text);
    if (!result.ok()) {
        for (const ParseError& e : result.errors)
            err << path << ':' << e.span.line << ':' << e.span.column << ": "
                << parse_error_kind_name(e.kind) << ": " << e.message << '\n';
        return std::nullopt;
    }
    return result.model;
}

SemanticsMode mode_of(const std::string& name) {
    return name == "paper-literal" ? SemanticsMode::PaperLiteral
                                   : SemanticsMode::Strict;
}

/// `alternative(v: v1, v2)` / `requires(v2.3.1, v1.1)`.
std::string describe_element(const FeatureModel& m, ElementRef::Kind kind,
                             int id) {
    std::string s;
    if (kind == ElementRef::Kind::Relation) {
        const Relation& r = m.relations[static_cast<std::size_t>(id)];
        s = relation_type_name(r.type);
        s += '(';
        s += r.parent;
        s += ':';
        for (std::size_t i = 0; i < r.children.size(); ++i) {
            s += i == 0 ? " " : ", ";
            s += r.children[i];
        }
        s += ')';
    } else {
        const CrossTreeConstraint& c =
            m.constraints[static_cast<std::size_t>(id)];
        s = constraint_kind_name(c.kind);
        s += '(';
        s += c.source;
        s += ", ";
        s += c.target;
        s += ')';
    }
    return s;
}

ordered_json element_json(const FeatureModel& m, ElementRef::Kind kind,
                          int id) {
    ordered_json j;
    if (kind == ElementRef::Kind::Relation) {
        const Relation& r = m.relations[static_cast<std::size_t>(id)];
        j["kind"] = relation_type_name(r.type);
        j["parent"] = r.parent;
        j["children"] = r.children;
    } else {
        const CrossTreeConstraint& c =
            m.constraints[static_cast<std::size_t>(id)];
        j["kind"] = constraint_kind_name(c.kind);
        j["source"] = c.source;
        j["target"] = c.target;
    }
    return j;
}

ElementRef::Kind ref_kind(const Origin& origin) {
    return origin.kind == Origin::Kind::Constraint ? ElementRef::Kind::Constraint
                                                   : ElementRef::Kind::Relation;
}

void print_feature_list(std::ostream& out, const char* label,
                        const std::vector<FeatureId>& features) {
    out << label << ':';
    if (features.empty()) {
        out << " (none)";
    } else {
        for (const FeatureId& f : features) out << ' ' << f;
    }
    out << '\n';
}

std::string join_elements(const FeatureModel& m,
                          const std::vector<ElementRef>& refs) {
    std::string s;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        if (i > 0) s += "; ";
        s += describe_element(m, refs[i].kind, refs[i].id);
    }
    return s;
}

int cmd_check(const FeatureModel& m, SemanticsMode mode, std::ostream& out) {
    out << "model " << m.name << ": " << m.features.size() << " feature"
        << (m.features.size() == 1 ? "" : "s") << ", " << m.relations.size()
        << " relation" << (m.relations.size() == 1 ? "" : "s") << ", "
        << m.constraints.size() << " constraint"
        << (m.constraints.size() == 1 ? "" : "s") << '\n';
    bool satisfiable = !is_void(m, mode);
    out << "satisfiable: " << (satisfiable ? "yes" : "no") << '\n';
    return satisfiable ? 0 : 1;
}

int cmd_analyze(const FeatureModel& m, SemanticsMode mode, bool json,
                std::ostream& out) {
    ModelHealthReport report = health_report(m, mode);
    std::vector<ElementRef> void_explanation;
    std::vector<FeatureId> core;
    std::uint64_t products = 0;
    if (report.void_model) {
        void_explanation = explain(m, mode, ExplainTarget::void_model());
    } else {
        core = core_features(m, mode);
        products = count_products(m, mode);
    }

    std::vector<FeatureId> dead_set(report.dead.begin(), report.dead.end());
    auto is_dead = [&](const FeatureId& f) {
        for (const FeatureId& d : dead_set)
            if (d == f) return true;
        return false;
    };

    if (json) {
        ordered_json j;
        j["schema"] = kSchemaTag;
        j["model"] = m.name;
        ordered_json health;
        health["void"] = report.void_model;
        health["dead"] = report.dead;
        health["false_optional"] = report.false_optional;
        ordered_json explanations = ordered_json::array();
        if (report.void_model) {
            ordered_json entry;
            entry["status"] = "void";
            ordered_json elements = ordered_json::array();
            for (const ElementRef& e : void_explanation)
                elements.push_back(element_json(m, e.kind, e.id));
            entry["elements"] = elements;
            explanations.push_back(entry);
        }
        for (const auto& [feature, refs] : report.implicated) {
            ordered_json entry;
            entry["feature"] = feature;
            entry["status"] = is_dead(feature) ? "dead" : "false_optional";
            ordered_json elements = ordered_json::array();
            for (const ElementRef& e : refs)
                elements.push_back(element_json(m, e.kind, e.id));
            entry["elements"] = elements;
            explanations.push_back(entry);
        }
        health["explanations"] = explanations;
        j["health"] = health;
        j["core"] = core;
        j["count"] = products;
        out << j.dump(2) << '\n';
    } else {
        out << "model " << m.name << '\n';
        out << "void: " << (report.void_model ? "yes" : "no") << '\n';
        if (report.void_model) {
            out << "explanation: " << join_elements(m, void_explanation)
                << '\n';
        } else {
            print_feature_list(out, "dead", report.dead);
            print_feature_list(out, "false optional", report.false_optional);
            if (!report.implicated.empty()) {
                out << "explanations:\n";
                for (const auto& [feature, refs] : report.implicated)
                    out << "  " << feature << " ("
                        << (is_dead(feature) ? "dead" : "false optional")
                        << "): " << join_elements(m, refs) << '\n';
            }
            print_feature_list(out, "core", core);
            out << "products: " << products << '\n';
        }
    }
    return report.void_model || !report.dead.empty() ? 1 : 0;
}

int cmd_config_total(const FeatureModel& m, SemanticsMode mode,
                     const Configuration& config, bool json,
                     std::ostream& out) {
    ConfigVerdict verdict = check_config(m, config, mode);
    if (json) {
        ordered_json j;
        j["schema"] = kSchemaTag;
        j["model"] = m.name;
        ordered_json violations = ordered_json::array();
        for (const Violation& v : verdict.violations)
            violations.push_back(element_json(m, ref_kind(v.source), v.source.id));
        ordered_json inner;
        inner["valid"] = verdict.valid;
        inner["violations"] = violations;
        j["verdict"] = inner;
        out << j.dump(2) << '\n';
    } else {
        out << (verdict.valid ? "VALID" : "INVALID") << '\n';
        for (const Violation& v : verdict.violations)
            out << "violated: "
                << describe_element(m, ref_kind(v.source), v.source.id) << '\n';
    }
    return verdict.valid ? 0 : 1;
}

int cmd_config_partial(const FeatureModel& m, SemanticsMode mode,
                       const Configuration& config, bool json,
                       std::ostream& out) {
    PropagationResult result = propagate(m, config, mode);
    if (json) {
        ordered_json j;
        j["schema"] = kSchemaTag;
        j["model"] = m.name;
        ordered_json prop;
        prop["conflict"] = result.conflict;
        prop["forced_in"] = result.forced_in;
        prop["forced_out"] = result.forced_out;
        prop["free"] = result.free;
        j["propagation"] = prop;
        out << j.dump(2) << '\n';
    } else if (result.conflict) {
        out << "CONFLICT\n";
    } else {
        out << "CONSISTENT\n";
        print_feature_list(out, "forced in", result.forced_in);
        print_feature_list(out, "forced out", result.forced_out);
        print_feature_list(out, "free", result.free);
    }
    return result.conflict ? 1 : 0;
}

int cmd_products(const FeatureModel& m, SemanticsMode mode,
                 std::size_t limit, bool json, std::ostream& out,
                 std::ostream& err) {
    std::optional<std::size_t> cap;
    if (limit > 0) cap = limit;
    SolutionSet set = list_products(m, mode, cap);
    if (json) {
        ordered_json j;
        j["schema"] = kSchemaTag;
        j["model"] = m.name;
        ordered_json rows = ordered_json::array();
        for (std::size_t i = 0; i < set.size(); ++i)
            rows.push_back(set.selected_names(i));
        j["products"] = rows;
        j["truncated"] = set.truncated;
        out << j.dump(2) << '\n';
    } else {
        for (std::size_t i = 0; i < set.size(); ++i) {
            std::vector<std::string> names = set.selected_names(i);
            for (std::size_t k = 0; k < names.size(); ++k)
                out << (k == 0 ? "" : " ") << names[k];
            out << '\n';
        }
        if (set.truncated)
            err << "note: output truncated at " << set.size() << " products\n";
    }
    return 0;
}

int cmd_count(const FeatureModel& m, SemanticsMode mode, std::ostream& out) {
    out << count_products(m, mode) << '\n';
    return 0;
}

int cmd_export(const FeatureModel& m, SemanticsMode mode,
               const std::string& format, std::ostream& out) {
    if (format == "canonical")
        out << serialize(m);
    else if (format == "dot")
        out << export_dot(m);
    else if (format == "alloy")
        out << export_alloy(m);
    else
        out << dimacs_export(to_cnf(compile_model(m, mode), &m.features));
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"Feature-model analysis toolkit"};
    app.name("fm");
    app.require_subcommand(1);

    std::string path;
    std::string semantics = "strict";
    std::string format;
    std::vector<std::string> select;
    std::size_t limit = kDefaultProductCap;
    bool json = false;
    bool partial = false;

    auto add_common = [&](CLI::App* cmd, bool with_json) {
        cmd->add_option("file", path, "feature model file")->required();
        cmd->add_option("--semantics", semantics,
                        "relation semantics (strict | paper-literal)")
            ->check(CLI::IsMember({"strict", "paper-literal"}));
        if (with_json)
            cmd->add_flag("--json", json, "machine-readable JSON output");
    };

    CLI::App* check = app.add_subcommand(
        "check", "Parse and validate a model, then test satisfiability");
    add_common(check, false);

    CLI::App* analyze = app.add_subcommand(
        "analyze",
        "Report void/dead/false-optional features, core set, product count");
    add_common(analyze, true);

    CLI::App* config = app.add_subcommand(
        "config", "Check a feature selection against the model");
    add_common(config, true);
    config->add_option("--select", select, "comma-separated feature list")
        ->delimiter(',')
        ->required();
    config->add_flag("--partial", partial,
                     "treat the selection as partial and propagate "
                     "consequences instead of judging it");

    CLI::App* products =
        app.add_subcommand("products", "Enumerate products, one per line");
    add_common(products, true);
    products->add_option(
        "--limit", limit,
        "maximum number of products to list (0 = unlimited, default 10000)");

    CLI::App* count = app.add_subcommand("count", "Print the product count");
    add_common(count, false);

    CLI::App* export_cmd =
        app.add_subcommand("export", "Convert the model to another format");
    add_common(export_cmd, false);
    export_cmd
        ->add_option("--format", format,
                     "output format (dot | alloy | dimacs | canonical)")
        ->check(CLI::IsMember({"dot", "alloy", "dimacs", "canonical"}))
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        SemanticsMode mode = mode_of(semantics);
        std::optional<FeatureModel> model = load_model(path, err);
        if (!model) return 2;
        if (check->parsed()) return cmd_check(*model, mode, out);
        if (analyze->parsed()) return cmd_analyze(*model, mode, json, out);
        if (config->parsed()) {
            Configuration cfg = make_config(*model, select, !partial);
            return partial ? cmd_config_partial(*model, mode, cfg, json, out)
                           : cmd_config_total(*model, mode, cfg, json, out);
        }
        if (products->parsed())
            return cmd_products(*model, mode, limit, json, out, err);
        if (count->parsed()) return cmd_count(*model, mode, out);
        if (export_cmd->parsed()) return cmd_export(*model, mode, format, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

}  // namespace fm
