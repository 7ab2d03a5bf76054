#include "doctest.h"

#include <string>
#include <vector>

#include "fm/core.hpp"
#include "fm/dsl.hpp"
#include "helpers.hpp"
#include "model_gen.hpp"

using namespace fm;

TEST_CASE("parsing the CAD fixture") {
    FeatureModel m = fmtest::load_model("cad.fm");

    CHECK(m.name == "CAD_partial");
    CHECK(m.root == "v");
    CHECK(m.feature_count() == 14);
    CHECK(m.features ==
          std::vector<FeatureId>{"v", "v1", "v2", "v3", "v1.1", "v1.2", "v2.1",
                                 "v2.2", "v2.3", "v2.4", "v2.3.1", "v2.3.2",
                                 "v3.1", "v3.2"});
    REQUIRE(m.relations.size() == 7);
    CHECK(m.relations[0].type == RelationType::Mandatory);
    CHECK(m.relations[0].children == std::vector<FeatureId>{"v1"});
    CHECK(m.relations[1].type == RelationType::Mandatory);
    CHECK(m.relations[1].children == std::vector<FeatureId>{"v2"});
    CHECK(m.relations[2].type == RelationType::Optional);
    CHECK(m.relations[3].type == RelationType::Alternative);
    CHECK(m.relations[4].type == RelationType::Or);
    CHECK(m.relations[4].children ==
          std::vector<FeatureId>{"v2.1", "v2.2", "v2.3", "v2.4"});
    REQUIRE(m.constraints.size() == 2);
    CHECK(m.constraints[0].kind == ConstraintKind::Requires);
    CHECK(m.constraints[0].source == "v2.3.1");
    CHECK(m.constraints[0].target == "v1.1");
    CHECK(m.constraints[1].source == "v2.4");
    CHECK(m.constraints[1].target == "v3.2");
}

TEST_CASE("grammar corners") {
    SUBCASE("single-feature model via an explicit root line") {
        FeatureModel m =
            fmtest::parse_model("model Tiny\nroot only_one\nfeatures { }\n");
        CHECK(m.root == "only_one");
        CHECK(m.feature_count() == 1);
    }
    SUBCASE("constraints block may be omitted") {
        FeatureModel m =
            fmtest::parse_model("model M features { r { optional { a } } }");
        CHECK(m.constraints.empty());
    }
    SUBCASE("comments run to end of line") {
        FeatureModel m = fmtest::parse_model(
            "# heading\nmodel M # trailing\nfeatures { # here too\n"
            "  r { mandatory { a } }\n}\n");
        CHECK(m.feature_count() == 2);
    }
    SUBCASE("keywords are contextual and usable as feature names") {
        FeatureModel m = fmtest::parse_model(
            "model model features { model { mandatory { constraints } } }");
        CHECK(m.root == "model");
        CHECK(m.has_feature("constraints"));
    }
    SUBCASE("a feature may be described by several blocks") {
        FeatureModel m = fmtest::parse_model(
            "model M features { r { mandatory { a } } r { optional { b } } }");
        CHECK(m.relations.size() == 2);
        CHECK(m.relations[1].type == RelationType::Optional);
    }
    SUBCASE("all six relation kinds parse") {
        FeatureModel m = fmtest::parse_model(
            "model M features {\n"
            "  r { mandatory { a } optional { b } or { c d } alternative { e f }\n"
            "      optional_or { g h } optional_alternative { i j } }\n"
            "}");
        REQUIRE(m.relations.size() == 6);
        CHECK(m.relations[2].type == RelationType::Or);
        CHECK(m.relations[4].type == RelationType::OptionalOr);
        CHECK(m.relations[5].type == RelationType::OptionalAlternative);
    }
    SUBCASE("multi-child mandatory and optional expand per child") {
        FeatureModel m = fmtest::parse_model(
            "model M features { r { mandatory { a b } optional { c d } } }");
        REQUIRE(m.relations.size() == 4);
        CHECK(m.relations[0].children == std::vector<FeatureId>{"a"});
        CHECK(m.relations[1].children == std::vector<FeatureId>{"b"});
        CHECK(m.relations[2].type == RelationType::Optional);
        CHECK(m.relations[3].children == std::vector<FeatureId>{"d"});
    }
}

TEST_CASE("diagnostics") {
    SUBCASE("missing model header") {
        ParseResult r = parse("features { }");
        CHECK_FALSE(r.ok());
        REQUIRE_FALSE(r.errors.empty());
        CHECK(r.errors[0].kind == ParseError::Kind::Syntactic);
    }
    SUBCASE("unknown group kinds are reported without cascading") {
        ParseResult r = parse(
            "model E\nfeatures { r { s }\n  s { bogus { } }\n}\n"
            "constraints { x requires r }\n");
        REQUIRE(r.errors.size() == 2);
        CHECK(r.errors[0].span.line == 2);
        CHECK(r.errors[0].span.column == 16);
        CHECK(r.errors[0].message == "unknown group kind 's'");
        CHECK(r.errors[1].span.line == 3);
        CHECK(r.errors[1].message == "unknown group kind 'bogus'");
    }
    SUBCASE("empty group") {
        ParseResult r = parse("model B\nfeatures { r { mandatory { } } }\n");
        REQUIRE(r.errors.size() == 1);
        CHECK(r.errors[0].kind == ParseError::Kind::Syntactic);
        CHECK(r.errors[0].span.line == 2);
        CHECK(r.errors[0].message == "group 'mandatory' lists no children");
    }
    SUBCASE("empty feature block") {
        ParseResult r = parse("model B features { r { } }");
        REQUIRE(r.errors.size() == 1);
        CHECK(r.errors[0].message ==
              "feature 'r' has an empty block; declare a group or use the "
              "name only as a leaf");
    }
    SUBCASE("stray characters are coalesced into one lexical error") {
        ParseResult r = parse("model M features { r { mandatory { a%%$ } } }");
        REQUIRE(r.errors.size() == 1);
        CHECK(r.errors[0].kind == ParseError::Kind::Lexical);
        CHECK(r.errors[0].span.length == 3);
    }
    SUBCASE("lexical and syntactic errors merge sorted by position") {
        ParseResult r =
            parse("model M\nfeatures { r { ? } }\nconstraints { a requires }\n");
        REQUIRE(r.errors.size() >= 2);
        for (std::size_t i = 1; i < r.errors.size(); ++i) {
            bool ordered =
                r.errors[i - 1].span.line < r.errors[i].span.line ||
                (r.errors[i - 1].span.line == r.errors[i].span.line &&
                 r.errors[i - 1].span.column <= r.errors[i].span.column);
            CHECK(ordered);
        }
    }
    SUBCASE("every unknown constraint endpoint is reported") {
        ParseResult r = parse(
            "model M features { r { mandatory { a } } }\n"
            "constraints { ghost1 requires a\n a excludes ghost2 }\n");
        REQUIRE(r.errors.size() == 2);
        CHECK(r.errors[0].kind == ParseError::Kind::Semantic);
        CHECK(r.errors[0].message == "unknown feature 'ghost1' in constraint");
        CHECK(r.errors[1].message == "unknown feature 'ghost2' in constraint");
        CHECK(r.errors[1].span.line == 3);
    }
    SUBCASE("structural problems map back to source spans") {
        ParseResult dup = parse("model D features { r { or { a a } } }");
        REQUIRE(dup.errors.size() == 1);
        CHECK(dup.errors[0].kind == ParseError::Kind::Semantic);
        CHECK(dup.errors[0].span.line == 1);
        CHECK(dup.errors[0].span.column == 31);  // the second `a`

        ParseResult multi = parse(
            "model D features { r { mandatory { a b } } a { optional { b } } }");
        REQUIRE(multi.errors.size() == 1);
        CHECK(multi.errors[0].kind == ParseError::Kind::Semantic);
        CHECK(multi.errors[0].message.find("child of both") != std::string::npos);

        ParseResult hier = parse(
            "model D features { r { mandatory { a } } }\n"
            "constraints { r requires a }\n");
        REQUIRE(hier.errors.size() == 1);
        CHECK(hier.errors[0].span.line == 2);
    }
    SUBCASE("ok() is true exactly when a model was produced") {
        CHECK(parse("model M features { r { optional { a } } }").ok());
        ParseResult bad = parse("model M features { r { optional { } } }");
        CHECK_FALSE(bad.ok());
        CHECK_FALSE(bad.model.has_value());
    }
}

TEST_CASE("canonical serialization") {
    SUBCASE("CAD golden") {
        FeatureModel m = fmtest::load_model("cad.fm");
        CHECK(serialize(m) ==
              "model CAD_partial\n"
              "root v\n"
              "features {\n"
              "  v {\n"
              "    mandatory { v1 v2 }\n"
              "    optional { v3 }\n"
              "  }\n"
              "  v1 {\n"
              "    alternative { v1.1 v1.2 }\n"
              "  }\n"
              "  v2 {\n"
              "    or { v2.1 v2.2 v2.3 v2.4 }\n"
              "  }\n"
              "  v2.3 {\n"
              "    alternative { v2.3.1 v2.3.2 }\n"
              "  }\n"
              "  v3 {\n"
              "    alternative { v3.1 v3.2 }\n"
              "  }\n"
              "}\n"
              "constraints {\n"
              "  v2.3.1 requires v1.1\n"
              "  v2.4 requires v3.2\n"
              "}\n");
    }
    SUBCASE("single-feature golden") {
        FeatureModel m =
            fmtest::parse_model("model Tiny\nroot only_one\nfeatures { }\n");
        CHECK(serialize(m) == "model Tiny\nroot only_one\nfeatures { }\n");
    }
    SUBCASE("adjacent same-kind singleton relations coalesce") {
        FeatureModel m = fmtest::parse_model(
            "model M features { r { mandatory { a } mandatory { b } "
            "optional { c } mandatory { d } } a { or { x y } } }");
        CHECK(serialize(m) ==
              "model M\n"
              "root r\n"
              "features {\n"
              "  r {\n"
              "    mandatory { a b }\n"
              "    optional { c }\n"
              "    mandatory { d }\n"
              "  }\n"
              "  a {\n"
              "    or { x y }\n"
              "  }\n"
              "}\n");
    }
    SUBCASE("round-trip is the identity on the corpus") {
        for (const char* file : {"cad.fm", "dead_subtree.fm", "forced_optional.fm",
                                 "excluded_variant.fm"}) {
            CAPTURE(file);
            FeatureModel m = fmtest::load_model(file);
            FeatureModel again = fmtest::parse_model(serialize(m));
            CHECK(m == again);
            CHECK(serialize(m) == serialize(again));
        }
    }
    SUBCASE("round-trip is the identity on generated models") {
        fmtest::ModelGen gen(7);
        for (int i = 0; i < 200; ++i) {
            FeatureModel m = gen.next("rt" + std::to_string(i));
            FeatureModel again = fmtest::parse_model(serialize(m));
            REQUIRE(m == again);
            REQUIRE(serialize(m) == serialize(again));
        }
    }
}

TEST_CASE("DOT export") {
    FeatureModel m = fmtest::load_model("excluded_variant.fm");
    CHECK(export_dot(m) ==
          "digraph \"excluded_variant\" {\n"
          "  rankdir=TB;\n"
          "  node [shape=box, style=rounded];\n"
          "  \"r\";\n"
          "  \"m\";\n"
          "  \"v2.1\";\n"
          "  \"v2.2\";\n"
          "  \"r\" -> \"m\" [arrowhead=dot];\n"
          "  \"r\" -> \"v2.1\" [arrowhead=none, label=\"OR\"];\n"
          "  \"r\" -> \"v2.2\" [arrowhead=none, label=\"OR\"];\n"
          "  \"m\" -> \"v2.1\" [style=dashed, constraint=false, "
          "label=\"excludes\"];\n"
          "}\n");

    SUBCASE("edge decorations cover all relation kinds") {
        FeatureModel all = fmtest::parse_model(
            "model M features {\n"
            "  r { optional { o } alternative { a b } optional_or { c d }\n"
            "      optional_alternative { e f } }\n"
            "}");
        std::string dot = export_dot(all);
        CHECK(dot.find("[arrowhead=odot]") != std::string::npos);
        CHECK(dot.find("label=\"ALT\"") != std::string::npos);
        CHECK(dot.find("label=\"OPT-OR\"") != std::string::npos);
        CHECK(dot.find("label=\"OPT-ALT\"") != std::string::npos);
    }
    SUBCASE("requires edges are dashed and labeled") {
        FeatureModel cad = fmtest::load_model("cad.fm");
        std::string dot = export_dot(cad);
        CHECK(dot.find("\"v2.3.1\" -> \"v1.1\" [style=dashed, constraint=false, "
                       "label=\"requires\"];") != std::string::npos);
    }
}

TEST_CASE("Alloy export") {
    FeatureModel m = fmtest::load_model("forced_optional.fm");
    std::string alloy = export_alloy(m);
    CHECK(alloy ==
          "abstract sig Name { }\n"
          "abstract sig Type { }\n"
          "one sig Mandatory, Optional, OrFeature, Alternative, "
          "OptionalAlternative, OptionalOr extends Type { }\n"
          "sig Relation {\n"
          "  type: one Type,\n"
          "  parent: one Name,\n"
          "  child: set Name\n"
          "}\n"
          "abstract sig FM {\n"
          "  features: set Name,\n"
          "  root: one Name,\n"
          "  relation: set Relation\n"
          "}\n"
          "\n"
          "one sig r, a, v2 extends Name { }\n"
          "one sig forced_optional extends FM { }\n"
          "one sig c1, c2 extends Relation { }\n"
          "\n"
          "fact elements {\n"
          "  forced_optional.root = r\n"
          "  forced_optional.features = r + a + v2\n"
          "  forced_optional.relation = c1 + c2\n"
          "}\n"
          "\n"
          "fact relations {\n"
          "  c1.type = Mandatory\n"
          "  c1.parent = r\n"
          "  c1.child = a\n"
          "  c2.type = Optional\n"
          "  c2.parent = r\n"
          "  c2.child = v2\n"
          "}\n"
          "\n"
          "abstract sig DependencyKind { }\n"
          "one sig Requires, Excludes extends DependencyKind { }\n"
          "sig Dependency {\n"
          "  kind: one DependencyKind,\n"
          "  source: one Name,\n"
          "  target: one Name\n"
          "}\n"
          "one sig d1 extends Dependency { }\n"
          "\n"
          "fact dependencies {\n"
          "  d1.kind = Requires\n"
          "  d1.source = a\n"
          "  d1.target = v2\n"
          "}\n");

    SUBCASE("dotted names are mangled; relation ordinals follow declaration") {
        FeatureModel cad = fmtest::load_model("cad.fm");
        std::string a = export_alloy(cad);
        CHECK(a.find("v2_3_1") != std::string::npos);
        CHECK(a.find("v2.3.1") == std::string::npos);
        CHECK(a.find("c1.type = Mandatory\n") != std::string::npos);
        CHECK(a.find("c3.type = Optional\n") != std::string::npos);
        CHECK(a.find("c4.type = Alternative\n") != std::string::npos);
        CHECK(a.find("c5.type = OrFeature\n") != std::string::npos);
        CHECK(a.find("d2.kind = Requires\n") != std::string::npos);
    }
    SUBCASE("models without constraints omit the dependency block") {
        FeatureModel plain =
            fmtest::parse_model("model P features { r { optional { a } } }");
        std::string a = export_alloy(plain);
        CHECK(a.find("Dependency") == std::string::npos);
    }
}
