#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fm/cli.hpp"
#include "fm/dsl.hpp"
#include "helpers.hpp"

namespace {

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun run(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"fm"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = fm::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string cad() { return fmtest::model_path("cad.fm"); }

std::string temp_model(const std::string& name, const std::string& text) {
    std::filesystem::path p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p.string();
}

}  // namespace

TEST_CASE("cli check") {
    CliRun r = run({"check", cad()});
    CHECK(r.code == 0);
    CHECK(r.out ==
          "model CAD_partial: 14 features, 7 relations, 2 constraints\n"
          "satisfiable: yes\n");
    CHECK(r.err.empty());

    SUBCASE("void models fail the check") {
        std::string path = temp_model(
            "fm_cli_void.fm",
            "model V features { r { mandatory { a b } } } "
            "constraints { a excludes b }\n");
        CliRun v = run({"check", path});
        CHECK(v.code == 1);
        CHECK(v.out ==
              "model V: 3 features, 2 relations, 1 constraint\n"
              "satisfiable: no\n");
    }
}

TEST_CASE("cli count") {
    CliRun r = run({"count", cad()});
    CHECK(r.code == 0);
    CHECK(r.out == "74\n");

    CliRun literal = run({"count", cad(), "--semantics", "paper-literal"});
    CHECK(literal.code == 0);
    CHECK(literal.out == "132\n");
}

TEST_CASE("cli config") {
    SUBCASE("valid selection") {
        CliRun r = run({"config", cad(), "--select",
                        "v1,v1.1,v2,v2.1,v2.3,v2.3.1,v2.4,v3,v3.2"});
        CHECK(r.code == 0);
        CHECK(r.out == "VALID\n");
    }
    SUBCASE("invalid selection lists both violated dependencies") {
        CliRun r = run({"config", cad(), "--select",
                        "v1,v1.2,v2,v2.3,v2.3.1,v2.4,v3,v3.1"});
        CHECK(r.code == 1);
        CHECK(r.out ==
              "INVALID\n"
              "violated: requires(v2.3.1, v1.1)\n"
              "violated: requires(v2.4, v3.2)\n");
    }
    SUBCASE("json verdict") {
        CliRun r = run({"config", cad(), "--select",
                        "v1,v1.2,v2,v2.3,v2.3.1,v2.4,v3,v3.1", "--json"});
        CHECK(r.code == 1);
        nlohmann::json j = nlohmann::json::parse(r.out);
        CHECK(j["schema"] == "fm/1");
        CHECK(j["model"] == "CAD_partial");
        CHECK(j["verdict"]["valid"] == false);
        REQUIRE(j["verdict"]["violations"].size() == 2);
        CHECK(j["verdict"]["violations"][0]["kind"] == "requires");
        CHECK(j["verdict"]["violations"][0]["source"] == "v2.3.1");
        CHECK(j["verdict"]["violations"][0]["target"] == "v1.1");
    }
    SUBCASE("partial mode propagates") {
        CliRun r = run({"config", cad(), "--select", "v2.4", "--partial"});
        CHECK(r.code == 0);
        CHECK(r.out ==
              "CONSISTENT\n"
              "forced in: v1 v2 v3 v3.2\n"
              "forced out: v3.1\n"
              "free: v1.1 v1.2 v2.1 v2.2 v2.3 v2.3.1 v2.3.2\n");
    }
    SUBCASE("partial conflicts exit nonzero") {
        CliRun r = run({"config", cad(), "--select", "v3.1,v3.2", "--partial"});
        CHECK(r.code == 1);
        CHECK(r.out == "CONFLICT\n");
    }
    SUBCASE("unknown features in the selection are usage errors") {
        CliRun r = run({"config", cad(), "--select", "ghost"});
        CHECK(r.code == 2);
        CHECK(r.out.empty());
        CHECK(r.err == "error: unknown feature 'ghost'\n");
    }
    SUBCASE("--select is required") {
        CliRun r = run({"config", cad()});
        CHECK(r.code == 2);
    }
}

TEST_CASE("cli analyze") {
    SUBCASE("healthy model") {
        CliRun r = run({"analyze", cad()});
        CHECK(r.code == 0);
        CHECK(r.out ==
              "model CAD_partial\n"
              "void: no\n"
              "dead: (none)\n"
              "false optional: (none)\n"
              "core: v v1 v2\n"
              "products: 74\n");
    }
    SUBCASE("pathological model exits nonzero and explains") {
        CliRun r = run({"analyze", fmtest::model_path("dead_subtree.fm")});
        CHECK(r.code == 1);
        CHECK(r.out.find("dead: v1 v1.1 v1.2\n") != std::string::npos);
        CHECK(r.out.find("false optional: v2\n") != std::string::npos);
        CHECK(r.out.find("  v1 (dead): alternative(v: v1, v2); "
                         "mandatory(v1: v1.2); requires(v1.2, v2)\n") !=
              std::string::npos);
    }
    SUBCASE("json health report") {
        CliRun r = run({"analyze", fmtest::model_path("excluded_variant.fm"),
                        "--json"});
        CHECK(r.code == 1);
        nlohmann::json j = nlohmann::json::parse(r.out);
        CHECK(j["schema"] == "fm/1");
        CHECK(j["health"]["void"] == false);
        CHECK(j["health"]["dead"] == nlohmann::json::array({"v2.1"}));
        CHECK(j["health"]["false_optional"] == nlohmann::json::array({"v2.2"}));
        CHECK(j["count"] == 1);
        REQUIRE(j["health"]["explanations"].size() == 2);
        CHECK(j["health"]["explanations"][0]["feature"] == "v2.1");
        CHECK(j["health"]["explanations"][0]["status"] == "dead");
        CHECK(j["health"]["explanations"][0]["elements"][1]["kind"] == "excludes");
    }
    SUBCASE("void model") {
        std::string path = temp_model(
            "fm_cli_void2.fm",
            "model V features { r { mandatory { a b } } } "
            "constraints { a excludes b }\n");
        CliRun r = run({"analyze", path});
        CHECK(r.code == 1);
        CHECK(r.out ==
              "model V\n"
              "void: yes\n"
              "explanation: mandatory(r: a); mandatory(r: b); excludes(a, b)\n");
    }
}

TEST_CASE("cli products") {
    CliRun r = run({"products", fmtest::model_path("forced_optional.fm")});
    CHECK(r.code == 0);
    CHECK(r.out == "r a v2\n");
    CHECK(r.err.empty());

    SUBCASE("limit plus truncation note") {
        CliRun t = run({"products", cad(), "--limit", "3"});
        CHECK(t.code == 0);
        CHECK(t.err == "note: output truncated at 3 products\n");
        std::size_t lines = 0;
        for (char c : t.out)
            if (c == '\n') ++lines;
        CHECK(lines == 3);
    }
    SUBCASE("json products") {
        CliRun j = run({"products", fmtest::model_path("forced_optional.fm"),
                        "--json"});
        nlohmann::json doc = nlohmann::json::parse(j.out);
        CHECK(doc["schema"] == "fm/1");
        CHECK(doc["products"] ==
              nlohmann::json::array({nlohmann::json::array({"r", "a", "v2"})}));
        CHECK(doc["truncated"] == false);
    }
}

TEST_CASE("cli export") {
    fm::FeatureModel m = fmtest::load_model("cad.fm");
    CliRun canonical = run({"export", cad(), "--format", "canonical"});
    CHECK(canonical.code == 0);
    CHECK(canonical.out == fm::serialize(m));

    CliRun dot = run({"export", cad(), "--format", "dot"});
    CHECK(dot.code == 0);
    CHECK(dot.out == fm::export_dot(m));

    CliRun alloy = run({"export", cad(), "--format", "alloy"});
    CHECK(alloy.code == 0);
    CHECK(alloy.out == fm::export_alloy(m));

    CliRun dimacs = run({"export", cad(), "--format", "dimacs"});
    CHECK(dimacs.code == 0);
    CHECK(dimacs.out.find("p cnf ") != std::string::npos);
    CHECK(dimacs.out.find("c 1 v\n") == 0);

    SUBCASE("format is validated") {
        CliRun bad = run({"export", cad(), "--format", "yaml"});
        CHECK(bad.code == 2);
    }
}

TEST_CASE("cli failure modes") {
    SUBCASE("missing file") {
        CliRun r = run({"check", "/nonexistent/path.fm"});
        CHECK(r.code == 2);
        CHECK(r.out.empty());
        CHECK(r.err == "error: cannot open '/nonexistent/path.fm'\n");
    }
    SUBCASE("parse errors carry positions") {
        std::string path = temp_model("fm_cli_bad.fm",
                                      "model B\nfeatures { r { mandatory { } } }\n");
        CliRun r = run({"check", path});
        CHECK(r.code == 2);
        CHECK(r.err ==
              path + ":2:28: syntax: group 'mandatory' lists no children\n");
    }
    SUBCASE("missing subcommand") {
        CliRun r = run({});
        CHECK(r.code == 2);
    }
    SUBCASE("unknown subcommand") {
        CliRun r = run({"frobnicate", cad()});
        CHECK(r.code == 2);
    }
    SUBCASE("bad semantics value") {
        CliRun r = run({"count", cad(), "--semantics", "loose"});
        CHECK(r.code == 2);
    }
    SUBCASE("help exits zero") {
        CliRun r = run({"--help"});
        CHECK(r.code == 0);
        CHECK(r.out.find("Subcommands") != std::string::npos);
    }
}

TEST_CASE("cli output is deterministic") {
    for (const std::vector<std::string>& args :
         {std::vector<std::string>{"analyze", cad()},
          std::vector<std::string>{"analyze", cad(), "--json"},
          std::vector<std::string>{"products", cad(), "--limit", "10"},
          std::vector<std::string>{"export", cad(), "--format", "dimacs"}}) {
        CliRun a = run(args);
        CliRun b = run(args);
        CHECK(a.code == b.code);
        CHECK(a.out == b.out);
        CHECK(a.err == b.err);
    }
}
