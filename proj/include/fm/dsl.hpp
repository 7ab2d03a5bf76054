#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fm/core.hpp"

namespace fm {

struct SourceSpan {
    int line = 1;
    int column = 1;
    int length = 1;
};

struct ParseError {
    enum class Kind { Lexical, Syntactic, Semantic };
    Kind kind = Kind::Syntactic;
    SourceSpan span;
    std::string message;
};

const char* parse_error_kind_name(ParseError::Kind k);

struct ParseResult {
    std::optional<FeatureModel> model;
    std::vector<ParseError> errors;

    bool ok() const { return model.has_value(); }
};

// Grammar:
//   model        = "model" IDENT [ "root" IDENT ] featureblock [constraintblock] ;
//   featureblock = "features" "{" { node } "}" ;
//   node         = IDENT "{" group { group } "}" ;
//   group        = kind "{" IDENT { IDENT } "}" ;
//   kind         = "mandatory" | "optional" | "or" | "alternative"
//                | "optional_or" | "optional_alternative" ;
//   constraintblock = "constraints" "{" { constraint } "}" ;
//   constraint   = IDENT ("requires" | "excludes") IDENT ;
//   IDENT        = letter_or_underscore { letter | digit | "_" | "." } ;
// Comments run from '#' to end of line. Keywords are contextual, so they
// remain usable as feature names. A multi-name mandatory or optional group
// expands to one relation per child.
ParseResult parse(const std::string& text);

// Canonical form: root line always present, one group per line, two-space
// indentation, adjacent same-kind mandatory/optional relations coalesced.
// parse(serialize(m)) == m for every valid model.
std::string serialize(const FeatureModel& m);

// Graphviz rendering: filled-dot arrowheads for mandatory edges, open-dot
// for optional, labeled fan edges for groups, dashed labeled constraint
// edges.
std::string export_dot(const FeatureModel& m);

// Structural schema text for the Alloy analyzer; dots in names become
// underscores since Alloy identifiers cannot contain them.
std::string export_alloy(const FeatureModel& m);

}  // namespace fm
