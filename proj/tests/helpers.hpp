#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fm/core.hpp"
#include "fm/dsl.hpp"

namespace fmtest {

inline fm::FeatureModel parse_model(const std::string& text) {
    fm::ParseResult r = fm::parse(text);
    if (!r.ok()) {
        std::string msg = "fixture did not parse:";
        for (const fm::ParseError& e : r.errors) msg += " " + e.message;
        throw std::runtime_error(msg);
    }
    return *std::move(r.model);
}

inline std::string model_path(const std::string& file) {
    return std::string(FM_MODEL_DIR) + "/" + file;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline fm::FeatureModel load_model(const std::string& file) {
    return parse_model(read_file(model_path(file)));
}

}  // namespace fmtest
