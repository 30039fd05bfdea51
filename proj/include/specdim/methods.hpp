#pragma once

// Method tags shared by the CLI, the Monte Carlo harness, and the
// estimation orchestrators.

#include <string>
#include <vector>

#include "errors.hpp"

namespace specdim {

enum class method_tag { tdrr, rre, re, bic, st };

inline std::string method_name(method_tag m) {
    switch (m) {
        case method_tag::tdrr: return "TDRR";
        case method_tag::rre: return "RRE";
        case method_tag::re: return "RE";
        case method_tag::bic: return "BIC";
        case method_tag::st: return "ST";
    }
    throw input_error("unknown method tag");
}

inline method_tag parse_method(const std::string& s) {
    if (s == "tdrr" || s == "TDRR") return method_tag::tdrr;
    if (s == "rre" || s == "RRE") return method_tag::rre;
    if (s == "re" || s == "RE") return method_tag::re;
    if (s == "bic" || s == "BIC") return method_tag::bic;
    if (s == "st" || s == "ST") return method_tag::st;
    throw input_error("unknown method '" + s + "' (expected tdrr, rre, re, bic, or st)");
}

// Parse a comma-separated method list, e.g. "tdrr,rre,bic".
inline std::vector<method_tag> parse_methods(const std::string& list) {
    std::vector<method_tag> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            out.push_back(parse_method(cur));
            cur.clear();
        }
    };
    for (char ch : list) {
        if (ch == ',') flush();
        else if (ch != ' ' && ch != '\t') cur.push_back(ch);
    }
    flush();
    if (out.empty()) throw input_error("method list is empty");
    return out;
}

// Numeric overrides threaded from the CLI / config into the criteria.
struct CriteriaOverrides {
    double c1 = -1.0;      // first ridge  (negative = use default)
    double c2 = -1.0;      // second ridge
    double tau = -1.0;     // threshold
    double alpha_n = -1.0; // penalty scale
    double rre_c = -1.0;   // ridge for the ratio argmin criterion
    int d_max = -1;        // ratio-criterion search bound
    double level = 0.05;   // sequential-test level
};

} // namespace specdim
