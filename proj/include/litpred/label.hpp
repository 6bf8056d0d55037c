#pragma once

// Node labels: syntactic category, optional function tag, morphological
// features in square brackets, and percolated features after colons.
// Examples: "SMAIN-sat:inf:pv", "WW[pv]-hd", "NP-su", "LET".

#include <string>
#include <string_view>
#include <vector>

#include "litpred/common.hpp"

namespace litpred {

// Introduced by binarization; must not occur in input labels.
inline constexpr char kMarkovSeparator = '|';

struct Label {
    std::string category;
    std::string function;                  // empty = no function tag
    std::vector<std::string> morph;        // e.g. {"inf", "vrij"}
    std::vector<std::string> percolated;   // features after the first colon

    bool operator==(const Label&) const = default;

    bool is_markov() const { return category.find(kMarkovSeparator) != std::string::npos; }

    std::string format() const {
        std::string out = category;
        if (!morph.empty()) {
            out += '[';
            for (size_t i = 0; i < morph.size(); ++i) {
                if (i) out += ',';
                out += morph[i];
            }
            out += ']';
        }
        if (!function.empty()) {
            out += '-';
            out += function;
        }
        for (const auto& p : percolated) {
            out += ':';
            out += p;
        }
        return out;
    }
};

// Grammar: category ('[' morph (',' morph)* ']')? ('-' function)? (':' feat)*
// `where` names the input line for error messages.
inline Label parse_label(std::string_view token, std::string_view where = {}) {
    auto fail = [&](const std::string& msg) -> Label {
        std::string ctx = where.empty() ? std::string() : " in " + std::string(where);
        throw FormatError("bad label '" + std::string(token) + "': " + msg + ctx);
    };
    if (token.empty()) return fail("empty label");

    Label label;
    size_t colon = token.find(':');
    std::string_view head = token.substr(0, colon);
    if (colon != std::string_view::npos) {
        for (auto part : split(token.substr(colon + 1), ':')) {
            if (part.empty()) return fail("empty percolated feature");
            label.percolated.emplace_back(part);
        }
    }

    size_t bracket = head.find('[');
    std::string_view after_morph = head;
    if (bracket != std::string_view::npos) {
        size_t close = head.find(']', bracket);
        if (close == std::string_view::npos) return fail("unterminated '['");
        for (auto part : split(head.substr(bracket + 1, close - bracket - 1), ',')) {
            if (part.empty()) return fail("empty morph feature");
            label.morph.emplace_back(part);
        }
        label.category.assign(head.substr(0, bracket));
        after_morph = head.substr(close + 1);
        if (!after_morph.empty() && after_morph.front() != '-')
            return fail("unexpected text after ']'");
    } else {
        size_t dash = head.find('-');
        label.category.assign(head.substr(0, dash));
        after_morph = dash == std::string_view::npos ? std::string_view{} : head.substr(dash);
    }
    if (!after_morph.empty()) {
        // after_morph starts with '-': the function tag.
        label.function.assign(after_morph.substr(1));
        if (label.function.empty()) return fail("empty function tag");
    }
    if (label.category.empty()) return fail("empty category");
    return label;
}

}  // namespace litpred
