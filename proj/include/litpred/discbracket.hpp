#pragma once

// One tree per line, bracketed, with index=word leaves:
//   (S (NP-su (N-hd 0=boek)) (WW[pv]-hd 1=ligt))
// Terminal indices are absolute sentence positions, so non-contiguous
// yields (discontinuous constituents) are representable.

#include <string>
#include <string_view>
#include <vector>

#include "litpred/common.hpp"
#include "litpred/tree.hpp"

namespace litpred {

namespace detail {

inline void fail_at(std::string_view line, size_t pos, const std::string& msg) {
    throw FormatError(msg + " at position " + std::to_string(pos) + " in line: " +
                      std::string(line.substr(0, 120)));
}

inline void skip_spaces(std::string_view s, size_t& pos) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
}

inline std::string_view next_token(std::string_view s, size_t& pos) {
    size_t start = pos;
    while (pos < s.size() && s[pos] != ' ' && s[pos] != '\t' && s[pos] != '(' && s[pos] != ')')
        ++pos;
    return s.substr(start, pos - start);
}

inline TreeNode parse_node(std::string_view line, size_t& pos) {
    if (pos >= line.size() || line[pos] != '(') fail_at(line, pos, "expected '('");
    ++pos;
    skip_spaces(line, pos);
    std::string_view label_token = next_token(line, pos);
    if (label_token.empty()) fail_at(line, pos, "empty label");
    if (label_token.find(kMarkovSeparator) != std::string_view::npos)
        fail_at(line, pos, "reserved character '|' in input label");

    TreeNode node;
    node.label = parse_label(label_token, line.substr(0, 60));
    skip_spaces(line, pos);
    while (pos < line.size() && line[pos] != ')') {
        if (line[pos] == '(') {
            node.children.push_back(parse_node(line, pos));
        } else {
            std::string_view tok = next_token(line, pos);
            size_t eq = tok.find('=');
            if (eq == std::string_view::npos || eq == 0)
                fail_at(line, pos, "leaf token must have the form index=word");
            TreeNode leaf;
            leaf.index = static_cast<int>(parse_long(tok.substr(0, eq), "terminal index"));
            if (leaf.index < 0) fail_at(line, pos, "negative terminal index");
            leaf.word.assign(tok.substr(eq + 1));
            node.children.push_back(std::move(leaf));
        }
        skip_spaces(line, pos);
    }
    if (pos >= line.size()) fail_at(line, pos, "unbalanced brackets: missing ')'");
    ++pos;
    if (node.children.empty()) fail_at(line, pos, "node without children or terminal");
    return node;
}

inline void serialize_node(const TreeNode& node, std::string& out) {
    if (node.is_terminal()) {
        out += std::to_string(node.index);
        out += '=';
        out += node.word;
        return;
    }
    out += '(';
    out += node.label.format();
    for (const auto& c : node.children) {
        out += ' ';
        serialize_node(c, out);
    }
    out += ')';
}

}  // namespace detail

inline ParseTree parse_discbracket(std::string_view line) {
    size_t pos = 0;
    detail::skip_spaces(line, pos);
    ParseTree tree{detail::parse_node(line, pos)};
    detail::skip_spaces(line, pos);
    if (pos != line.size() && !trim(line.substr(pos)).empty())
        detail::fail_at(line, pos, "trailing text after tree");
    tree.validate(line.substr(0, 60));
    tree.root.canonicalize();
    return tree;
}

// Canonical form: children ordered by minimum terminal position,
// deterministic label formatting. parse_discbracket(serialize(t)) == t.
inline std::string serialize(const ParseTree& tree) {
    ParseTree canon = tree;
    canon.root.canonicalize();
    std::string out;
    detail::serialize_node(canon.root, out);
    return out;
}

}  // namespace litpred
