#pragma once

// Tree fragments: connected subgraphs of parse trees in which every
// included internal node keeps its complete ordered child list. Frontier
// non-terminals are substitution sites; frontier terminals are words.
//
// A fragment's identity is its canonical string, e.g.
//   (NP (D 0=the) (N ))
// Substitution sites print as a label with an empty child list; terminal
// indices are positions in traversal order, not source sentence positions.

#include <string>
#include <string_view>
#include <vector>

#include "litpred/common.hpp"
#include "litpred/tree.hpp"

namespace litpred {

struct FragNode {
    enum class Kind { internal, site, terminal };
    Kind kind = Kind::internal;
    std::string label;  // formatted label; empty for terminals
    std::string word;   // terminals only
    std::vector<FragNode> children;

    bool operator==(const FragNode&) const = default;

    // Number of non-terminal nodes (internal + substitution sites).
    size_t size() const {
        if (kind == Kind::terminal) return 0;
        size_t n = 1;
        for (const auto& c : children) n += c.size();
        return n;
    }
};

enum class LexClass { fully_lexicalized, syntactic, mixed };

inline std::string_view lex_class_name(LexClass c) {
    switch (c) {
        case LexClass::fully_lexicalized: return "fully_lexicalized";
        case LexClass::syntactic: return "syntactic";
        case LexClass::mixed: return "mixed";
    }
    return "?";
}

struct Fragment {
    FragNode root;
    // Witness-derived metadata, OR-merged across embeddings: whether some
    // embedding's matched yield was non-contiguous, and whether some
    // substitution site matched a node with non-contiguous yield.
    bool discontinuous = false;
    bool discontinuous_site = false;

    size_t size() const { return root.size(); }

    bool has_terminal() const { return has_terminal(root); }
    bool has_site() const { return has_site(root); }

    LexClass lex_class() const {
        bool terms = has_terminal(), sites = has_site(root);
        if (terms && !sites) return LexClass::fully_lexicalized;
        if (!terms) return LexClass::syntactic;
        return LexClass::mixed;
    }

    // Category / function of the root label; markov roots report the parent
    // category they encode (the part before '|').
    std::string root_category() const {
        auto bar = root.label.find(kMarkovSeparator);
        std::string head = root.label.substr(0, bar);
        Label lab = parse_label(head);
        return lab.category;
    }

    std::string root_function() const {
        if (root.label.find(kMarkovSeparator) != std::string::npos) return "";
        return parse_label(root.label).function;
    }

  private:
    static bool has_terminal(const FragNode& n) {
        if (n.kind == FragNode::Kind::terminal) return true;
        for (const auto& c : n.children)
            if (has_terminal(c)) return true;
        return false;
    }
    static bool has_site(const FragNode& n) {
        if (n.kind == FragNode::Kind::site) return true;
        for (const auto& c : n.children)
            if (has_site(c)) return true;
        return false;
    }
};

namespace detail {

inline void render_frag(const FragNode& n, std::string& out, int& next_index) {
    if (n.kind == FragNode::Kind::terminal) {
        out += std::to_string(next_index++);
        out += '=';
        out += n.word;
        return;
    }
    out += '(';
    out += n.label;
    if (n.kind == FragNode::Kind::site) {
        out += " )";
        return;
    }
    for (const auto& c : n.children) {
        out += ' ';
        render_frag(c, out, next_index);
    }
    out += ')';
}

inline FragNode parse_frag_node(std::string_view s, size_t& pos) {
    auto fail = [&](const std::string& msg) {
        throw FormatError("bad fragment '" + std::string(s.substr(0, 120)) + "': " + msg +
                          " at position " + std::to_string(pos));
    };
    if (pos >= s.size() || s[pos] != '(') fail("expected '('");
    ++pos;
    while (pos < s.size() && s[pos] == ' ') ++pos;
    size_t start = pos;
    while (pos < s.size() && s[pos] != ' ' && s[pos] != '(' && s[pos] != ')') ++pos;
    FragNode node;
    node.label.assign(s.substr(start, pos - start));
    if (node.label.empty()) fail("empty label");
    bool saw_child = false;
    while (pos < s.size() && s[pos] == ' ') ++pos;
    while (pos < s.size() && s[pos] != ')') {
        saw_child = true;
        if (s[pos] == '(') {
            node.children.push_back(parse_frag_node(s, pos));
        } else {
            size_t tstart = pos;
            while (pos < s.size() && s[pos] != ' ' && s[pos] != ')' && s[pos] != '(') ++pos;
            std::string_view tok = s.substr(tstart, pos - tstart);
            size_t eq = tok.find('=');
            if (eq == std::string_view::npos) fail("leaf token must have the form index=word");
            FragNode leaf;
            leaf.kind = FragNode::Kind::terminal;
            leaf.word.assign(tok.substr(eq + 1));
            node.children.push_back(std::move(leaf));
        }
        while (pos < s.size() && s[pos] == ' ') ++pos;
    }
    if (pos >= s.size()) fail("unbalanced brackets");
    ++pos;
    if (!saw_child) node.kind = FragNode::Kind::site;
    return node;
}

}  // namespace detail

inline std::string canonical_form(const Fragment& frag) {
    std::string out;
    int next_index = 0;
    detail::render_frag(frag.root, out, next_index);
    return out;
}

inline Fragment parse_fragment(std::string_view s) {
    size_t pos = 0;
    while (pos < s.size() && s[pos] == ' ') ++pos;
    Fragment f;
    f.root = detail::parse_frag_node(s, pos);
    while (pos < s.size() && s[pos] == ' ') ++pos;
    if (pos != s.size())
        throw FormatError("trailing text after fragment: " + std::string(s));
    return f;
}

// Exact anchored match: labels equal, internal fragment nodes require the
// tree node's full ordered child list, sites match any equal-labelled node,
// terminals require equal words.
inline bool matches_at(const FragNode& frag, const TreeNode& node) {
    if (frag.kind == FragNode::Kind::terminal)
        return node.is_terminal() && node.word == frag.word;
    if (node.is_terminal()) return false;
    if (node.label.format() != frag.label) return false;
    if (frag.kind == FragNode::Kind::site) return true;
    if (frag.children.size() != node.children.size()) return false;
    for (size_t i = 0; i < frag.children.size(); ++i)
        if (!matches_at(frag.children[i], node.children[i])) return false;
    return true;
}

// Number of distinct embeddings of `frag` in `tree`; overlapping and
// nested embeddings all count.
inline int count_occurrences(const Fragment& frag, const ParseTree& tree) {
    int count = 0;
    std::vector<const TreeNode*> stack{&tree.root};
    while (!stack.empty()) {
        const TreeNode* n = stack.back();
        stack.pop_back();
        if (n->is_terminal()) continue;
        if (matches_at(frag.root, *n)) ++count;
        for (const auto& c : n->children) stack.push_back(&c);
    }
    return count;
}

// Human-facing rendering with binarization spines collapsed: synthetic
// internal nodes are spliced into their parents. A synthetic root keeps a
// trailing ellipsis to signal a partial constituent.
inline std::string unbinarized_rendering(const Fragment& frag) {
    struct Walk {
        static void splice(const FragNode& n, std::vector<const FragNode*>& out) {
            for (const auto& c : n.children) {
                if (c.kind == FragNode::Kind::internal &&
                    c.label.find(kMarkovSeparator) != std::string::npos)
                    splice(c, out);
                else
                    out.push_back(&c);
            }
        }
        static void render(const FragNode& n, std::string& out, int& next_index) {
            if (n.kind == FragNode::Kind::terminal) {
                out += std::to_string(next_index++);
                out += '=';
                out += n.word;
                return;
            }
            out += '(';
            auto bar = n.label.find(kMarkovSeparator);
            out += n.label.substr(0, bar);
            if (bar != std::string::npos) out += "...";
            if (n.kind == FragNode::Kind::site) {
                out += " )";
                return;
            }
            std::vector<const FragNode*> kids;
            splice(n, kids);
            for (const auto* c : kids) {
                out += ' ';
                render(*c, out, next_index);
            }
            out += ')';
        }
    };
    std::string out;
    int next_index = 0;
    Walk::render(frag.root, out, next_index);
    return out;
}

}  // namespace litpred
