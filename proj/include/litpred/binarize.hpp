#pragma once

// Head-outward binarization with horizontal/vertical markovization.
//
// An n-ary constituent X is rebuilt as a binary spine starting at the head
// child; remaining children attach one at a time, nearest-to-head first,
// right side before left. Intermediate spine nodes get synthetic labels
//   X|<S1,..,Sh>        (h most recently attached sibling categories)
//   X|<..>^<A1,..>      (v-1 ancestor categories when v > 1)
// The separator '|' is rejected in input labels, so synthetic nodes are
// unambiguous and the transform is reversible.

#include <string>
#include <vector>

#include "litpred/common.hpp"
#include "litpred/tree.hpp"

namespace litpred {

struct BinarizationParams {
    int h = 1;  // horizontal markovization: sibling context size
    int v = 1;  // vertical markovization: 1 = no ancestor context

    void validate() const {
        if (h < 0) throw UsageError("binarization h must be >= 0");
        if (v < 1) throw UsageError("binarization v must be >= 1");
    }
};

namespace detail {

inline const std::string kLexSibling = "LEX";

inline const std::string& sibling_category(const TreeNode& n) {
    return n.is_terminal() ? kLexSibling : n.label.category;
}

// Children are in canonical order; the head is the first child whose
// function tag is "hd", else the leftmost child (reported via lint).
inline size_t head_child(const TreeNode& node, std::vector<std::string>* lint) {
    for (size_t i = 0; i < node.children.size(); ++i) {
        const auto& c = node.children[i];
        if (!c.is_terminal() && c.label.function == "hd") return i;
    }
    if (lint)
        lint->push_back("no head child under " + node.label.format() + "; using leftmost");
    return 0;
}

inline std::string markov_label(const std::string& parent_cat,
                                const std::vector<std::string>& recent_siblings,
                                const std::vector<std::string>& ancestors,
                                const BinarizationParams& params) {
    std::string out = parent_cat;
    out += kMarkovSeparator;
    out += '<';
    size_t take = std::min<size_t>(recent_siblings.size(), static_cast<size_t>(params.h));
    for (size_t i = 0; i < take; ++i) {
        if (i) out += ',';
        out += recent_siblings[recent_siblings.size() - 1 - i];  // most recent first
    }
    out += '>';
    if (params.v > 1) {
        out += '^';
        out += '<';
        size_t vtake = std::min<size_t>(ancestors.size(), static_cast<size_t>(params.v - 1));
        for (size_t i = 0; i < vtake; ++i) {
            if (i) out += ',';
            out += ancestors[ancestors.size() - 1 - i];
        }
        out += '>';
    }
    return out;
}

inline TreeNode make_binary(TreeNode a, TreeNode b, const Label& label) {
    TreeNode node;
    node.label = label;
    if (b.min_index() < a.min_index()) std::swap(a, b);
    node.children.push_back(std::move(a));
    node.children.push_back(std::move(b));
    return node;
}

inline TreeNode binarize_node(const TreeNode& node, const BinarizationParams& params,
                              std::vector<std::string>& ancestors,
                              std::vector<std::string>* lint) {
    if (node.is_terminal()) return node;
    if (node.children.empty())
        throw FormatError("non-terminal node without children: " + node.label.format());

    TreeNode out;
    out.label = node.label;
    if (node.children.size() <= 2) {
        ancestors.push_back(node.label.category);
        for (const auto& c : node.children)
            out.children.push_back(binarize_node(c, params, ancestors, lint));
        ancestors.pop_back();
        return out;
    }

    size_t head = head_child(node, lint);
    ancestors.push_back(node.label.category);
    std::vector<TreeNode> kids;
    kids.reserve(node.children.size());
    for (const auto& c : node.children)
        kids.push_back(binarize_node(c, params, ancestors, lint));
    ancestors.pop_back();

    // Attach order: right siblings nearest first, then left siblings.
    std::vector<size_t> order;
    for (size_t i = head + 1; i < kids.size(); ++i) order.push_back(i);
    for (size_t i = head; i-- > 0;) order.push_back(i);

    std::vector<std::string> attached;
    TreeNode current = std::move(kids[head]);
    for (size_t step = 0; step < order.size(); ++step) {
        size_t sib = order[step];
        attached.push_back(sibling_category(node.children[sib]));
        Label lab;
        if (step + 1 == order.size()) {
            lab = node.label;  // spine top keeps the original label
        } else {
            lab.category = markov_label(node.label.category, attached, ancestors, params);
        }
        current = make_binary(std::move(current), std::move(kids[sib]), lab);
    }
    return current;
}

inline void unbinarize_children(TreeNode&& node, std::vector<TreeNode>& out) {
    for (auto& c : node.children) {
        if (!c.is_terminal() && c.label.is_markov())
            unbinarize_children(std::move(c), out);
        else
            out.push_back(std::move(c));
    }
}

inline TreeNode unbinarize_node(TreeNode&& node) {
    if (node.is_terminal()) return std::move(node);
    TreeNode out;
    out.label = std::move(node.label);
    std::vector<TreeNode> flat;
    unbinarize_children(std::move(node), flat);
    for (auto& c : flat) out.children.push_back(unbinarize_node(std::move(c)));
    std::stable_sort(out.children.begin(), out.children.end(),
                     [](const TreeNode& a, const TreeNode& b) {
                         return a.min_index() < b.min_index();
                     });
    return out;
}

}  // namespace detail

inline ParseTree binarize(const ParseTree& tree, const BinarizationParams& params = {},
                          std::vector<std::string>* lint = nullptr) {
    params.validate();
    std::vector<std::string> ancestors;
    ParseTree out{detail::binarize_node(tree.root, params, ancestors, lint)};
    out.root.canonicalize();
    return out;
}

inline ParseTree unbinarize(const ParseTree& tree) {
    if (!tree.root.is_terminal() && tree.root.label.is_markov())
        throw FormatError("malformed tree: synthetic label at root");
    TreeNode root = tree.root;
    return ParseTree{detail::unbinarize_node(std::move(root))};
}

}  // namespace litpred
