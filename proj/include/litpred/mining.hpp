#pragma once

// Largest common fragments of a pair of binarized parse trees.
//
// For every pair of nodes with equal production signatures (label plus
// ordered child labels, with terminal children compared by word), the
// common subgraph is grown downward: a child pair is expanded when its own
// productions match, and becomes a substitution site otherwise. A pair is
// skipped when both nodes sit at the same child position under parents
// with equal productions, since that fragment is contained in the one
// grown from the parents.

#include <map>
#include <string>
#include <vector>

#include "litpred/common.hpp"
#include "litpred/fragment.hpp"
#include "litpred/tree.hpp"

namespace litpred {

namespace detail {

struct NodeRef {
    const TreeNode* node;
    const TreeNode* parent;  // null at tree root
    int child_pos;
    std::string sig;
};

inline std::string production_sig(const TreeNode& n) {
    std::string sig = n.label.format();
    for (const auto& c : n.children) {
        sig += '\x1f';
        if (c.is_terminal()) {
            sig += '=';
            sig += c.word;
        } else {
            sig += c.label.format();
        }
    }
    return sig;
}

inline void collect_refs(const TreeNode& n, const TreeNode* parent, int pos,
                         std::vector<NodeRef>& out) {
    if (n.is_terminal()) return;
    out.push_back(NodeRef{&n, parent, pos, production_sig(n)});
    for (size_t k = 0; k < n.children.size(); ++k)
        collect_refs(n.children[k], &n, static_cast<int>(k), out);
}

// Grows the largest common fragment anchored at a pair of nodes whose
// productions match; also reports the embedding's matched terminal
// positions and site targets on the first tree's side.
inline FragNode grow_common(const TreeNode& a, const TreeNode& b, std::vector<int>* matched_a,
                            std::vector<int>* matched_b,
                            std::vector<const TreeNode*>* sites_a,
                            std::vector<const TreeNode*>* sites_b) {
    FragNode out;
    out.label = a.label.format();
    for (size_t k = 0; k < a.children.size(); ++k) {
        const TreeNode& ca = a.children[k];
        const TreeNode& cb = b.children[k];
        if (ca.is_terminal()) {
            FragNode leaf;
            leaf.kind = FragNode::Kind::terminal;
            leaf.word = ca.word;
            if (matched_a) matched_a->push_back(ca.index);
            if (matched_b) matched_b->push_back(cb.index);
            out.children.push_back(std::move(leaf));
        } else if (production_sig(ca) == production_sig(cb)) {
            out.children.push_back(grow_common(ca, cb, matched_a, matched_b, sites_a, sites_b));
        } else {
            FragNode site;
            site.kind = FragNode::Kind::site;
            site.label = ca.label.format();
            if (sites_a) sites_a->push_back(&ca);
            if (sites_b) sites_b->push_back(&cb);
            out.children.push_back(std::move(site));
        }
    }
    return out;
}

inline bool noncontiguous(const std::vector<int>& positions) {
    if (positions.size() < 2) return false;
    auto [mn, mx] = std::minmax_element(positions.begin(), positions.end());
    return *mx - *mn + 1 != static_cast<int>(positions.size());
}

}  // namespace detail

// Exactly the maximal common fragments of two binarized trees, sorted by
// canonical form, with discontinuity flags from both witness embeddings.
inline std::vector<Fragment> common_fragments(const ParseTree& t1, const ParseTree& t2) {
    if (t1.max_arity() > 2 || t2.max_arity() > 2)
        throw UsageError("common_fragments requires binarized trees (arity <= 2)");
    std::vector<detail::NodeRef> nodes1, nodes2;
    detail::collect_refs(t1.root, nullptr, 0, nodes1);
    detail::collect_refs(t2.root, nullptr, 0, nodes2);

    std::map<std::string, Fragment> results;
    for (const auto& a : nodes1) {
        for (const auto& b : nodes2) {
            if (a.sig != b.sig) continue;
            // covered: same child position under production-matched parents
            if (a.parent && b.parent && a.child_pos == b.child_pos &&
                detail::production_sig(*a.parent) == detail::production_sig(*b.parent))
                continue;
            std::vector<int> matched_a, matched_b;
            std::vector<const TreeNode*> sites_a, sites_b;
            Fragment frag;
            frag.root = detail::grow_common(*a.node, *b.node, &matched_a, &matched_b, &sites_a,
                                            &sites_b);
            if (frag.size() < 2) continue;
            frag.discontinuous =
                detail::noncontiguous(matched_a) || detail::noncontiguous(matched_b);
            for (const TreeNode* s : sites_a)
                if (s->is_discontinuous()) frag.discontinuous_site = true;
            for (const TreeNode* s : sites_b)
                if (s->is_discontinuous()) frag.discontinuous_site = true;
            std::string form = canonical_form(frag);
            auto [it, inserted] = results.emplace(std::move(form), frag);
            if (!inserted) {
                it->second.discontinuous |= frag.discontinuous;
                it->second.discontinuous_site |= frag.discontinuous_site;
            }
        }
    }
    std::vector<Fragment> out;
    out.reserve(results.size());
    for (auto& [form, frag] : results) out.push_back(std::move(frag));
    return out;
}

}  // namespace litpred
