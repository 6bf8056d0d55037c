#pragma once

// Parse trees over indexed terminals. Terminal positions need not form a
// contiguous range below a node, which is how discontinuous constituents
// are represented.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "litpred/common.hpp"
#include "litpred/label.hpp"

namespace litpred {

struct TreeNode {
    Label label;                     // meaningful iff !is_terminal()
    int index = -1;                  // 0-based sentence position, terminals only
    std::string word;                // terminals only
    std::vector<TreeNode> children;

    bool is_terminal() const { return index >= 0; }

    bool operator==(const TreeNode& o) const {
        return label == o.label && index == o.index && word == o.word &&
               children == o.children;
    }

    void yield_into(std::vector<int>& out) const {
        if (is_terminal()) {
            out.push_back(index);
            return;
        }
        for (const auto& c : children) c.yield_into(out);
    }

    // Sorted terminal positions below this node.
    std::vector<int> yield() const {
        std::vector<int> out;
        yield_into(out);
        std::sort(out.begin(), out.end());
        return out;
    }

    int min_index() const {
        if (is_terminal()) return index;
        int best = INT32_MAX;
        for (const auto& c : children) best = std::min(best, c.min_index());
        return best;
    }

    bool is_discontinuous() const {
        auto y = yield();
        return !y.empty() && y.back() - y.front() + 1 != static_cast<int>(y.size());
    }

    size_t node_count() const {
        size_t n = 1;
        for (const auto& c : children) n += c.node_count();
        return n;
    }

    int max_arity() const {
        int m = static_cast<int>(children.size());
        for (const auto& c : children) m = std::max(m, c.max_arity());
        return m;
    }

    // Orders children by minimum terminal position, recursively.
    void canonicalize() {
        for (auto& c : children) c.canonicalize();
        std::stable_sort(children.begin(), children.end(),
                         [](const TreeNode& a, const TreeNode& b) {
                             return a.min_index() < b.min_index();
                         });
    }
};

struct ParseTree {
    TreeNode root;

    bool operator==(const ParseTree&) const = default;

    std::vector<int> yield() const { return root.yield(); }
    size_t node_count() const { return root.node_count(); }
    int max_arity() const { return root.max_arity(); }

    // Terminal-index partition invariant: every index exactly once, and each
    // node's yield is the disjoint union of its children's yields (which
    // holds by construction here; duplicates are what can go wrong).
    void validate(std::string_view where = {}) const {
        std::vector<int> y;
        root.yield_into(y);
        if (y.empty())
            throw FormatError("tree has no terminals" +
                              (where.empty() ? std::string() : " in " + std::string(where)));
        std::sort(y.begin(), y.end());
        std::string ctx = where.empty() ? std::string() : " in " + std::string(where);
        for (size_t i = 1; i < y.size(); ++i)
            if (y[i] == y[i - 1])
                throw FormatError("duplicate terminal index " + std::to_string(y[i]) + ctx);
        if (y.front() != 0 || y.back() != static_cast<int>(y.size()) - 1)
            throw FormatError("missing terminal index (positions must cover 0.." +
                              std::to_string(y.size() - 1) + ")" + ctx);
    }
};

}  // namespace litpred
