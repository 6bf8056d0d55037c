#pragma once

// Test-only machinery: random tree generation and brute-force oracles.
// The oracles deliberately take different algorithmic routes than the
// library (exhaustive enumeration instead of growth, set intersection
// instead of matching) so that agreement is meaningful.

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "litpred/binarize.hpp"
#include "litpred/discbracket.hpp"
#include "litpred/fragment.hpp"
#include "litpred/tree.hpp"

namespace testutil {

using litpred::FragNode;
using litpred::Fragment;
using litpred::Label;
using litpred::ParseTree;
using litpred::TreeNode;

// ---------------------------------------------------------------------
// Random trees
// ---------------------------------------------------------------------

struct TreeGenParams {
    int max_internal = 8;          // hard budget of internal nodes
    int max_depth = 3;             // expansion depth cutoff
    int max_children = 2;          // 2 = already binary
    int rules_per_cat = 2;         // size of the sampled production pool
    bool discontinuous = false;    // apply a few random index transpositions
    bool head_functions = false;   // mark one child per node with -hd
    std::vector<std::string> categories = {"S", "NP", "VP", "PP", "A", "B"};
    std::vector<std::string> words = {"aap", "boek", "ziet", "de", "in"};
};

// Samples trees from a small per-generator production pool so that
// independently drawn trees share productions, which the mining and
// counting comparisons need to be non-vacuous.
class TreeGen {
  public:
    TreeGen(uint64_t seed, TreeGenParams params = {}) : rng_(seed), params_(params) {
        for (size_t c = 0; c < params_.categories.size(); ++c) {
            auto& rhss = rules_.emplace_back();
            for (int r = 0; r < params_.rules_per_cat; ++r) {
                std::vector<int> rhs;  // >= 0: category index, -1: word slot
                int arity = 1 + static_cast<int>(rng_() % params_.max_children);
                for (int k = 0; k < arity; ++k) {
                    if (rng_() % 100 < 45)
                        rhs.push_back(-1);
                    else
                        rhs.push_back(static_cast<int>(rng_() % params_.categories.size()));
                }
                rhss.push_back(std::move(rhs));
            }
        }
    }

    ParseTree tree() {
        int budget = params_.max_internal;
        TreeNode root = expand(rng_() % rules_.size(), 0, budget);
        std::vector<TreeNode*> terminals;
        collect_terminals(root, terminals);
        std::vector<int> positions(terminals.size());
        for (size_t i = 0; i < positions.size(); ++i) positions[i] = static_cast<int>(i);
        if (params_.discontinuous && positions.size() >= 2) {
            int swaps = static_cast<int>(rng_() % 3);
            for (int s = 0; s < swaps; ++s) {
                size_t i = rng_() % (positions.size() - 1);
                std::swap(positions[i], positions[i + 1]);
            }
        }
        for (size_t i = 0; i < terminals.size(); ++i) terminals[i]->index = positions[i];
        root.canonicalize();
        ParseTree t{std::move(root)};
        t.validate();
        return t;
    }

  private:
    TreeNode expand(size_t cat, int depth, int& budget) {
        TreeNode n;
        n.label.category = params_.categories[cat];
        --budget;
        const auto& rhs = rules_[cat][rng_() % rules_[cat].size()];
        for (int sym : rhs) {
            if (sym >= 0 && depth + 1 < params_.max_depth && budget > 0) {
                n.children.push_back(expand(static_cast<size_t>(sym), depth + 1, budget));
            } else {
                TreeNode leaf;
                leaf.index = 0;  // positions assigned later
                leaf.word = params_.words[rng_() % params_.words.size()];
                n.children.push_back(std::move(leaf));
            }
        }
        if (params_.head_functions) {
            size_t h = rng_() % n.children.size();
            if (!n.children[h].is_terminal()) n.children[h].label.function = "hd";
        }
        return n;
    }

    static void collect_terminals(TreeNode& n, std::vector<TreeNode*>& out) {
        if (n.is_terminal()) {
            out.push_back(&n);
            return;
        }
        for (auto& c : n.children) collect_terminals(c, out);
    }

    std::mt19937_64 rng_;
    TreeGenParams params_;
    std::vector<std::vector<std::vector<int>>> rules_;  // per category
};

// ---------------------------------------------------------------------
// Brute-force fragment oracle
// ---------------------------------------------------------------------

inline std::string prod_sig(const TreeNode& n) {
    std::string sig = n.label.format();
    for (const auto& c : n.children) {
        sig += '\x1f';
        sig += c.is_terminal() ? "=" + c.word : c.label.format();
    }
    return sig;
}

// All fragments anchored at a node: the node's full production with every
// subset of expandable children expanded in every possible way.
inline std::vector<FragNode> enumerate_anchored(const TreeNode& n) {
    std::vector<std::vector<FragNode>> child_options;
    for (const auto& c : n.children) {
        std::vector<FragNode> opts;
        if (c.is_terminal()) {
            FragNode leaf;
            leaf.kind = FragNode::Kind::terminal;
            leaf.word = c.word;
            opts.push_back(leaf);
        } else {
            FragNode site;
            site.kind = FragNode::Kind::site;
            site.label = c.label.format();
            opts.push_back(site);
            for (auto& sub : enumerate_anchored(c)) opts.push_back(sub);
        }
        child_options.push_back(std::move(opts));
    }
    std::vector<FragNode> results;
    std::vector<size_t> pick(child_options.size(), 0);
    while (true) {
        FragNode f;
        f.label = n.label.format();
        for (size_t k = 0; k < child_options.size(); ++k)
            f.children.push_back(child_options[k][pick[k]]);
        results.push_back(std::move(f));
        size_t k = 0;
        for (; k < pick.size(); ++k) {
            if (++pick[k] < child_options[k].size()) break;
            pick[k] = 0;
        }
        if (k == pick.size()) break;
    }
    return results;
}

// f is a sub-fragment of g: g extends f at substitution sites.
inline bool subsumes(const FragNode& f, const FragNode& g) {
    if (f.kind == FragNode::Kind::terminal)
        return g.kind == FragNode::Kind::terminal && f.word == g.word;
    if (g.kind == FragNode::Kind::terminal) return false;
    if (f.label != g.label) return false;
    if (f.kind == FragNode::Kind::site) return true;
    if (g.kind == FragNode::Kind::site) return false;
    if (f.children.size() != g.children.size()) return false;
    for (size_t k = 0; k < f.children.size(); ++k)
        if (!subsumes(f.children[k], g.children[k])) return false;
    return true;
}

struct OracleNode {
    const TreeNode* node;
    const TreeNode* parent;
    int child_pos;
};

inline void oracle_collect(const TreeNode& n, const TreeNode* parent, int pos,
                           std::vector<OracleNode>& out) {
    if (n.is_terminal()) return;
    out.push_back({&n, parent, pos});
    for (size_t k = 0; k < n.children.size(); ++k)
        oracle_collect(n.children[k], &n, static_cast<int>(k), out);
}

// Maximal common fragments by exhaustive enumeration: for each matched node
// pair, intersect the anchored fragment sets of both sides and keep the
// fragments not subsumed by another common anchored fragment.
inline std::set<std::string> oracle_common_fragments(const ParseTree& t1, const ParseTree& t2) {
    std::vector<OracleNode> nodes1, nodes2;
    oracle_collect(t1.root, nullptr, 0, nodes1);
    oracle_collect(t2.root, nullptr, 0, nodes2);
    std::set<std::string> out;
    for (const auto& a : nodes1) {
        auto frags_a = enumerate_anchored(*a.node);
        for (const auto& b : nodes2) {
            if (prod_sig(*a.node) != prod_sig(*b.node)) continue;
            if (a.parent && b.parent && a.child_pos == b.child_pos &&
                prod_sig(*a.parent) == prod_sig(*b.parent))
                continue;
            auto frags_b = enumerate_anchored(*b.node);
            std::set<std::string> forms_b;
            for (const auto& f : frags_b)
                forms_b.insert(litpred::canonical_form(Fragment{f}));
            std::vector<FragNode> common;
            for (const auto& f : frags_a)
                if (forms_b.count(litpred::canonical_form(Fragment{f}))) common.push_back(f);
            for (const auto& f : common) {
                bool maximal = true;
                for (const auto& g : common)
                    if (&g != &f && subsumes(f, g) && !subsumes(g, f)) {
                        maximal = false;
                        break;
                    }
                if (maximal && Fragment{f}.size() >= 2)
                    out.insert(litpred::canonical_form(Fragment{f}));
            }
        }
    }
    return out;
}

// Occurrence count by enumeration: an embedding exists at a node exactly
// when the fragment's canonical form appears among the fragments anchored
// there.
inline int oracle_count_occurrences(const Fragment& frag, const ParseTree& tree) {
    std::string form = litpred::canonical_form(frag);
    std::vector<OracleNode> nodes;
    oracle_collect(tree.root, nullptr, 0, nodes);
    int count = 0;
    for (const auto& a : nodes) {
        for (const auto& f : enumerate_anchored(*a.node)) {
            if (litpred::canonical_form(Fragment{f}) == form) {
                ++count;
                break;
            }
        }
    }
    return count;
}

// ---------------------------------------------------------------------
// Least-absolute-deviations oracle by linear programming
// ---------------------------------------------------------------------

// Tableau simplex with Bland's rule for min c'z s.t. Az = b, z >= 0, given
// a starting basis of unit columns. Small and dense; test use only.
inline std::vector<double> simplex_solve(std::vector<std::vector<double>> a,
                                         std::vector<double> b, std::vector<double> c,
                                         std::vector<int> basis) {
    size_t m = a.size(), n = c.size();
    for (int guard = 0; guard < 100000; ++guard) {
        // reduced costs: c_j - c_B' B^{-1} A_j; tableau is kept in B^{-1}A form
        std::vector<double> lambda(m);
        for (size_t i = 0; i < m; ++i) lambda[i] = c[static_cast<size_t>(basis[i])];
        int entering = -1;
        for (size_t j = 0; j < n; ++j) {
            double red = c[j];
            for (size_t i = 0; i < m; ++i) red -= lambda[i] * a[i][j];
            if (red < -1e-9) {
                entering = static_cast<int>(j);
                break;  // Bland: first improving index
            }
        }
        if (entering < 0) break;
        int leaving = -1;
        double best_ratio = 0;
        for (size_t i = 0; i < m; ++i) {
            if (a[i][static_cast<size_t>(entering)] > 1e-9) {
                double ratio = b[i] / a[i][static_cast<size_t>(entering)];
                if (leaving < 0 || ratio < best_ratio - 1e-12 ||
                    (std::abs(ratio - best_ratio) <= 1e-12 &&
                     basis[i] < basis[static_cast<size_t>(leaving)])) {
                    leaving = static_cast<int>(i);
                    best_ratio = ratio;
                }
            }
        }
        if (leaving < 0) throw std::runtime_error("LAD LP is unbounded");
        // pivot
        size_t li = static_cast<size_t>(leaving), ej = static_cast<size_t>(entering);
        double piv = a[li][ej];
        for (size_t j = 0; j < n; ++j) a[li][j] /= piv;
        b[li] /= piv;
        for (size_t i = 0; i < m; ++i) {
            if (i == li) continue;
            double f = a[i][ej];
            if (f == 0) continue;
            for (size_t j = 0; j < n; ++j) a[i][j] -= f * a[li][j];
            b[i] -= f * b[li];
        }
        basis[li] = entering;
    }
    std::vector<double> z(n, 0.0);
    for (size_t i = 0; i < m; ++i) z[static_cast<size_t>(basis[i])] = b[i];
    return z;
}

// min sum |y_i - x_i'beta - b| via LP: variables beta+-, b+-, residual
// slacks u, v. Returns (beta, intercept).
inline std::pair<std::vector<double>, double> lad_fit(
    const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
    size_t n = x.size(), p = x[0].size();
    size_t nvars = 2 * p + 2 + 2 * n;
    std::vector<std::vector<double>> a(n, std::vector<double>(nvars, 0.0));
    std::vector<double> b(n), c(nvars, 0.0);
    std::vector<int> basis(n);
    for (size_t i = 0; i < n; ++i) {
        double sign = y[i] >= 0 ? 1.0 : -1.0;
        for (size_t j = 0; j < p; ++j) {
            a[i][j] = sign * x[i][j];
            a[i][p + j] = -sign * x[i][j];
        }
        a[i][2 * p] = sign;
        a[i][2 * p + 1] = -sign;
        a[i][2 * p + 2 + i] = sign;          // u_i
        a[i][2 * p + 2 + n + i] = -sign;     // v_i; negated rows start with v basic
        b[i] = std::abs(y[i]);
        basis[i] = static_cast<int>(y[i] >= 0 ? 2 * p + 2 + i : 2 * p + 2 + n + i);
    }
    for (size_t i = 0; i < n; ++i) {
        c[2 * p + 2 + i] = 1.0;
        c[2 * p + 2 + n + i] = 1.0;
    }
    auto z = simplex_solve(std::move(a), std::move(b), std::move(c), std::move(basis));
    std::vector<double> beta(p);
    for (size_t j = 0; j < p; ++j) beta[j] = z[j] - z[p + j];
    double intercept = z[2 * p] - z[2 * p + 1];
    return {beta, intercept};
}

}  // namespace testutil
