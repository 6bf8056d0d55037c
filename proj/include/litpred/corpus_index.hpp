#pragma once

// Interned view of a binarized corpus for pairwise fragment mining and
// corpus-wide occurrence counting.
//
// Subtrees are hash-consed at two levels:
//   struct  - label structure only (what matching and growth depend on)
//   layout  - struct plus normalized terminal positions (what witness
//             discontinuity flags depend on)
// Node instances are grouped by (production signature, struct, parent
// context, document), so repeated subtrees cost one entry. The largest
// common fragment grown from a matched node pair depends only on the two
// structs, which makes growth memoizable.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "litpred/common.hpp"
#include "litpred/fragment.hpp"
#include "litpred/tree.hpp"

namespace litpred {

struct CandidateSet {
    int fold_i = 0, fold_j = 0;
    struct Entry {
        std::string form;
        std::vector<std::pair<std::string, long>> doc_counts;  // sorted by doc id
        long total() const {
            long t = 0;
            for (auto& [d, c] : doc_counts) t += c;
            return t;
        }
    };
    std::vector<Entry> fragments;  // sorted by canonical form
};

struct FragmentFlags {
    bool discontinuous = false;
    bool discontinuous_site = false;
};

// Sparse documents x fragments occurrence counts, column-major.
struct CountMatrix {
    std::vector<std::string> doc_ids;  // row order
    struct Column {
        std::string form;
        std::vector<std::pair<int, long>> cells;  // (row, count), row-sorted
        long total() const {
            long t = 0;
            for (auto& [r, c] : cells) t += c;
            return t;
        }
        size_t doc_freq() const { return cells.size(); }
    };
    std::vector<Column> columns;  // sorted by form
};

namespace detail {

struct VecHash {
    size_t operator()(const std::vector<int>& v) const {
        uint64_t h = 0xcbf29ce484222325ull;
        for (int x : v) {
            h ^= static_cast<uint64_t>(static_cast<uint32_t>(x));
            h *= 0x100000001b3ull;
        }
        return static_cast<size_t>(h);
    }
};

template <typename V>
using VecMap = std::unordered_map<std::vector<int>, V, VecHash>;

struct IntPairHash {
    size_t operator()(const std::pair<int, int>& p) const {
        return static_cast<size_t>((static_cast<uint64_t>(static_cast<uint32_t>(p.first)) << 32) ^
                                   static_cast<uint32_t>(p.second));
    }
};

struct PtrIntHash {
    size_t operator()(const std::pair<const void*, int>& p) const {
        return std::hash<const void*>()(p.first) * 1000003u ^
               static_cast<uint32_t>(p.second);
    }
};

}  // namespace detail

class CorpusIndex {
  public:
    // Trees must be binarized (max arity 2) under one shared policy.
    void add_document(const std::string& doc_id, const std::vector<ParseTree>& trees) {
        int doc = static_cast<int>(doc_ids_.size());
        doc_ids_.push_back(doc_id);
        for (const auto& tree : trees) {
            if (tree.max_arity() > 2)
                throw UsageError("corpus index requires binarized trees (arity > 2 in doc " +
                                 doc_id + ")");
            std::vector<int> positions;
            add_node(tree.root, kNoContext, doc, positions);
        }
    }

    size_t doc_count() const { return doc_ids_.size(); }
    const std::vector<std::string>& doc_ids() const { return doc_ids_; }

    // Largest common fragments for every fold pair <i, j>, i < j. The result
    // equals the union of common_fragments over all cross-fold tree pairs,
    // deduplicated by canonical form, with per-document witness counts.
    std::vector<CandidateSet> mine_pairwise(const std::vector<std::vector<std::string>>& folds,
                                            int workers = 1) const {
        if (folds.size() < 2) throw UsageError("mining requires at least 2 folds");
        std::vector<int> fold_of = fold_assignment(folds);
        std::vector<SideData> sides(folds.size());
        for (const auto& g : groups_) {
            int f = fold_of[g.doc];
            if (f < 0) continue;
            sides[f].by_sig[sigs_of_structs_[g.struct_id]].push_back(&g);
        }
        std::vector<std::pair<int, int>> pairs;
        for (size_t i = 0; i < folds.size(); ++i)
            for (size_t j = i + 1; j < folds.size(); ++j)
                pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
        return run_tasks<CandidateSet>(pairs.size(), workers, [&](size_t p) {
            return mine_pair(sides[pairs[p].first], sides[pairs[p].second], pairs[p].first,
                             pairs[p].second);
        });
    }

    // Exact occurrence counts of each fragment in every document, plus
    // witness discontinuity flags aggregated over all corpus embeddings.
    // All-zero columns are dropped.
    std::pair<CountMatrix, std::vector<FragmentFlags>> count_corpus(
        const std::vector<std::string>& forms, int workers = 1) const {
        std::vector<std::string> sorted_forms = forms;
        std::sort(sorted_forms.begin(), sorted_forms.end());
        sorted_forms.erase(std::unique(sorted_forms.begin(), sorted_forms.end()),
                           sorted_forms.end());

        struct ColResult {
            CountMatrix::Column col;
            FragmentFlags flags;
        };
        auto results = run_tasks<ColResult>(sorted_forms.size(), workers, [&](size_t fi) {
            ColResult res;
            res.col.form = sorted_forms[fi];
            Fragment frag = parse_fragment(sorted_forms[fi]);
            count_one(frag, res.col.cells, res.flags);
            return res;
        });
        CountMatrix matrix;
        matrix.doc_ids = doc_ids_;
        std::vector<FragmentFlags> flags;
        for (auto& r : results) {
            if (r.col.cells.empty()) continue;
            matrix.columns.push_back(std::move(r.col));
            flags.push_back(r.flags);
        }
        return {std::move(matrix), std::move(flags)};
    }

  private:
    static constexpr int kNoContext = 0;

    struct StructNode {
        int label = -1;  // -1 for terminals
        int word = -1;   // >= 0 for terminals
        std::vector<int> children;
        int sig = 0;  // production signature; 0 for terminals
        bool is_terminal() const { return word >= 0; }
    };

    struct LayoutNode {
        int struct_id = -1;
        std::vector<int> children;   // layout ids
        std::vector<int> positions;  // normalized terminal positions, traversal order
        bool self_noncontig = false;
    };

    struct Group {  // one (struct, context, document) instance class
        int struct_id;
        int ctx;
        int doc;
        long count;
    };

    struct SideData {
        std::unordered_map<int, std::vector<const Group*>> by_sig;
    };

    // ---- interning -----------------------------------------------------

    static int intern_string(std::vector<std::string>& table,
                             std::unordered_map<std::string, int>& map, const std::string& s) {
        auto it = map.find(s);
        if (it != map.end()) return it->second;
        int id = static_cast<int>(table.size());
        table.push_back(s);
        map.emplace(s, id);
        return id;
    }

    static int intern_key(detail::VecMap<int>& map, std::vector<int>&& key) {
        auto it = map.find(key);
        if (it != map.end()) return it->second;
        int id = static_cast<int>(map.size());
        map.emplace(std::move(key), id);
        return id;
    }

    // Production signature: label plus tagged child symbols (terminal word
    // or child label). Depends only on the node and its immediate children,
    // so it can be computed before recursing. Signature ids start at 1;
    // 0 means "no parent" in contexts.
    int node_sig(const TreeNode& node) {
        std::vector<int> key;
        key.reserve(node.children.size() + 1);
        key.push_back(intern_string(labels_, label_map_, node.label.format()));
        for (const auto& c : node.children) {
            if (c.is_terminal())
                key.push_back((intern_string(words_, word_map_, c.word) << 1) | 1);
            else
                key.push_back(intern_string(labels_, label_map_, c.label.format()) << 1);
        }
        return intern_key(sig_map_, std::move(key)) + 1;
    }

    int make_ctx(int parent_sig, int child_pos) {
        return intern_key(ctx_map_, {parent_sig, child_pos}) + 1;  // 0 = no parent
    }

    // Returns (struct_id, layout_id); appends this subtree's absolute
    // terminal positions to `positions`.
    std::pair<int, int> add_node(const TreeNode& node, int ctx, int doc,
                                 std::vector<int>& positions) {
        if (node.is_terminal()) {
            positions.push_back(node.index);
            int sid = intern_struct({-1, intern_string(words_, word_map_, node.word)}, 0);
            int lid = intern_layout(sid, {}, {0}, false);
            return {sid, lid};
        }
        int sig = node_sig(node);
        std::vector<int> child_structs, child_layouts;
        size_t first_pos = positions.size();
        for (size_t k = 0; k < node.children.size(); ++k) {
            auto [cs, cl] =
                add_node(node.children[k], make_ctx(sig, static_cast<int>(k)), doc, positions);
            child_structs.push_back(cs);
            child_layouts.push_back(cl);
        }
        std::vector<int> skey;
        skey.push_back(intern_string(labels_, label_map_, node.label.format()));
        for (int cs : child_structs) skey.push_back(cs);
        int sid = intern_struct(std::move(skey), sig);

        std::vector<int> own(positions.begin() + static_cast<long>(first_pos), positions.end());
        int lo = *std::min_element(own.begin(), own.end());
        int hi = *std::max_element(own.begin(), own.end());
        bool noncontig = hi - lo + 1 != static_cast<int>(own.size());
        for (int& p : own) p -= lo;
        int lid = intern_layout(sid, std::move(child_layouts), std::move(own), noncontig);

        record_instance(sid, ctx, doc);
        return {sid, lid};
    }

    // Key layout: terminals {-1, word}, internal {label, child structs...}.
    int intern_struct(std::vector<int>&& key, int sig) {
        auto it = struct_map_.find(key);
        if (it != struct_map_.end()) return it->second;
        int id = static_cast<int>(structs_.size());
        StructNode sn;
        if (key[0] < 0) {
            sn.word = key[1];
        } else {
            sn.label = key[0];
            sn.sig = sig;
            sn.children.assign(key.begin() + 1, key.end());
            structs_by_sig_[sig].push_back(id);
        }
        structs_.push_back(std::move(sn));
        sigs_of_structs_.push_back(sig);
        struct_map_.emplace(std::move(key), id);
        return id;
    }

    int intern_layout(int struct_id, std::vector<int>&& children, std::vector<int>&& positions,
                      bool noncontig) {
        std::vector<int> key;
        key.reserve(children.size() + positions.size() + 2);
        key.push_back(struct_id);
        key.push_back(static_cast<int>(children.size()));
        for (int c : children) key.push_back(c);
        for (int p : positions) key.push_back(p);
        auto it = layout_map_.find(key);
        if (it != layout_map_.end()) return it->second;
        int id = static_cast<int>(layouts_.size());
        LayoutNode ln;
        ln.struct_id = struct_id;
        ln.children = std::move(children);
        ln.positions = std::move(positions);
        ln.self_noncontig = noncontig;
        int sig = sigs_of_structs_[struct_id];
        if (sig > 0) layouts_by_sig_[sig].push_back(id);
        layouts_.push_back(std::move(ln));
        layout_map_.emplace(std::move(key), id);
        return id;
    }

    void record_instance(int struct_id, int ctx, int doc) {
        auto it = group_map_.find({struct_id, ctx, doc});
        if (it != group_map_.end()) {
            ++groups_[it->second].count;
        } else {
            group_map_.emplace(std::vector<int>{struct_id, ctx, doc}, groups_.size());
            groups_.push_back(Group{struct_id, ctx, doc, 1});
        }
        auto& pd = struct_docs_[struct_id];
        if (pd.empty() || pd.back().first != doc)
            pd.emplace_back(doc, 1);
        else
            ++pd.back().second;
    }

    std::vector<int> fold_assignment(const std::vector<std::vector<std::string>>& folds) const {
        std::unordered_map<std::string, int> doc_index;
        for (size_t i = 0; i < doc_ids_.size(); ++i) doc_index[doc_ids_[i]] = static_cast<int>(i);
        std::vector<int> fold_of(doc_ids_.size(), -1);
        for (size_t f = 0; f < folds.size(); ++f)
            for (const auto& id : folds[f]) {
                auto it = doc_index.find(id);
                if (it == doc_index.end()) throw DataError("unknown document in folds: " + id);
                fold_of[it->second] = static_cast<int>(f);
            }
        return fold_of;
    }

    // ---- fragment growth (mining) ----------------------------------------

    FragNode grow_node(int s1, int s2) const {
        const StructNode& a = structs_[s1];
        const StructNode& b = structs_[s2];
        FragNode out;
        out.label = labels_[a.label];
        for (size_t k = 0; k < a.children.size(); ++k) {
            const StructNode& ca = structs_[a.children[k]];
            const StructNode& cb = structs_[b.children[k]];
            if (ca.is_terminal()) {
                FragNode leaf;
                leaf.kind = FragNode::Kind::terminal;
                leaf.word = words_[ca.word];
                out.children.push_back(std::move(leaf));
            } else if (ca.sig == cb.sig) {
                out.children.push_back(grow_node(a.children[k], b.children[k]));
            } else {
                FragNode site;
                site.kind = FragNode::Kind::site;
                site.label = labels_[ca.label];
                out.children.push_back(std::move(site));
            }
        }
        return out;
    }

    using GrowMemo =
        std::unordered_map<std::pair<int, int>, std::optional<std::string>, detail::IntPairHash>;

    // Largest common fragment anchored at a pair of sig-equal structs, as a
    // canonical form; nullopt when below the one-production minimum size.
    const std::optional<std::string>& grow(int s1, int s2, GrowMemo& memo) const {
        auto key = std::make_pair(std::min(s1, s2), std::max(s1, s2));
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        Fragment frag{grow_node(key.first, key.second)};
        std::optional<std::string> form;
        if (frag.size() >= 2) form = canonical_form(frag);
        return memo.emplace(key, std::move(form)).first->second;
    }

    // Context shared by all groups, or 0 when mixed or root-level.
    static int uniform_ctx(const std::vector<const Group*>& gs) {
        int ctx = gs.front()->ctx;
        for (const Group* g : gs)
            if (g->ctx != ctx) return 0;
        return ctx;
    }

    // A group's instances witness the fragment unless every instance on the
    // other side sits in this group's own (single, non-root) context; such
    // fully-covered pairs are contained in the fragments grown from their
    // parents.
    static void accumulate_witnesses(const std::vector<const Group*>& side, int other_uniform,
                                     std::map<int, long>& docs) {
        for (const Group* g : side) {
            if (g->ctx != 0 && g->ctx == other_uniform) continue;
            docs[g->doc] += g->count;
        }
    }

    CandidateSet mine_pair(const SideData& left, const SideData& right, int fi, int fj) const {
        CandidateSet out;
        out.fold_i = fi;
        out.fold_j = fj;
        GrowMemo memo;
        std::map<std::string, std::map<int, long>> found;  // form -> doc -> count

        for (const auto& [sig, lgroups] : left.by_sig) {
            auto it = right.by_sig.find(sig);
            if (it == right.by_sig.end()) continue;
            auto lbuckets = bucket_by_struct(lgroups);
            auto rbuckets = bucket_by_struct(it->second);
            for (const auto& [s1, g1s] : lbuckets) {
                int u1 = uniform_ctx(g1s);
                for (const auto& [s2, g2s] : rbuckets) {
                    int u2 = uniform_ctx(g2s);
                    if (u1 > 0 && u1 == u2) continue;  // every instance pair covered
                    const auto& form = grow(s1, s2, memo);
                    if (!form) continue;
                    auto& docs = found[*form];
                    accumulate_witnesses(g1s, u2, docs);
                    accumulate_witnesses(g2s, u1, docs);
                }
            }
        }
        for (auto& [form, docs] : found) {
            CandidateSet::Entry e;
            e.form = form;
            std::map<std::string, long> by_id;
            for (auto& [doc, c] : docs) by_id[doc_ids_[doc]] += c;
            e.doc_counts.assign(by_id.begin(), by_id.end());
            out.fragments.push_back(std::move(e));
        }
        return out;
    }

    static std::map<int, std::vector<const Group*>> bucket_by_struct(
        const std::vector<const Group*>& gs) {
        std::map<int, std::vector<const Group*>> by_struct;
        for (const Group* g : gs) by_struct[g->struct_id].push_back(g);
        return by_struct;
    }

    // ---- counting --------------------------------------------------------

    using MatchMemo =
        std::unordered_map<std::pair<const void*, int>, bool, detail::PtrIntHash>;

    bool matches(const FragNode& f, int struct_id, MatchMemo& memo) const {
        const StructNode& s = structs_[struct_id];
        if (f.kind == FragNode::Kind::terminal)
            return s.is_terminal() && words_[s.word] == f.word;
        if (s.is_terminal()) return false;
        if (labels_[s.label] != f.label) return false;
        if (f.kind == FragNode::Kind::site) return true;
        if (f.children.size() != s.children.size()) return false;
        auto key = std::make_pair(static_cast<const void*>(&f), struct_id);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        bool ok = true;
        for (size_t k = 0; ok && k < f.children.size(); ++k)
            ok = matches(f.children[k], s.children[k], memo);
        memo.emplace(key, ok);
        return ok;
    }

    // Walks fragment and layout together, collecting the embedding's matched
    // terminal positions and whether any substitution site landed on a node
    // with non-contiguous yield.
    void embedding_info(const FragNode& f, int layout_id, const std::vector<int>& anchor_pos,
                        size_t& cursor, std::vector<int>& matched, bool& site_noncontig) const {
        const LayoutNode& l = layouts_[layout_id];
        if (f.kind == FragNode::Kind::terminal) {
            matched.push_back(anchor_pos[cursor++]);
            return;
        }
        if (f.kind == FragNode::Kind::site) {
            if (l.self_noncontig) site_noncontig = true;
            cursor += l.positions.size();
            return;
        }
        for (size_t k = 0; k < f.children.size(); ++k)
            embedding_info(f.children[k], l.children[k], anchor_pos, cursor, matched,
                           site_noncontig);
    }

    int root_sig_of(const Fragment& frag) const {
        if (frag.root.kind != FragNode::Kind::internal) return 0;
        auto lit = label_map_.find(frag.root.label);
        if (lit == label_map_.end()) return 0;
        std::vector<int> key{lit->second};
        for (const auto& c : frag.root.children) {
            if (c.kind == FragNode::Kind::terminal) {
                auto w = word_map_.find(c.word);
                if (w == word_map_.end()) return 0;
                key.push_back((w->second << 1) | 1);
            } else {
                auto lbl = label_map_.find(c.label);
                if (lbl == label_map_.end()) return 0;
                key.push_back(lbl->second << 1);
            }
        }
        auto sit = sig_map_.find(key);
        return sit == sig_map_.end() ? 0 : sit->second + 1;
    }

    void count_one(const Fragment& frag, std::vector<std::pair<int, long>>& cells,
                   FragmentFlags& flags) const {
        int sig = root_sig_of(frag);
        if (sig == 0) return;
        MatchMemo memo;

        std::map<int, long> per_doc;
        auto sbs = structs_by_sig_.find(sig);
        if (sbs == structs_by_sig_.end()) return;
        for (int s : sbs->second) {
            if (!matches(frag.root, s, memo)) continue;
            auto sd = struct_docs_.find(s);
            if (sd == struct_docs_.end()) continue;
            for (auto& [doc, count] : sd->second) per_doc[doc] += count;
        }
        for (auto& [doc, count] : per_doc) cells.emplace_back(doc, count);
        if (cells.empty()) return;

        auto lbs = layouts_by_sig_.find(sig);
        if (lbs == layouts_by_sig_.end()) return;
        for (int lid : lbs->second) {
            if (flags.discontinuous && flags.discontinuous_site) break;
            const LayoutNode& ln = layouts_[lid];
            if (!matches(frag.root, ln.struct_id, memo)) continue;
            std::vector<int> matched;
            bool site_noncontig = false;
            size_t cursor = 0;
            embedding_info(frag.root, lid, ln.positions, cursor, matched, site_noncontig);
            if (matched.size() > 1) {
                auto [mn, mx] = std::minmax_element(matched.begin(), matched.end());
                if (*mx - *mn + 1 != static_cast<int>(matched.size()))
                    flags.discontinuous = true;
            }
            if (site_noncontig) flags.discontinuous_site = true;
        }
    }

    // ---- data --------------------------------------------------------------

    std::vector<std::string> doc_ids_;
    std::vector<std::string> labels_, words_;
    std::unordered_map<std::string, int> label_map_, word_map_;
    detail::VecMap<int> sig_map_;
    std::vector<StructNode> structs_;
    std::vector<int> sigs_of_structs_;
    detail::VecMap<int> struct_map_;
    std::unordered_map<int, std::vector<int>> structs_by_sig_;
    std::vector<LayoutNode> layouts_;
    detail::VecMap<int> layout_map_;
    std::unordered_map<int, std::vector<int>> layouts_by_sig_;
    detail::VecMap<int> ctx_map_;
    std::vector<Group> groups_;
    detail::VecMap<size_t> group_map_;
    std::unordered_map<int, std::vector<std::pair<int, long>>> struct_docs_;
};

}  // namespace litpred
