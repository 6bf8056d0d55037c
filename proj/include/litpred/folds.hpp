#pragma once

// Cross-validation folds under two constraints: novels by one author stay
// in one fold, and each fold's rating histogram stays close to the global
// one. Author groups are snake-assigned in rating order, then improved by
// local swaps and moves.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "litpred/common.hpp"

namespace litpred {

struct Rating {
    double mean = 0;   // 1-7 scale
    long count = 0;    // number of raters
};

struct RatingsTable {
    std::map<std::string, Rating> by_doc;

    static RatingsTable load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open ratings: " + path.string());
        std::string line;
        if (!std::getline(in, line) || trim(line) != "doc_id,mean_rating,n_ratings")
            throw FormatError("ratings header must be doc_id,mean_rating,n_ratings");
        RatingsTable table;
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            auto fields = split(trim(line), ',');
            if (fields.size() != 3) throw FormatError("ratings line needs 3 fields: " + line);
            Rating r;
            r.mean = parse_double(fields[1], "mean_rating");
            r.count = parse_long(fields[2], "n_ratings");
            if (r.mean < 1.0 || r.mean > 7.0)
                throw DataError("rating out of the 1-7 range for " + std::string(fields[0]));
            table.by_doc.emplace(std::string(fields[0]), r);
        }
        return table;
    }

    const Rating& at(const std::string& doc_id) const {
        auto it = by_doc.find(doc_id);
        if (it == by_doc.end()) throw DataError("no rating for document " + doc_id);
        return it->second;
    }
};

// Binary convenience label used in reports.
inline bool is_literary(double rating) { return rating >= 5.0; }

struct FoldParams {
    int k = 5;
    uint64_t seed = 1;
    double histogram_tolerance = 2.0;  // max per-bin deviation, in documents
};

struct FoldAssignment {
    int k = 0;
    uint64_t seed = 0;
    std::map<std::string, int> fold_of;

    std::vector<std::vector<std::string>> folds() const {
        std::vector<std::vector<std::string>> out(static_cast<size_t>(k));
        for (auto& [doc, f] : fold_of) out[static_cast<size_t>(f)].push_back(doc);
        return out;
    }

    std::vector<std::string> training_docs(int test_fold) const {
        std::vector<std::string> out;
        for (auto& [doc, f] : fold_of)
            if (f != test_fold) out.push_back(doc);
        return out;
    }
};

namespace detail {

inline int rating_bin(double rating) {
    int b = static_cast<int>(std::floor(rating)) - 1;
    return std::clamp(b, 0, 6);
}

struct AuthorGroup {
    std::string author;
    std::vector<std::string> docs;
    double mean_rating = 0;
    std::array<int, 7> histogram{};
};

// Max per-bin absolute deviation of any fold histogram from the global
// histogram scaled to the fold's size.
inline double histogram_distance(const std::vector<std::array<int, 7>>& fold_hist,
                                 const std::vector<int>& fold_sizes,
                                 const std::array<int, 7>& global_hist, int total) {
    double worst = 0;
    for (size_t f = 0; f < fold_hist.size(); ++f) {
        double frac = static_cast<double>(fold_sizes[f]) / total;
        for (int b = 0; b < 7; ++b) {
            double expected = global_hist[static_cast<size_t>(b)] * frac;
            worst = std::max(worst,
                             std::fabs(fold_hist[f][static_cast<size_t>(b)] - expected));
        }
    }
    return worst;
}

}  // namespace detail

inline FoldAssignment make_folds(const std::vector<std::string>& doc_ids,
                                 const std::map<std::string, std::string>& author_of,
                                 const RatingsTable& ratings, const FoldParams& params = {}) {
    if (params.k < 2) throw UsageError("need at least 2 folds");
    if (doc_ids.size() < static_cast<size_t>(params.k))
        throw DataError("fewer documents than folds");
    int n = static_cast<int>(doc_ids.size());
    int k = params.k;
    size_t max_group = (static_cast<size_t>(n) + k - 1) / static_cast<size_t>(k);

    std::map<std::string, detail::AuthorGroup> by_author;
    for (const auto& id : doc_ids) {
        auto it = author_of.find(id);
        if (it == author_of.end()) throw DataError("no author for document " + id);
        auto& g = by_author[it->second];
        g.author = it->second;
        g.docs.push_back(id);
        double r = ratings.at(id).mean;
        g.mean_rating += r;
        ++g.histogram[static_cast<size_t>(detail::rating_bin(r))];
    }
    std::vector<detail::AuthorGroup> groups;
    for (auto& [author, g] : by_author) {
        g.mean_rating /= static_cast<double>(g.docs.size());
        if (g.docs.size() > max_group)
            throw DataError("author group '" + author + "' (" + std::to_string(g.docs.size()) +
                            " documents) exceeds ceil(N/k); folds cannot be balanced");
        groups.push_back(std::move(g));
    }
    // seed only breaks ties between otherwise equal groups
    std::sort(groups.begin(), groups.end(),
              [&](const detail::AuthorGroup& a, const detail::AuthorGroup& b) {
                  if (a.mean_rating != b.mean_rating) return a.mean_rating < b.mean_rating;
                  if (a.docs.size() != b.docs.size()) return a.docs.size() < b.docs.size();
                  return fnv1a(a.author, params.seed) < fnv1a(b.author, params.seed);
              });

    std::vector<int> fold_of_group(groups.size());
    std::vector<int> fold_sizes(static_cast<size_t>(k), 0);
    std::vector<std::array<int, 7>> fold_hist(static_cast<size_t>(k));
    std::array<int, 7> global_hist{};
    int pos = 0, direction = 1;
    for (size_t g = 0; g < groups.size(); ++g) {
        fold_of_group[g] = pos;
        fold_sizes[static_cast<size_t>(pos)] += static_cast<int>(groups[g].docs.size());
        for (int b = 0; b < 7; ++b) {
            fold_hist[static_cast<size_t>(pos)][static_cast<size_t>(b)] +=
                groups[g].histogram[static_cast<size_t>(b)];
            global_hist[static_cast<size_t>(b)] += groups[g].histogram[static_cast<size_t>(b)];
        }
        pos += direction;
        if (pos == k || pos < 0) {
            direction = -direction;
            pos += direction;
        }
    }

    size_t biggest = 1;
    for (const auto& g : groups) biggest = std::max(biggest, g.docs.size());
    auto sizes_ok = [&](const std::vector<int>& sizes) {
        auto [mn, mx] = std::minmax_element(sizes.begin(), sizes.end());
        return static_cast<size_t>(*mx - *mn) <= biggest;
    };

    // local improvement: swaps of two groups across folds, and single moves
    double current = detail::histogram_distance(fold_hist, fold_sizes, global_hist, n);
    for (int pass = 0; pass < 50; ++pass) {
        bool improved = false;
        for (size_t g1 = 0; g1 < groups.size(); ++g1) {
            for (size_t g2 = g1 + 1; g2 <= groups.size(); ++g2) {
                int f1 = fold_of_group[g1];
                bool is_move = g2 == groups.size();
                for (int target = 0; target < (is_move ? k : 1); ++target) {
                    int f2 = is_move ? target : fold_of_group[g2];
                    if (f1 == f2) continue;
                    auto sizes = fold_sizes;
                    auto hist = fold_hist;
                    int d1 = static_cast<int>(groups[g1].docs.size());
                    int d2 = is_move ? 0 : static_cast<int>(groups[g2].docs.size());
                    sizes[static_cast<size_t>(f1)] += d2 - d1;
                    sizes[static_cast<size_t>(f2)] += d1 - d2;
                    if (!sizes_ok(sizes)) continue;
                    for (int b = 0; b < 7; ++b) {
                        int h1 = groups[g1].histogram[static_cast<size_t>(b)];
                        int h2 = is_move ? 0 : groups[g2].histogram[static_cast<size_t>(b)];
                        hist[static_cast<size_t>(f1)][static_cast<size_t>(b)] += h2 - h1;
                        hist[static_cast<size_t>(f2)][static_cast<size_t>(b)] += h1 - h2;
                    }
                    double candidate =
                        detail::histogram_distance(hist, sizes, global_hist, n);
                    if (candidate < current - 1e-12) {
                        fold_sizes = std::move(sizes);
                        fold_hist = std::move(hist);
                        fold_of_group[g1] = f2;
                        if (!is_move) fold_of_group[g2] = f1;
                        current = candidate;
                        improved = true;
                        break;
                    }
                }
            }
        }
        if (!improved) break;
    }

    if (current > params.histogram_tolerance)
        throw DataError("fold stratification failed: max histogram deviation " +
                        format_double(current) + " exceeds tolerance " +
                        format_double(params.histogram_tolerance) +
                        " (relax histogram_tolerance in the config)");

    FoldAssignment out;
    out.k = k;
    out.seed = params.seed;
    for (size_t g = 0; g < groups.size(); ++g)
        for (const auto& doc : groups[g].docs) out.fold_of[doc] = fold_of_group[g];
    return out;
}

}  // namespace litpred
