#pragma once

// Three-stage feature selection per test fold: frequency thresholds,
// correlation relevance with an uncorrected F-test, and greedy redundancy
// pruning. Operates on count columns over training documents only.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "litpred/common.hpp"
#include "litpred/corpus_index.hpp"
#include "litpred/stats.hpp"

namespace litpred {

struct SelectionParams {
    double min_doc_frac = 0.05;      // drop columns in fewer than 5% of texts
    long min_total = 50;             // drop columns with total count below this
    double alpha = 0.05;             // F-test significance level, uncorrected
    double redundancy_cutoff = 0.5;  // drop |r| above this against accepted columns
    bool correlate_relative = true;  // correlate relative frequencies, not raw counts

    void validate() const {
        if (min_doc_frac <= 0 || min_doc_frac >= 1)
            throw UsageError("min_doc_frac must be in (0, 1)");
        if (min_total < 1) throw UsageError("min_total must be >= 1");
        if (alpha <= 0 || alpha >= 1) throw UsageError("alpha must be in (0, 1)");
        if (redundancy_cutoff <= 0 || redundancy_cutoff > 1)
            throw UsageError("redundancy_cutoff must be in (0, 1]");
    }
};

struct SurvivorStat {
    std::string name;
    double r = 0;
    double p = 1;
};

struct SelectionReport {
    size_t initial = 0;
    size_t after_frequency = 0;
    size_t after_relevance = 0;
    size_t after_redundancy = 0;
    std::vector<SurvivorStat> survivors;                // greedy acceptance order
    std::vector<std::string> dropped_zero_variance;     // with column names
};

// Restricts a count matrix to a document subset (training folds); columns
// that become empty are removed.
inline CountMatrix restrict_rows(const CountMatrix& matrix,
                                 const std::vector<std::string>& doc_ids) {
    std::unordered_map<std::string, int> new_row;
    CountMatrix out;
    out.doc_ids = doc_ids;
    for (size_t i = 0; i < doc_ids.size(); ++i) new_row[doc_ids[i]] = static_cast<int>(i);
    std::vector<int> remap(matrix.doc_ids.size(), -1);
    for (size_t i = 0; i < matrix.doc_ids.size(); ++i) {
        auto it = new_row.find(matrix.doc_ids[i]);
        if (it != new_row.end()) remap[i] = it->second;
    }
    for (const auto& col : matrix.columns) {
        CountMatrix::Column c;
        c.form = col.form;
        for (auto& [row, count] : col.cells)
            if (remap[static_cast<size_t>(row)] >= 0)
                c.cells.emplace_back(remap[static_cast<size_t>(row)], count);
        std::sort(c.cells.begin(), c.cells.end());
        if (!c.cells.empty()) out.columns.push_back(std::move(c));
    }
    return out;
}

// Stage 1: keep columns attested in at least min_doc_frac of the documents
// and with total count at least min_total.
inline CountMatrix frequency_filter(const CountMatrix& matrix, const SelectionParams& params) {
    params.validate();
    CountMatrix out;
    out.doc_ids = matrix.doc_ids;
    double min_docs = params.min_doc_frac * static_cast<double>(matrix.doc_ids.size());
    for (const auto& col : matrix.columns) {
        if (static_cast<double>(col.doc_freq()) + 1e-9 < min_docs) continue;
        if (col.total() < params.min_total) continue;
        out.columns.push_back(col);
    }
    return out;
}

// Dense per-column values used for the correlation stages: relative
// frequencies (count / per-document denominator) or raw counts.
inline std::vector<double> column_values(const CountMatrix::Column& col, size_t n_rows,
                                         const std::vector<double>& denominators,
                                         bool relative) {
    std::vector<double> v(n_rows, 0.0);
    for (auto& [row, count] : col.cells) {
        double x = static_cast<double>(count);
        if (relative) {
            double d = denominators[static_cast<size_t>(row)];
            x = d > 0 ? x / d : 0.0;
        }
        v[static_cast<size_t>(row)] = x;
    }
    return v;
}

// Stages 2 and 3 share the dense representation.
struct SelectionResult {
    SelectionReport report;
    std::vector<std::string> selected;  // canonical forms, greedy order
};

// Stage 2: Pearson correlation with the ratings; keep p <= alpha under the
// F-test with (1, N-2) degrees of freedom. P-values stay uncorrected.
// Stage 3: greedily accept the most relevant column and discard remaining
// columns whose feature-vector correlation with it exceeds the cutoff.
inline SelectionResult select_features(const CountMatrix& counts,
                                       const std::vector<double>& denominators,
                                       const std::vector<double>& ratings,
                                       const SelectionParams& params, size_t initial_count,
                                       int workers = 1) {
    params.validate();
    size_t n = counts.doc_ids.size();
    if (ratings.size() != n)
        throw UsageError("selection needs one rating per training document");

    SelectionResult result;
    result.report.initial = initial_count;
    CountMatrix filtered = frequency_filter(counts, params);
    result.report.after_frequency = filtered.columns.size();

    struct Scored {
        const CountMatrix::Column* col;
        std::vector<double> values;
        double r, p;
    };
    struct RelevanceOut {
        Scored scored;
        bool kept = false;
        bool zero_variance = false;
    };
    auto outs = run_tasks<RelevanceOut>(filtered.columns.size(), workers, [&](size_t ci) {
        RelevanceOut out;
        const auto& col = filtered.columns[ci];
        out.scored.col = &col;
        out.scored.values =
            column_values(col, n, denominators, params.correlate_relative);
        auto r = pearson(out.scored.values, ratings);
        if (!r) {
            out.zero_variance = true;
            return out;
        }
        out.scored.r = *r;
        out.scored.p = f_test_p_value(*r, n);
        out.kept = out.scored.p <= params.alpha;
        return out;
    });
    std::vector<Scored> relevant;
    for (auto& o : outs) {
        if (o.zero_variance) {
            result.report.dropped_zero_variance.push_back(o.scored.col->form);
            continue;
        }
        if (o.kept) relevant.push_back(std::move(o.scored));
    }
    result.report.after_relevance = relevant.size();

    std::sort(relevant.begin(), relevant.end(), [](const Scored& a, const Scored& b) {
        double aa = std::fabs(a.r), bb = std::fabs(b.r);
        if (aa != bb) return aa > bb;
        return a.col->form < b.col->form;
    });

    std::vector<bool> removed(relevant.size(), false);
    for (size_t i = 0; i < relevant.size(); ++i) {
        if (removed[i]) continue;
        result.report.survivors.push_back({relevant[i].col->form, relevant[i].r, relevant[i].p});
        result.selected.push_back(relevant[i].col->form);
        for (size_t j = i + 1; j < relevant.size(); ++j) {
            if (removed[j]) continue;
            auto rr = pearson(relevant[i].values, relevant[j].values);
            if (rr && std::fabs(*rr) > params.redundancy_cutoff) removed[j] = true;
        }
    }
    result.report.after_redundancy = result.selected.size();
    return result;
}

}  // namespace litpred
