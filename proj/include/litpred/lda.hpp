#pragma once

// Latent Dirichlet Allocation by collapsed Gibbs sampling. Single-threaded
// on purpose: given a seed, fitting and inference are bit-reproducible.

#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "litpred/common.hpp"

namespace litpred {

struct LdaParams {
    int topics = 50;
    double alpha = 0;  // 0 = use 50/K
    double beta = 0.01;
    int iterations = 1000;
    int infer_iterations = 50;
    uint64_t seed = 1;

    double effective_alpha() const { return alpha > 0 ? alpha : 50.0 / topics; }
    void validate() const {
        if (topics < 2) throw UsageError("LDA needs at least 2 topics");
        if (beta <= 0 || effective_alpha() <= 0) throw UsageError("LDA priors must be positive");
        if (iterations < 1) throw UsageError("LDA needs at least one sweep");
    }
};

class LdaModel {
  public:
    // Documents are token lists; stopwords and casing are the caller's
    // concern except for the stopword filter applied here.
    static LdaModel fit(const std::vector<std::vector<std::string>>& docs,
                        const LdaParams& params,
                        const std::unordered_set<std::string>& stopwords = {}) {
        params.validate();
        LdaModel model;
        model.params_ = params;
        for (const auto& doc : docs)
            for (const auto& tok : doc) {
                std::string w = to_lower(tok);
                if (stopwords.count(w)) continue;
                if (!model.vocab_index_.count(w)) {
                    model.vocab_index_[w] = static_cast<int>(model.vocab_.size());
                    model.vocab_.push_back(w);
                }
            }
        if (model.vocab_.empty())
            throw DataError("LDA vocabulary is empty after stopword filtering");

        int K = params.topics;
        int V = static_cast<int>(model.vocab_.size());
        model.topic_word_.assign(static_cast<size_t>(K) * static_cast<size_t>(V), 0);
        model.topic_total_.assign(static_cast<size_t>(K), 0);

        std::vector<std::vector<int>> doc_words(docs.size());
        for (size_t d = 0; d < docs.size(); ++d)
            for (const auto& tok : docs[d]) {
                auto it = model.vocab_index_.find(to_lower(tok));
                if (it != model.vocab_index_.end()) doc_words[d].push_back(it->second);
            }

        std::mt19937_64 rng(params.seed);
        std::vector<std::vector<int>> assignment(docs.size());
        std::vector<std::vector<long>> doc_topic(docs.size(), std::vector<long>(K, 0));
        for (size_t d = 0; d < docs.size(); ++d) {
            assignment[d].resize(doc_words[d].size());
            for (size_t i = 0; i < doc_words[d].size(); ++i) {
                int z = static_cast<int>(rng() % static_cast<uint64_t>(K));
                assignment[d][i] = z;
                ++doc_topic[d][static_cast<size_t>(z)];
                ++model.topic_word_[static_cast<size_t>(z) * V + doc_words[d][i]];
                ++model.topic_total_[static_cast<size_t>(z)];
            }
        }

        double alpha = params.effective_alpha(), beta = params.beta;
        std::vector<double> weights(static_cast<size_t>(K));
        for (int sweep = 0; sweep < params.iterations; ++sweep) {
            for (size_t d = 0; d < docs.size(); ++d) {
                for (size_t i = 0; i < doc_words[d].size(); ++i) {
                    int w = doc_words[d][i];
                    int z = assignment[d][i];
                    --doc_topic[d][static_cast<size_t>(z)];
                    --model.topic_word_[static_cast<size_t>(z) * V + w];
                    --model.topic_total_[static_cast<size_t>(z)];
                    double sum = 0;
                    for (int k = 0; k < K; ++k) {
                        double p =
                            (doc_topic[d][static_cast<size_t>(k)] + alpha) *
                            (model.topic_word_[static_cast<size_t>(k) * V + w] + beta) /
                            (model.topic_total_[static_cast<size_t>(k)] + beta * V);
                        sum += p;
                        weights[static_cast<size_t>(k)] = sum;
                    }
                    double u = std::uniform_real_distribution<double>(0, sum)(rng);
                    int nz = 0;
                    while (nz + 1 < K && weights[static_cast<size_t>(nz)] < u) ++nz;
                    assignment[d][i] = nz;
                    ++doc_topic[d][static_cast<size_t>(nz)];
                    ++model.topic_word_[static_cast<size_t>(nz) * V + w];
                    ++model.topic_total_[static_cast<size_t>(nz)];
                }
            }
        }
        return model;
    }

    // Topic weights for one document, holding topic-word counts fixed.
    // The RNG is seeded from the document id, so results do not depend on
    // the order documents are queried in.
    std::vector<double> infer(const std::vector<std::string>& tokens,
                              const std::string& doc_id) const {
        int K = params_.topics;
        int V = static_cast<int>(vocab_.size());
        std::vector<int> words;
        for (const auto& tok : tokens) {
            auto it = vocab_index_.find(to_lower(tok));
            if (it != vocab_index_.end()) words.push_back(it->second);
        }
        std::vector<long> doc_topic(static_cast<size_t>(K), 0);
        double alpha = params_.effective_alpha(), beta = params_.beta;
        if (words.empty()) {
            std::vector<double> uniform(static_cast<size_t>(K),
                                        1.0 / static_cast<double>(K));
            return uniform;
        }
        std::mt19937_64 rng(fnv1a(doc_id, params_.seed ^ 0x9e3779b97f4a7c15ull));
        std::vector<int> assignment(words.size());
        for (size_t i = 0; i < words.size(); ++i) {
            int z = static_cast<int>(rng() % static_cast<uint64_t>(K));
            assignment[i] = z;
            ++doc_topic[static_cast<size_t>(z)];
        }
        std::vector<double> weights(static_cast<size_t>(K));
        for (int sweep = 0; sweep < params_.infer_iterations; ++sweep) {
            for (size_t i = 0; i < words.size(); ++i) {
                int w = words[i];
                int z = assignment[i];
                --doc_topic[static_cast<size_t>(z)];
                double sum = 0;
                for (int k = 0; k < K; ++k) {
                    double p = (doc_topic[static_cast<size_t>(k)] + alpha) *
                               (topic_word_[static_cast<size_t>(k) * V + w] + beta) /
                               (topic_total_[static_cast<size_t>(k)] + beta * V);
                    sum += p;
                    weights[static_cast<size_t>(k)] = sum;
                }
                double u = std::uniform_real_distribution<double>(0, sum)(rng);
                int nz = 0;
                while (nz + 1 < K && weights[static_cast<size_t>(nz)] < u) ++nz;
                assignment[i] = nz;
                ++doc_topic[static_cast<size_t>(nz)];
            }
        }
        std::vector<double> out(static_cast<size_t>(K));
        double denom = static_cast<double>(words.size()) + alpha * K;
        for (int k = 0; k < K; ++k)
            out[static_cast<size_t>(k)] =
                (doc_topic[static_cast<size_t>(k)] + alpha) / denom;
        return out;
    }

    const LdaParams& params() const { return params_; }
    size_t vocabulary_size() const { return vocab_.size(); }

  private:
    LdaParams params_;
    std::vector<std::string> vocab_;
    std::unordered_map<std::string, int> vocab_index_;
    std::vector<long> topic_word_;   // K x V
    std::vector<long> topic_total_;  // K
};

inline LdaModel lda_fit(const std::vector<std::vector<std::string>>& docs,
                        const LdaParams& params,
                        const std::unordered_set<std::string>& stopwords = {}) {
    return LdaModel::fit(docs, params, stopwords);
}

inline std::vector<double> lda_infer(const LdaModel& model,
                                     const std::vector<std::string>& tokens,
                                     const std::string& doc_id) {
    return model.infer(tokens, doc_id);
}

}  // namespace litpred
