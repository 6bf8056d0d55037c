#pragma once

// Stylometric features over windowed documents: sentence length, direct
// speech, vocabulary richness, compressibility, cliche rate, plus word and
// character n-gram counts and categorical metadata encodings.

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "litpred/common.hpp"
#include "litpred/compress.hpp"
#include "litpred/treebank.hpp"

namespace litpred {

namespace utf8 {

// Byte offsets of codepoint starts, plus one-past-the-end.
inline std::vector<size_t> codepoint_offsets(std::string_view s) {
    std::vector<size_t> offsets;
    for (size_t i = 0; i < s.size();) {
        offsets.push_back(i);
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (c < 0x80) i += 1;
        else if ((c >> 5) == 0x6) i += 2;
        else if ((c >> 4) == 0xe) i += 3;
        else if ((c >> 3) == 0x1e) i += 4;
        else i += 1;  // invalid byte: treat as one unit
    }
    offsets.push_back(s.size());
    return offsets;
}

}  // namespace utf8

namespace detail {

inline const std::set<std::string>& punct_codepoints() {
    static const std::set<std::string> set = {
        ".", ",", ";", ":", "!", "?", "'", "\"", "(", ")", "[", "]", "{", "}", "-",
        "_", "/", "\\", "*", "&", "%", "$", "#", "@", "+", "=", "<", ">", "~", "`",
        "‘", "’", "‚", "“", "”", "„", "–",
        "—", "…", "«", "»"};
    return set;
}

inline bool is_punct_token(std::string_view token) {
    if (token.empty()) return false;
    auto offsets = utf8::codepoint_offsets(token);
    for (size_t i = 0; i + 1 < offsets.size(); ++i) {
        std::string cp(token.substr(offsets[i], offsets[i + 1] - offsets[i]));
        if (!punct_codepoints().count(cp)) return false;
    }
    return true;
}

}  // namespace detail

// ---------------------------------------------------------------------
// Reference data
// ---------------------------------------------------------------------

// Token-trie over cliche expressions for leftmost-longest matching.
class ExpressionList {
  public:
    void add(const std::vector<std::string>& tokens) {
        if (tokens.empty()) return;
        int node = 0;
        for (const auto& t : tokens) {
            auto [it, inserted] = nodes_[static_cast<size_t>(node)].next.try_emplace(
                to_lower(t), static_cast<int>(nodes_.size()));
            if (inserted) nodes_.emplace_back();
            node = it->second;
        }
        nodes_[static_cast<size_t>(node)].terminal = true;
        ++size_;
    }

    size_t size() const { return size_; }

    // Length of the longest expression starting at `pos`, or 0.
    size_t longest_match(const std::vector<std::string>& tokens, size_t pos) const {
        int node = 0;
        size_t best = 0;
        for (size_t i = pos; i < tokens.size(); ++i) {
            auto it = nodes_[static_cast<size_t>(node)].next.find(to_lower(tokens[i]));
            if (it == nodes_[static_cast<size_t>(node)].next.end()) break;
            node = it->second;
            if (nodes_[static_cast<size_t>(node)].terminal) best = i - pos + 1;
        }
        return best;
    }

    static ExpressionList load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open expression list: " + path.string());
        ExpressionList list;
        std::string line;
        while (std::getline(in, line)) {
            auto t = trim(line);
            if (t.empty()) continue;
            std::vector<std::string> tokens;
            for (auto tok : split(t, ' '))
                if (!tok.empty()) tokens.emplace_back(tok);
            list.add(tokens);
        }
        return list;
    }

  private:
    struct Node {
        std::map<std::string, int> next;
        bool terminal = false;
    };
    std::vector<Node> nodes_{1};
    size_t size_ = 0;
};

struct ReferenceData {
    std::unordered_set<std::string> top_vocabulary;  // lowercased, first k of wordlist
    ExpressionList cliches;
    std::vector<std::string> speech_markers = {"\"", "„", "“", "”",
                                               "'",  "‘", "’", "—", "-"};

    static std::unordered_set<std::string> load_wordlist(const std::filesystem::path& path,
                                                         size_t k) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open wordlist: " + path.string());
        std::unordered_set<std::string> out;
        std::string line;
        while (out.size() < k && std::getline(in, line)) {
            auto t = trim(line);
            if (!t.empty()) out.insert(to_lower(t));
        }
        return out;
    }
};

// ---------------------------------------------------------------------
// Basic features
// ---------------------------------------------------------------------

struct BasicProfile {
    double mean_sentence_length = 0;  // tokens per sentence
    double direct_speech_ratio = 0;   // fraction of sentences
    double vocab_top_k = 0;           // fraction of tokens in the reference list
    double compression_ratio = 0;     // compressed bytes / raw bytes
    double cliche_rate = 0;           // matches per 1000 tokens

    static const std::vector<std::string>& names() {
        static const std::vector<std::string> n = {"mean_sentence_length", "direct_speech_ratio",
                                                   "vocab_top_k", "compression_ratio",
                                                   "cliche_rate"};
        return n;
    }
    std::vector<double> values() const {
        return {mean_sentence_length, direct_speech_ratio, vocab_top_k, compression_ratio,
                cliche_rate};
    }
};

// A sentence counts as direct speech when its first character is a speech
// marker or it contains a matched opening/closing quote pair.
inline bool is_direct_speech(const Sentence& sentence,
                             const std::vector<std::string>& markers) {
    if (markers.empty()) throw UsageError("direct speech marker set must not be empty");
    if (sentence.tokens.empty()) return false;
    const std::string& first = sentence.tokens.front();
    for (const auto& m : markers)
        if (first.compare(0, m.size(), m) == 0) return true;
    static const std::vector<std::pair<std::string, std::string>> pairs = {
        {"„", "”"}, {"„", "“"}, {"“", "”"},
        {"\"", "\""},         {"'", "'"},           {"‘", "’"}};
    std::string joined;
    for (const auto& t : sentence.tokens) {
        if (!joined.empty()) joined += ' ';
        joined += t;
    }
    for (const auto& [open, close] : pairs) {
        size_t o = joined.find(open);
        if (o != std::string::npos && joined.find(close, o + open.size()) != std::string::npos)
            return true;
    }
    return false;
}

inline double direct_speech_ratio(const Document& doc, const std::vector<std::string>& markers) {
    if (doc.sentences.empty()) throw DataError("empty document: " + doc.id);
    size_t hits = 0;
    for (const auto& s : doc.sentences)
        if (is_direct_speech(s, markers)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(doc.sentences.size());
}

// Leftmost-longest, token-boundary aligned, case-insensitive. Returns the
// raw number of matches.
inline long cliche_count(const Document& doc, const ExpressionList& cliches) {
    long count = 0;
    for (const auto& s : doc.sentences) {
        size_t pos = 0;
        while (pos < s.tokens.size()) {
            size_t len = cliches.longest_match(s.tokens, pos);
            if (len > 0) {
                ++count;
                pos += len;
            } else {
                ++pos;
            }
        }
    }
    return count;
}

inline BasicProfile basic_features(const Document& doc, const ReferenceData& refs,
                                   const CompressParams& compress_params = {}) {
    if (doc.sentences.empty()) throw DataError("empty document: " + doc.id);
    BasicProfile p;
    size_t tokens = doc.token_count();
    p.mean_sentence_length =
        static_cast<double>(tokens) / static_cast<double>(doc.sentences.size());
    p.direct_speech_ratio = direct_speech_ratio(doc, refs.speech_markers);

    size_t vocab_hits = 0, vocab_total = 0;
    for (const auto& s : doc.sentences)
        for (const auto& t : s.tokens) {
            if (detail::is_punct_token(t)) continue;
            ++vocab_total;
            if (refs.top_vocabulary.count(to_lower(t))) ++vocab_hits;
        }
    p.vocab_top_k = vocab_total == 0
                        ? 0.0
                        : static_cast<double>(vocab_hits) / static_cast<double>(vocab_total);
    p.compression_ratio = compression_ratio(doc.text(), compress_params);
    if (tokens > 0)
        p.cliche_rate =
            1000.0 * static_cast<double>(cliche_count(doc, refs.cliches)) /
            static_cast<double>(tokens);
    return p;
}

// ---------------------------------------------------------------------
// N-grams
// ---------------------------------------------------------------------

struct NgramParams {
    int n = 2;              // word default 2; char default 4
    bool lowercase = true;

    void validate() const {
        if (n < 1) throw UsageError("n-gram order must be >= 1");
    }
};

// Consecutive token n-grams within sentences; tokens joined by a space in
// the key. No n-gram crosses a sentence boundary.
inline std::map<std::string, long> word_ngrams(const Document& doc, const NgramParams& params) {
    params.validate();
    std::map<std::string, long> counts;
    size_t n = static_cast<size_t>(params.n);
    for (const auto& s : doc.sentences) {
        if (s.tokens.size() < n) continue;
        for (size_t i = 0; i + n <= s.tokens.size(); ++i) {
            std::string key;
            for (size_t k = 0; k < n; ++k) {
                if (k) key += ' ';
                key += params.lowercase ? to_lower(s.tokens[i + k]) : s.tokens[i + k];
            }
            ++counts[key];
        }
    }
    return counts;
}

// Contiguous codepoint n-grams over the whitespace-normalized window text,
// spaces included; sentence boundaries are invisible at this level.
inline std::map<std::string, long> char_ngrams(const Document& doc, const NgramParams& params) {
    params.validate();
    std::string text = doc.text();
    if (params.lowercase) text = to_lower(text);
    std::map<std::string, long> counts;
    auto offsets = utf8::codepoint_offsets(text);
    size_t cps = offsets.size() - 1;
    size_t n = static_cast<size_t>(params.n);
    if (cps < n) return counts;
    for (size_t i = 0; i + n <= cps; ++i)
        ++counts[text.substr(offsets[i], offsets[i + n] - offsets[i])];
    return counts;
}

// ---------------------------------------------------------------------
// Metadata
// ---------------------------------------------------------------------

struct MetadataRecord {
    std::string doc_id;
    std::string author;
    std::string genre;          // Fiction | Suspense | Romantic | Other | empty
    std::string translated;     // 0 | 1 | empty
    std::string author_gender;  // F | M | unknown | empty
};

inline std::vector<MetadataRecord> load_metadata(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open metadata: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty metadata file: " + path.string());
    if (trim(line) != "doc_id,author,genre,translated,author_gender")
        throw FormatError("metadata header must be doc_id,author,genre,translated,author_gender");
    std::vector<MetadataRecord> out;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto fields = split(trim(line), ',');
        if (fields.size() != 5)
            throw FormatError("metadata line needs 5 fields: " + line);
        MetadataRecord r;
        r.doc_id.assign(fields[0]);
        r.author.assign(fields[1]);
        r.genre.assign(fields[2]);
        r.translated.assign(fields[3]);
        r.author_gender.assign(fields[4]);
        out.push_back(std::move(r));
    }
    return out;
}

// One-hot encoding with explicit unknown columns. The column set is fixed,
// so matrices from different runs line up.
struct MetadataColumns {
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;  // aligned with input records
};

inline MetadataColumns metadata_features(const std::vector<MetadataRecord>& records) {
    static const std::vector<std::string> genres = {"Fiction", "Suspense", "Romantic", "Other"};
    static const std::vector<std::string> translated_vals = {"0", "1"};
    static const std::vector<std::string> genders = {"F", "M"};
    MetadataColumns out;
    for (const auto& g : genres) out.names.push_back("genre_" + g);
    out.names.push_back("genre_unknown");
    for (const auto& t : translated_vals) out.names.push_back("translated_" + t);
    out.names.push_back("translated_unknown");
    for (const auto& g : genders) out.names.push_back("author_gender_" + g);
    out.names.push_back("author_gender_unknown");

    auto one_hot = [](const std::string& value, const std::vector<std::string>& allowed,
                      const std::string& what) {
        std::vector<double> v(allowed.size() + 1, 0.0);
        if (value.empty() || value == "unknown") {
            v.back() = 1.0;
            return v;
        }
        for (size_t i = 0; i < allowed.size(); ++i)
            if (allowed[i] == value) {
                v[i] = 1.0;
                return v;
            }
        std::string msg = "unrecognized " + what + " value '" + value + "'; allowed:";
        for (const auto& a : allowed) msg += " " + a;
        msg += " unknown";
        throw DataError(msg);
    };
    for (const auto& r : records) {
        std::vector<double> row;
        for (double v : one_hot(r.genre, genres, "genre")) row.push_back(v);
        for (double v : one_hot(r.translated, translated_vals, "translated")) row.push_back(v);
        for (double v : one_hot(r.author_gender, genders, "author_gender")) row.push_back(v);
        out.rows.push_back(std::move(row));
    }
    return out;
}

// ---------------------------------------------------------------------
// Feature matrix
// ---------------------------------------------------------------------

// Sparse documents x features matrix with named, family-tagged columns.
class FeatureMatrix {
  public:
    explicit FeatureMatrix(std::vector<std::string> doc_ids = {}) : doc_ids_(std::move(doc_ids)) {
        for (size_t i = 0; i < doc_ids_.size(); ++i)
            row_index_[doc_ids_[i]] = static_cast<int>(i);
        rows_.resize(doc_ids_.size());
    }

    struct ColumnInfo {
        std::string name;
        std::string family;
    };

    int add_column(const std::string& name, const std::string& family) {
        if (column_index_.count(name)) throw UsageError("duplicate feature column: " + name);
        column_index_[name] = static_cast<int>(columns_.size());
        columns_.push_back({name, family});
        return static_cast<int>(columns_.size()) - 1;
    }

    void set(int row, int col, double value) {
        if (value == 0.0) return;
        rows_[static_cast<size_t>(row)][col] = value;
    }

    double get(int row, int col) const {
        const auto& r = rows_[static_cast<size_t>(row)];
        auto it = r.find(col);
        return it == r.end() ? 0.0 : it->second;
    }

    int row_of(const std::string& doc_id) const {
        auto it = row_index_.find(doc_id);
        if (it == row_index_.end()) throw DataError("unknown document: " + doc_id);
        return it->second;
    }

    size_t n_rows() const { return doc_ids_.size(); }
    size_t n_cols() const { return columns_.size(); }
    const std::vector<std::string>& doc_ids() const { return doc_ids_; }
    const std::vector<ColumnInfo>& columns() const { return columns_; }
    const std::map<int, double>& row(int r) const { return rows_[static_cast<size_t>(r)]; }

    std::vector<int> family_columns(const std::string& family) const {
        std::vector<int> out;
        for (size_t c = 0; c < columns_.size(); ++c)
            if (columns_[c].family == family) out.push_back(static_cast<int>(c));
        return out;
    }

    bool family_normalized(const std::string& family) const {
        return normalized_.count(family) > 0;
    }

    // Turns a family's counts into relative frequencies: each cell divided
    // by the document's denominator (the family's token total). A second
    // call for the same family is a no-op; zero denominators leave the row
    // as zeros and are reported.
    std::vector<std::string> relative_frequencies(const std::string& family,
                                                  const std::vector<double>& denominators) {
        std::vector<std::string> warnings;
        if (normalized_.count(family)) return warnings;
        if (denominators.size() != doc_ids_.size())
            throw UsageError("denominator vector must have one entry per document");
        auto cols = family_columns(family);
        std::set<int> colset(cols.begin(), cols.end());
        for (size_t r = 0; r < rows_.size(); ++r) {
            double denom = denominators[r];
            bool any = false;
            for (auto& [c, v] : rows_[r]) {
                if (!colset.count(c)) continue;
                if (denom <= 0.0) {
                    v = 0.0;
                    any = true;
                } else {
                    v /= denom;
                }
            }
            if (any)
                warnings.push_back("document " + doc_ids_[r] + ": zero " + family +
                                   " denominator; row zeroed");
        }
        normalized_.insert(family);
        return warnings;
    }

    void mark_normalized(const std::string& family) { normalized_.insert(family); }

  private:
    std::vector<std::string> doc_ids_;
    std::unordered_map<std::string, int> row_index_;
    std::vector<ColumnInfo> columns_;
    std::unordered_map<std::string, int> column_index_;
    std::vector<std::map<int, double>> rows_;
    std::set<std::string> normalized_;
};

}  // namespace litpred
