#pragma once

// Documents and corpus loading. A document is a directory entry <id>.trees
// (one tree per line, blank lines ignored) or <id>.tokens (one sentence per
// line, space-separated tokens). Tree terminals double as tokens.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "litpred/common.hpp"
#include "litpred/discbracket.hpp"
#include "litpred/tree.hpp"

namespace litpred {

struct Sentence {
    std::vector<std::string> tokens;
    std::optional<ParseTree> tree;
};

struct Document {
    std::string id;
    std::vector<Sentence> sentences;

    size_t token_count() const {
        size_t n = 0;
        for (const auto& s : sentences) n += s.tokens.size();
        return n;
    }

    bool has_trees() const {
        for (const auto& s : sentences)
            if (!s.tree) return false;
        return !sentences.empty();
    }

    // Window text for character-level features: tokens joined by single
    // spaces, sentences likewise (whitespace runs collapse to one space).
    std::string text() const {
        std::string out;
        for (const auto& s : sentences)
            for (const auto& t : s.tokens) {
                if (!out.empty()) out += ' ';
                out += t;
            }
        return out;
    }
};

// Maps fine-grained morphological tags to a retained coarse set; a tag
// mapped to "-" is dropped, unlisted tags pass through unchanged.
struct MorphologyMap {
    std::unordered_map<std::string, std::string> mapping;

    static MorphologyMap load(const std::filesystem::path& path) {
        MorphologyMap m;
        std::ifstream in(path);
        if (!in) throw DataError("cannot open morphology map: " + path.string());
        std::string line;
        while (std::getline(in, line)) {
            auto t = trim(line);
            if (t.empty() || t.front() == '#') continue;
            size_t sep = t.find_first_of(" \t");
            if (sep == std::string_view::npos)
                throw FormatError("morphology map line needs two fields: " + line);
            m.mapping.emplace(trim(t.substr(0, sep)), trim(t.substr(sep + 1)));
        }
        return m;
    }

    void apply(Label& label) const {
        if (mapping.empty()) return;
        std::vector<std::string> kept;
        for (auto& tag : label.morph) {
            auto it = mapping.find(tag);
            if (it == mapping.end())
                kept.push_back(std::move(tag));
            else if (it->second != "-")
                kept.push_back(it->second);
        }
        label.morph = std::move(kept);
    }

    void apply(TreeNode& node) const {
        if (!node.is_terminal()) apply(node.label);
        for (auto& c : node.children) apply(c);
    }
};

// Restricts a document to sentences [start, end). The default window,
// sentences 1000-2000, skips the opening of a novel and fixes the length.
struct WindowParams {
    size_t start = 1000;
    size_t end = 2000;
};

inline Document select_window(const Document& doc, size_t start, size_t end) {
    if (end <= start) throw UsageError("window end must be greater than start");
    if (doc.sentences.size() < end)
        throw DataError("document " + doc.id + " has " + std::to_string(doc.sentences.size()) +
                        " sentences, fewer than window end " + std::to_string(end));
    Document out;
    out.id = doc.id;
    out.sentences.assign(doc.sentences.begin() + static_cast<long>(start),
                         doc.sentences.begin() + static_cast<long>(end));
    return out;
}

inline std::vector<std::string> tokens_from_tree(const ParseTree& tree) {
    std::map<int, std::string> by_index;
    std::vector<const TreeNode*> stack{&tree.root};
    while (!stack.empty()) {
        const TreeNode* n = stack.back();
        stack.pop_back();
        if (n->is_terminal())
            by_index[n->index] = n->word;
        else
            for (const auto& c : n->children) stack.push_back(&c);
    }
    std::vector<std::string> out;
    out.reserve(by_index.size());
    for (auto& [idx, word] : by_index) out.push_back(std::move(word));
    return out;
}

inline Document load_document(const std::string& id, const std::filesystem::path& trees_file,
                              const std::filesystem::path& tokens_file,
                              const MorphologyMap& morph = {}) {
    Document doc;
    doc.id = id;
    if (!trees_file.empty()) {
        std::ifstream in(trees_file);
        if (!in) throw DataError("cannot open " + trees_file.string());
        std::string line;
        size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (trim(line).empty()) continue;
            Sentence s;
            try {
                s.tree = parse_discbracket(line);
            } catch (const FormatError& e) {
                throw FormatError(trees_file.string() + ":" + std::to_string(lineno) + ": " +
                                  e.what());
            }
            morph.apply(s.tree->root);
            s.tokens = tokens_from_tree(*s.tree);
            doc.sentences.push_back(std::move(s));
        }
    } else {
        std::ifstream in(tokens_file);
        if (!in) throw DataError("cannot open " + tokens_file.string());
        std::string line;
        while (std::getline(in, line)) {
            auto t = trim(line);
            if (t.empty()) continue;
            Sentence s;
            for (auto tok : split(t, ' '))
                if (!tok.empty()) s.tokens.emplace_back(tok);
            doc.sentences.push_back(std::move(s));
        }
    }
    if (doc.sentences.empty()) throw DataError("document " + id + " is empty");
    return doc;
}

struct Corpus {
    std::vector<Document> documents;  // sorted by id

    const Document* find(const std::string& id) const {
        for (const auto& d : documents)
            if (d.id == id) return &d;
        return nullptr;
    }
};

// Scans a corpus directory for <id>.trees / <id>.tokens files. Loading is
// per-file parallel; documents are merged back in sorted id order.
inline Corpus load_corpus(const std::filesystem::path& dir, const MorphologyMap& morph = {},
                          int workers = 1) {
    if (!std::filesystem::is_directory(dir))
        throw DataError("corpus directory not found: " + dir.string());
    std::map<std::string, std::pair<std::filesystem::path, std::filesystem::path>> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        auto path = entry.path();
        if (path.extension() == ".trees")
            files[path.stem().string()].first = path;
        else if (path.extension() == ".tokens")
            files[path.stem().string()].second = path;
    }
    if (files.empty()) throw DataError("no .trees or .tokens files in " + dir.string());
    std::vector<std::pair<std::string, std::pair<std::filesystem::path, std::filesystem::path>>>
        entries(files.begin(), files.end());
    Corpus corpus;
    corpus.documents = run_tasks<Document>(
        entries.size(), workers, [&](size_t i) {
            const auto& [id, paths] = entries[i];
            return load_document(id, paths.first, paths.second, morph);
        });
    return corpus;
}

}  // namespace litpred
