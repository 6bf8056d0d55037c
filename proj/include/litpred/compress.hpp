#pragma once

// Block-sorting compressor for the compressibility feature: per block,
// Burrows-Wheeler transform, move-to-front, zero run-length coding, and
// canonical Huffman. A decoder is included so losslessness is testable;
// the feature itself only uses the compressed/raw size ratio.

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "litpred/common.hpp"

namespace litpred {

namespace bwt {

// Suffix array over text + virtual sentinel (smallest), by rank doubling.
inline std::vector<int> suffix_array(std::string_view s) {
    int n = static_cast<int>(s.size());
    int m = n + 1;  // index n = sentinel
    std::vector<int> sa(m), rank(m), tmp(m);
    for (int i = 0; i < m; ++i) sa[i] = i;
    for (int i = 0; i < n; ++i) rank[i] = static_cast<unsigned char>(s[i]) + 1;
    rank[n] = 0;
    for (int k = 1;; k *= 2) {
        auto cmp = [&](int a, int b) {
            if (rank[a] != rank[b]) return rank[a] < rank[b];
            int ra = a + k < m ? rank[a + k] : -1;
            int rb = b + k < m ? rank[b + k] : -1;
            return ra < rb;
        };
        std::sort(sa.begin(), sa.end(), cmp);
        tmp[sa[0]] = 0;
        for (int i = 1; i < m; ++i)
            tmp[sa[i]] = tmp[sa[i - 1]] + (cmp(sa[i - 1], sa[i]) ? 1 : 0);
        rank = tmp;
        if (rank[sa[m - 1]] == m - 1) break;
    }
    return sa;
}

struct Block {
    std::vector<uint8_t> last_column;  // without the sentinel byte
    uint32_t primary = 0;              // row whose last char is the sentinel
};

inline Block transform(std::string_view s) {
    auto sa = suffix_array(s);
    int m = static_cast<int>(sa.size());
    Block out;
    out.last_column.reserve(s.size());
    for (int j = 0; j < m; ++j) {
        int i = sa[j];
        if (i == 0) {
            out.primary = static_cast<uint32_t>(j);
            continue;  // last char of this rotation is the sentinel
        }
        out.last_column.push_back(static_cast<uint8_t>(s[static_cast<size_t>(i - 1)]));
    }
    return out;
}

inline std::string invert(const Block& block) {
    int n = static_cast<int>(block.last_column.size());
    if (n == 0) return {};
    if (block.primary > static_cast<uint32_t>(n))
        throw NumericalError("corrupt block-sorted data: bad primary index");
    // L' is last_column with the sentinel inserted at row `primary`;
    // F is the sentinel followed by the sorted bytes.
    std::array<int, 256> count{};
    for (uint8_t c : block.last_column) ++count[c];
    std::array<int, 256> first{};
    int acc = 1;
    for (int c = 0; c < 256; ++c) {
        first[static_cast<size_t>(c)] = acc;
        acc += count[static_cast<size_t>(c)];
    }
    std::vector<int> lf(static_cast<size_t>(n) + 1, 0);
    std::array<int, 256> seen{};
    for (int r = 0, li = 0; r <= n; ++r) {
        if (r == static_cast<int>(block.primary)) continue;
        uint8_t c = block.last_column[static_cast<size_t>(li++)];
        lf[static_cast<size_t>(r)] = first[c] + seen[c]++;
    }
    std::string out(static_cast<size_t>(n), '\0');
    int r = 0;  // row 0 starts with the sentinel; its last char ends the text
    for (int k = n - 1; k >= 0; --k) {
        if (r == static_cast<int>(block.primary))
            throw NumericalError("corrupt block-sorted data");
        int li = r - (r > static_cast<int>(block.primary) ? 1 : 0);
        out[static_cast<size_t>(k)] = static_cast<char>(block.last_column[static_cast<size_t>(li)]);
        r = lf[static_cast<size_t>(r)];
    }
    return out;
}

}  // namespace bwt

namespace detail {

// Zero-run coding over move-to-front output. Alphabet of 258 symbols:
// 0/1 encode zero-run digits (bijective base 2), v+1 encodes value v >= 1,
// 257 is end-of-block.
inline constexpr int kRunA = 0;
inline constexpr int kRunB = 1;
inline constexpr int kEob = 257;
inline constexpr int kAlphabet = 258;

inline void emit_run(uint64_t run, std::vector<uint16_t>& out) {
    while (run > 0) {
        uint64_t digit = (run - 1) % 2;  // 0 -> RUNA (weight 1), 1 -> RUNB (weight 2)
        out.push_back(digit == 0 ? kRunA : kRunB);
        run = (run - digit - 1) / 2;
    }
}

inline std::vector<uint16_t> mtf_rle_encode(const std::vector<uint8_t>& data) {
    std::array<uint8_t, 256> table;
    std::iota(table.begin(), table.end(), static_cast<uint8_t>(0));
    std::vector<uint16_t> out;
    out.reserve(data.size() / 2 + 16);
    uint64_t zero_run = 0;
    for (uint8_t byte : data) {
        int pos = 0;
        while (table[static_cast<size_t>(pos)] != byte) ++pos;
        if (pos > 0)
            std::rotate(table.begin(), table.begin() + pos, table.begin() + pos + 1);
        if (pos == 0) {
            ++zero_run;
            continue;
        }
        emit_run(zero_run, out);
        zero_run = 0;
        out.push_back(static_cast<uint16_t>(pos + 1));
    }
    emit_run(zero_run, out);
    out.push_back(kEob);
    return out;
}

inline std::vector<uint8_t> mtf_rle_decode(const std::vector<uint16_t>& symbols) {
    std::array<uint8_t, 256> table;
    std::iota(table.begin(), table.end(), static_cast<uint8_t>(0));
    std::vector<uint8_t> out;
    uint64_t run = 0, weight = 1;
    auto flush_run = [&] {
        for (uint64_t i = 0; i < run; ++i) out.push_back(table[0]);
        run = 0;
        weight = 1;
    };
    for (uint16_t sym : symbols) {
        if (sym == kEob) break;
        if (sym == kRunA || sym == kRunB) {
            run += (sym == kRunA ? 1 : 2) * weight;
            weight *= 2;
            continue;
        }
        flush_run();
        int pos = sym - 1;
        uint8_t byte = table[static_cast<size_t>(pos)];
        std::rotate(table.begin(), table.begin() + pos, table.begin() + pos + 1);
        out.push_back(byte);
    }
    flush_run();
    return out;
}

// Huffman code lengths by the two-queue method over sorted leaves. Depth is
// bounded by ~log_phi(block size), well under the 6-bit header field.
inline std::vector<int> huffman_lengths(const std::vector<uint64_t>& freq) {
    int n = static_cast<int>(freq.size());
    std::vector<int> lengths(static_cast<size_t>(n), 0);
    struct Node {
        uint64_t weight;
        int left, right, symbol;
    };
    std::vector<Node> nodes;
    for (int i = 0; i < n; ++i)
        if (freq[static_cast<size_t>(i)] > 0)
            nodes.push_back({freq[static_cast<size_t>(i)], -1, -1, i});
    if (nodes.empty()) return lengths;
    if (nodes.size() == 1) {
        lengths[static_cast<size_t>(nodes[0].symbol)] = 1;
        return lengths;
    }
    std::sort(nodes.begin(), nodes.end(),
              [](const Node& a, const Node& b) { return a.weight < b.weight; });
    std::vector<int> leaves, internal;
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) leaves.push_back(i);
    size_t li = 0, ii = 0;
    auto take = [&]() {
        bool leaf_ok = li < leaves.size();
        bool int_ok = ii < internal.size();
        if (leaf_ok && (!int_ok || nodes[static_cast<size_t>(leaves[li])].weight <=
                                       nodes[static_cast<size_t>(internal[ii])].weight))
            return leaves[li++];
        return internal[ii++];
    };
    while (leaves.size() - li + internal.size() - ii > 1) {
        int a = take();
        int b = take();
        nodes.push_back({nodes[static_cast<size_t>(a)].weight +
                             nodes[static_cast<size_t>(b)].weight,
                         a, b, -1});
        internal.push_back(static_cast<int>(nodes.size()) - 1);
    }
    std::vector<std::pair<int, int>> stack{{take(), 0}};
    while (!stack.empty()) {
        auto [idx, depth] = stack.back();
        stack.pop_back();
        const Node& node = nodes[static_cast<size_t>(idx)];
        if (node.symbol >= 0) {
            lengths[static_cast<size_t>(node.symbol)] = std::max(depth, 1);
        } else {
            stack.emplace_back(node.left, depth + 1);
            stack.emplace_back(node.right, depth + 1);
        }
    }
    return lengths;
}

inline std::vector<uint32_t> canonical_codes(const std::vector<int>& lengths) {
    int maxlen = 0;
    for (int l : lengths) maxlen = std::max(maxlen, l);
    std::vector<int> count(static_cast<size_t>(maxlen) + 1, 0);
    for (int l : lengths)
        if (l > 0) ++count[static_cast<size_t>(l)];
    std::vector<uint32_t> next(static_cast<size_t>(maxlen) + 1, 0);
    uint32_t code = 0;
    for (int l = 1; l <= maxlen; ++l) {
        code = (code + static_cast<uint32_t>(count[static_cast<size_t>(l - 1)])) << 1;
        next[static_cast<size_t>(l)] = code;
    }
    std::vector<uint32_t> codes(lengths.size(), 0);
    for (size_t i = 0; i < lengths.size(); ++i)
        if (lengths[i] > 0) codes[i] = next[static_cast<size_t>(lengths[i])]++;
    return codes;
}

struct BitWriter {
    std::string& out;
    uint64_t buffer = 0;
    int bits = 0;
    void write(uint32_t value, int nbits) {
        buffer = (buffer << nbits) | value;
        bits += nbits;
        while (bits >= 8) {
            out += static_cast<char>((buffer >> (bits - 8)) & 0xff);
            bits -= 8;
        }
    }
    void flush() {
        if (bits > 0) {
            out += static_cast<char>((buffer << (8 - bits)) & 0xff);
            bits = 0;
        }
    }
};

struct BitReader {
    std::string_view data;
    size_t pos;  // absolute byte position
    uint64_t buffer = 0;
    int bits = 0;
    uint32_t read(int nbits) {
        while (bits < nbits) {
            if (pos >= data.size()) throw NumericalError("truncated compressed data");
            buffer = (buffer << 8) | static_cast<uint8_t>(data[pos++]);
            bits += 8;
        }
        auto v = static_cast<uint32_t>((buffer >> (bits - nbits)) & ((1ull << nbits) - 1));
        bits -= nbits;
        return v;
    }
};

inline void put_u32(std::string& out, uint32_t v) {
    for (int i = 24; i >= 0; i -= 8) out += static_cast<char>((v >> i) & 0xff);
}

inline uint32_t get_u32(std::string_view s, size_t& pos) {
    if (pos + 4 > s.size()) throw NumericalError("truncated compressed data");
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | static_cast<uint8_t>(s[pos++]);
    return v;
}

}  // namespace detail

struct CompressParams {
    size_t block_size = 900000;  // maximum block size
};

inline std::string compress(std::string_view text, const CompressParams& params = {}) {
    if (params.block_size == 0) throw UsageError("block size must be positive");
    std::string out;
    detail::put_u32(out, static_cast<uint32_t>(text.size()));
    for (size_t off = 0; off < text.size(); off += params.block_size) {
        std::string_view chunk = text.substr(off, params.block_size);
        auto block = bwt::transform(chunk);
        auto symbols = detail::mtf_rle_encode(block.last_column);
        std::vector<uint64_t> freq(detail::kAlphabet, 0);
        for (uint16_t s : symbols) ++freq[s];
        auto lengths = detail::huffman_lengths(freq);
        auto codes = detail::canonical_codes(lengths);

        detail::put_u32(out, static_cast<uint32_t>(chunk.size()));
        detail::put_u32(out, block.primary);
        detail::BitWriter bw{out};
        for (int l : lengths) bw.write(static_cast<uint32_t>(l), 6);
        for (uint16_t s : symbols) bw.write(codes[s], lengths[s]);
        bw.flush();
    }
    return out;
}

inline std::string decompress(std::string_view data) {
    size_t pos = 0;
    uint32_t total = detail::get_u32(data, pos);
    std::string out;
    out.reserve(total);
    while (out.size() < total) {
        uint32_t block_len = detail::get_u32(data, pos);
        uint32_t primary = detail::get_u32(data, pos);
        detail::BitReader br{data, pos};
        std::vector<int> lengths(detail::kAlphabet);
        for (auto& l : lengths) l = static_cast<int>(br.read(6));
        auto codes = detail::canonical_codes(lengths);
        std::vector<uint16_t> symbols;
        while (true) {
            uint32_t code = 0;
            int len = 0;
            int sym = -1;
            while (sym < 0) {
                code = (code << 1) | br.read(1);
                ++len;
                if (len > 63) throw NumericalError("corrupt Huffman stream");
                for (int i = 0; i < detail::kAlphabet; ++i)
                    if (lengths[static_cast<size_t>(i)] == len &&
                        codes[static_cast<size_t>(i)] == code) {
                        sym = i;
                        break;
                    }
            }
            symbols.push_back(static_cast<uint16_t>(sym));
            if (sym == detail::kEob) break;
        }
        auto bytes = detail::mtf_rle_decode(symbols);
        if (bytes.size() != block_len)
            throw NumericalError("block length mismatch in compressed data");
        bwt::Block block;
        block.last_column = std::move(bytes);
        block.primary = primary;
        out += bwt::invert(block);
        pos = br.pos;  // bit reader consumed whole bytes up to here
    }
    return out;
}

// Compressed size divided by raw size; smaller means more compressible.
inline double compression_ratio(std::string_view text, const CompressParams& params = {}) {
    if (text.empty()) throw DataError("cannot compute compression ratio of empty text");
    return static_cast<double>(compress(text, params).size()) / static_cast<double>(text.size());
}

}  // namespace litpred
