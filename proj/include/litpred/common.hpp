#pragma once

// Shared error types and small utilities used across the library.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace litpred {

// Errors map to CLI exit codes: usage 1, data 2, numerical 3.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input text (tree lines, labels, config files).
struct FormatError : DataError {
    using DataError::DataError;
};

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    size_t start = 0;
    while (true) {
        size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

// Shortest decimal representation that round-trips a double. Used for all
// artifact output so that reruns are byte-identical.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc())
        throw NumericalError("cannot format double");
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view s, std::string_view what) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw FormatError("bad number '" + std::string(s) + "' in " + std::string(what));
    return v;
}

inline long parse_long(std::string_view s, std::string_view what) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw FormatError("bad integer '" + std::string(s) + "' in " + std::string(what));
    return v;
}

// FNV-1a, used for config hashes and deterministic per-document seeds.
inline uint64_t fnv1a(std::string_view s, uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

// Runs tasks 0..n-1 on `workers` threads; results are collected in task
// order so the outcome does not depend on the worker count.
template <typename T>
std::vector<T> run_tasks(size_t n, int workers, const std::function<T(size_t)>& task) {
    std::vector<T> results(n);
    if (workers <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) results[i] = task(i);
        return results;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(n);
    std::atomic<size_t> next{0};
    size_t nthreads = std::min<size_t>(static_cast<size_t>(workers), n);
    for (size_t t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            while (true) {
                size_t i = next.fetch_add(1);
                if (i >= n) break;
                try {
                    results[i] = task(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

}  // namespace litpred
