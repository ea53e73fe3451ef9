#pragma once

// Brute-force reference computations over explicit bit tables, sharing no code
// with the trie-based library beyond Word and Rational.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "effergo/rational.hpp"
#include "effergo/word.hpp"

namespace oracle {

using effergo::Rational;
using effergo::Word;

/// A subset of {0,1}^depth as a membership table indexed by the word read as a binary number.
struct Table {
    std::size_t depth = 0;
    std::vector<char> in;

    static Table of(const std::vector<Word>& words, std::size_t depth) {
        Table t{depth, std::vector<char>(std::size_t{1} << depth, 0)};
        for (std::size_t code = 0; code < t.in.size(); ++code) {
            std::string bits = t.bits(code);
            for (const auto& w : words) {
                if (w.size() <= depth && bits.compare(0, w.size(), w.str()) == 0) {
                    t.in[code] = 1;
                    break;
                }
            }
        }
        return t;
    }

    std::string bits(std::size_t code) const {
        std::string s(depth, '0');
        for (std::size_t i = 0; i < depth; ++i) s[depth - 1 - i] = ((code >> i) & 1u) ? '1' : '0';
        return s;
    }

    bool contains(const std::string& prefix) const {
        std::size_t code = 0;
        for (std::size_t i = 0; i < depth; ++i) code = (code << 1) | (prefix[i] == '1' ? 1u : 0u);
        return in[code] != 0;
    }

    Rational mass() const {
        std::size_t count = 0;
        for (char c : in) count += c ? 1 : 0;
        return Rational(effergo::Integer(count), effergo::Integer(1) << depth);
    }
};

inline Rational measure(const std::vector<Word>& words) {
    std::size_t depth = 0;
    for (const auto& w : words) depth = std::max(depth, w.size());
    return Table::of(words, depth).mass();
}

/// Measure of {ω of length `depth` : pred(ω)}.
inline Rational measure_where(std::size_t depth, const std::function<bool(const std::string&)>& pred) {
    std::size_t count = 0;
    const std::size_t total = std::size_t{1} << depth;
    std::string bits(depth, '0');
    for (std::size_t code = 0; code < total; ++code) {
        for (std::size_t i = 0; i < depth; ++i) bits[depth - 1 - i] = ((code >> i) & 1u) ? '1' : '0';
        if (pred(bits)) ++count;
    }
    return Rational(effergo::Integer(count), effergo::Integer(1) << depth);
}

inline bool member(const std::vector<Word>& words, const std::string& point) {
    for (const auto& w : words) {
        if (w.size() <= point.size() && point.compare(0, w.size(), w.str()) == 0) return true;
    }
    return false;
}

// Reference forward maps on explicit finite prefixes.

inline std::string shift(const std::string& w) { return w.empty() ? w : w.substr(1); }

/// Adds 1 with carry to the first bit; the carry past the end is dropped, so
/// the result is correct as a prefix whenever some bit is 0.
inline std::string odometer(std::string w) {
    for (auto& c : w) {
        if (c == '0') {
            c = '1';
            return w;
        }
        c = '0';
    }
    return w;
}

inline std::int64_t unzig(std::size_t j) {
    return (j % 2 == 0) ? static_cast<std::int64_t>(j / 2) : -static_cast<std::int64_t>((j + 1) / 2);
}

inline std::size_t zig(std::int64_t i) { return i >= 0 ? static_cast<std::size_t>(2 * i) : static_cast<std::size_t>(-2 * i - 1); }

/// Bit at bidirectional index i of an embedded word, or -1 when beyond it.
inline int bi_bit(const std::string& w, std::int64_t i) {
    std::size_t z = zig(i);
    return z < w.size() ? (w[z] == '1') : -1;
}

// Hand-rolled generators.

struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

    Word word(std::size_t max_len) {
        std::size_t len = below(max_len + 1);
        std::string s;
        for (std::size_t i = 0; i < len; ++i) s.push_back(below(2) ? '1' : '0');
        return Word(s);
    }

    std::vector<Word> words(std::size_t count_max, std::size_t max_len) {
        std::vector<Word> out;
        std::size_t n = below(count_max + 1);
        for (std::size_t i = 0; i < n; ++i) out.push_back(word(max_len));
        return out;
    }
};

/// Every canonical clopen set of depth <= depth, as subsets of {0,1}^depth.
inline void for_each_subset(std::size_t depth, const std::function<void(const std::vector<Word>&)>& visit) {
    const std::size_t cells = std::size_t{1} << depth;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cells); ++mask) {
        std::vector<Word> words;
        Table t{depth, {}};
        for (std::size_t c = 0; c < cells; ++c) {
            if ((mask >> c) & 1u) words.push_back(Word(t.bits(c)));
        }
        visit(words);
    }
}

} // namespace oracle
