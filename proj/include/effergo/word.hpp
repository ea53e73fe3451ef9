#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>

#include "effergo/errors.hpp"

namespace effergo {

/// A finite binary word. The empty word names the whole space.
///
/// Words order canonically: shorter first, then lexicographically by bits.
class Word {
public:
    Word() = default;

    /// Parses a string of '0'/'1' characters.
    explicit Word(std::string_view bits) : bits_(bits) {
        for (char c : bits_) {
            if (c != '0' && c != '1') {
                throw SchemaError("word contains a non-binary character: '" + std::string(bits) + "'");
            }
        }
    }

    /// Wraps bits already known to be '0'/'1' without re-validating them.
    static Word unchecked(std::string bits) {
        Word w;
        w.bits_ = std::move(bits);
        return w;
    }

    static Word repeat(int bit, std::size_t count) {
        Word w;
        w.bits_.assign(count, bit ? '1' : '0');
        return w;
    }

    std::size_t size() const noexcept { return bits_.size(); }
    bool empty() const noexcept { return bits_.empty(); }
    int operator[](std::size_t i) const { return bits_[i] == '1' ? 1 : 0; }

    const std::string& str() const noexcept { return bits_; }

    void push_back(int bit) { bits_.push_back(bit ? '1' : '0'); }
    void pop_back() { bits_.pop_back(); }

    Word with(int bit) const {
        Word w = *this;
        w.push_back(bit);
        return w;
    }

    Word prefix(std::size_t n) const {
        Word w;
        w.bits_ = bits_.substr(0, n);
        return w;
    }

    Word suffix_from(std::size_t start) const {
        Word w;
        if (start < bits_.size()) w.bits_ = bits_.substr(start);
        return w;
    }

    bool is_prefix_of(const Word& other) const noexcept {
        return bits_.size() <= other.bits_.size() &&
               other.bits_.compare(0, bits_.size(), bits_) == 0;
    }

    /// True when one word is a prefix of the other (their cylinders intersect).
    bool compatible_with(const Word& other) const noexcept {
        return is_prefix_of(other) || other.is_prefix_of(*this);
    }

    Word& operator+=(const Word& tail) {
        bits_ += tail.bits_;
        return *this;
    }

    friend Word operator+(Word head, const Word& tail) {
        head += tail;
        return head;
    }

    friend bool operator==(const Word&, const Word&) = default;

    friend std::strong_ordering operator<=>(const Word& a, const Word& b) {
        if (auto c = a.bits_.size() <=> b.bits_.size(); c != 0) return c;
        return a.bits_.compare(b.bits_) <=> 0;
    }

private:
    std::string bits_;
};

namespace literals {
inline Word operator""_w(const char* s, std::size_t n) { return Word(std::string_view(s, n)); }
} // namespace literals

/// All 2^length words of the given length, in canonical order.
template <typename F>
void for_each_word(std::size_t length, F&& visit) {
    std::string bits(length, '0');
    const std::size_t total = std::size_t{1} << length;
    for (std::size_t code = 0; code < total; ++code) {
        for (std::size_t i = 0; i < length; ++i) {
            bits[i] = ((code >> (length - 1 - i)) & 1u) ? '1' : '0';
        }
        visit(Word::unchecked(bits));
    }
}

} // namespace effergo
