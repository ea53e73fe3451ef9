#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "effergo/word.hpp"

namespace effergo {

namespace detail {

// Binary trie over Cantor space. Leaves are Empty or Full; a branch node
// splits on the next bit. Branches whose children are the same leaf are
// collapsed on construction, which is exactly sibling merging.
class Trie {
public:
    using Id = std::int32_t;
    static constexpr Id kEmpty = -1;
    static constexpr Id kFull = -2;

    static bool is_leaf(Id id) noexcept { return id < 0; }

    Id branch(Id zero, Id one) {
        if (zero == one && is_leaf(zero)) return zero;
        nodes_.push_back({zero, one});
        return static_cast<Id>(nodes_.size() - 1);
    }

    Id child(Id id, int bit) const { return is_leaf(id) ? id : nodes_[static_cast<std::size_t>(id)][bit]; }

    // Words must be sorted lexicographically (as strings).
    Id build(std::span<const Word> sorted, std::size_t depth = 0) {
        if (sorted.empty()) return kEmpty;
        if (sorted.front().size() == depth) return kFull;  // a prefix absorbs the rest
        auto split = std::partition_point(sorted.begin(), sorted.end(),
                                          [depth](const Word& w) { return w[depth] == 0; });
        auto left = static_cast<std::size_t>(split - sorted.begin());
        Id zero = build(sorted.subspan(0, left), depth + 1);
        Id one = build(sorted.subspan(left), depth + 1);
        return branch(zero, one);
    }

    Id copy_from(const Trie& other, Id id) {
        if (is_leaf(id)) return id;
        Id zero = copy_from(other, other.child(id, 0));
        Id one = copy_from(other, other.child(id, 1));
        return branch(zero, one);
    }

    // Pointwise boolean combination; `op(a, b)` is evaluated on leaves.
    template <typename Op>
    Id combine(const Trie& ta, Id a, const Trie& tb, Id b, Op op) {
        if (is_leaf(a) && is_leaf(b)) return op(a == kFull, b == kFull) ? kFull : kEmpty;
        if (is_leaf(a)) {
            bool full = a == kFull;
            if (op(full, false) == op(full, true)) return op(full, false) ? kFull : kEmpty;
            if (op(full, true) && !op(full, false)) return copy_from(tb, b);
        }
        if (is_leaf(b)) {
            bool full = b == kFull;
            if (op(false, full) == op(true, full)) return op(false, full) ? kFull : kEmpty;
            if (op(true, full) && !op(false, full)) return copy_from(ta, a);
        }
        Id zero = combine(ta, ta.child(a, 0), tb, tb.child(b, 0), op);
        Id one = combine(ta, ta.child(a, 1), tb, tb.child(b, 1), op);
        return branch(zero, one);
    }

    Id complement_from(const Trie& other, Id id) {
        if (id == kEmpty) return kFull;
        if (id == kFull) return kEmpty;
        Id zero = complement_from(other, other.child(id, 0));
        Id one = complement_from(other, other.child(id, 1));
        return branch(zero, one);
    }

    // Node reached by following `path`, or the leaf met on the way.
    Id descend(Id id, const Word& path) const {
        for (std::size_t i = 0; i < path.size() && !is_leaf(id); ++i) id = child(id, path[i]);
        return id;
    }

    void collect(Id id, std::string& path, std::vector<Word>& out) const {
        if (id == kEmpty) return;
        if (id == kFull) {
            out.push_back(Word::unchecked(path));
            return;
        }
        path.push_back('0');
        collect(child(id, 0), path, out);
        path.back() = '1';
        collect(child(id, 1), path, out);
        path.pop_back();
    }

    std::vector<Word> words(Id root) const {
        std::vector<Word> out;
        std::string path;
        collect(root, path, out);
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::vector<std::array<Id, 2>> nodes_;
};

} // namespace detail

/// A finite union of cylinders kept in canonical form: prefix-free, with no
/// sibling pair w0, w1 (merged into w), sorted by (length, bits).
///
/// Canonical form makes set equality plain structural equality.
class ClopenSet {
public:
    ClopenSet() = default;

    ClopenSet(std::initializer_list<Word> words) : ClopenSet(normalize(std::vector<Word>(words))) {}

    static ClopenSet empty_set() { return {}; }
    static ClopenSet full() { return from_canonical({Word()}); }

    /// Canonicalizes an arbitrary finite union of cylinders.
    static ClopenSet normalize(std::vector<Word> words) {
        std::sort(words.begin(), words.end(),
                  [](const Word& a, const Word& b) { return a.str() < b.str(); });
        detail::Trie trie;
        auto root = trie.build(words);
        return from_canonical(trie.words(root));
    }

    static bool is_canonical(std::span<const Word> words) {
        auto canon = normalize(std::vector<Word>(words.begin(), words.end()));
        return std::equal(words.begin(), words.end(), canon.words().begin(), canon.words().end());
    }

    const std::vector<Word>& words() const noexcept { return words_; }
    std::size_t size() const noexcept { return words_.size(); }
    bool empty() const noexcept { return words_.empty(); }
    bool is_full() const noexcept { return words_.size() == 1 && words_.front().empty(); }

    std::size_t max_depth() const noexcept {
        std::size_t depth = 0;
        for (const auto& w : words_) depth = std::max(depth, w.size());
        return depth;
    }

    /// Membership of every point extending `prefix`: true (all inside), false
    /// (all outside) or nullopt when `prefix` is too short to decide.
    std::optional<bool> decide(const Word& prefix) const {
        bool undecided = false;
        for (const auto& w : words_) {
            if (w.is_prefix_of(prefix)) return true;
            if (prefix.is_prefix_of(w)) undecided = true;
        }
        if (undecided) return std::nullopt;
        return false;
    }

    friend bool operator==(const ClopenSet&, const ClopenSet&) = default;

    detail::Trie::Id build_trie(detail::Trie& trie) const {
        std::vector<Word> sorted = words_;
        std::sort(sorted.begin(), sorted.end(),
                  [](const Word& a, const Word& b) { return a.str() < b.str(); });
        return trie.build(sorted);
    }

    static ClopenSet from_trie(const detail::Trie& trie, detail::Trie::Id root) {
        return from_canonical(trie.words(root));
    }

private:
    static ClopenSet from_canonical(std::vector<Word> words) {
        ClopenSet s;
        s.words_ = std::move(words);
        return s;
    }

    std::vector<Word> words_;
};

namespace detail {

template <typename Op>
ClopenSet combine(const ClopenSet& a, const ClopenSet& b, Op op) {
    Trie ta, tb, out;
    auto ra = a.build_trie(ta);
    auto rb = b.build_trie(tb);
    auto root = out.combine(ta, ra, tb, rb, op);
    return ClopenSet::from_trie(out, root);
}

} // namespace detail

inline ClopenSet normalize(std::vector<Word> words) { return ClopenSet::normalize(std::move(words)); }

inline ClopenSet set_union(const ClopenSet& a, const ClopenSet& b) {
    return detail::combine(a, b, [](bool x, bool y) { return x || y; });
}

inline ClopenSet intersect(const ClopenSet& a, const ClopenSet& b) {
    return detail::combine(a, b, [](bool x, bool y) { return x && y; });
}

inline ClopenSet difference(const ClopenSet& a, const ClopenSet& b) {
    return detail::combine(a, b, [](bool x, bool y) { return x && !y; });
}

inline ClopenSet complement(const ClopenSet& a) {
    detail::Trie ta, out;
    auto ra = a.build_trie(ta);
    return ClopenSet::from_trie(out, out.complement_from(ta, ra));
}

inline bool is_subset(const ClopenSet& a, const ClopenSet& b) { return difference(a, b).empty(); }

/// {x w : w in a}
inline ClopenSet concat_prefix(const Word& x, const ClopenSet& a) {
    std::vector<Word> words;
    words.reserve(a.size());
    for (const auto& w : a.words()) words.push_back(x + w);
    // Prepending a fixed word keeps prefix-freeness, merging and (length, bits) order.
    return ClopenSet::normalize(std::move(words));
}

/// The section {w : y w in a}.
inline ClopenSet shift_section(const Word& y, const ClopenSet& a) {
    detail::Trie ta, out;
    auto ra = a.build_trie(ta);
    auto node = ta.descend(ra, y);
    return ClopenSet::from_trie(out, out.copy_from(ta, node));
}

/// Intersection of the sections {w : y w in a} over all y of the given length.
inline ClopenSet common_section(const ClopenSet& a, std::size_t length) {
    detail::Trie ta;
    auto ra = a.build_trie(ta);
    // Walk the first `length` levels, folding every reached node with AND.
    std::vector<detail::Trie::Id> frontier{ra};
    for (std::size_t level = 0; level < length; ++level) {
        std::vector<detail::Trie::Id> next;
        next.reserve(frontier.size() * 2);
        for (auto id : frontier) {
            if (id == detail::Trie::kEmpty) return {};
            if (detail::Trie::is_leaf(id)) {
                next.push_back(id);
            } else {
                next.push_back(ta.child(id, 0));
                next.push_back(ta.child(id, 1));
            }
        }
        // Leaves repeat identically down the levels; keep one of each.
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        frontier = std::move(next);
    }
    detail::Trie acc;
    detail::Trie::Id acc_root = detail::Trie::kFull;
    for (auto id : frontier) {
        detail::Trie merged;
        auto root = merged.combine(acc, acc_root, ta, id, [](bool x, bool y) { return x && y; });
        acc = std::move(merged);
        acc_root = root;
        if (acc_root == detail::Trie::kEmpty) break;
    }
    return ClopenSet::from_trie(acc, acc_root);
}

/// All words of exactly `depth` bits whose cylinders lie inside `a`.
/// Requires depth >= a.max_depth().
inline std::vector<Word> expand_to_depth(const ClopenSet& a, std::size_t depth) {
    std::vector<Word> out;
    for (const auto& w : a.words()) {
        if (w.size() > depth) throw PreconditionError("expand_to_depth: depth below set depth");
        for_each_word(depth - w.size(), [&](const Word& tail) { out.push_back(w + tail); });
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace effergo
