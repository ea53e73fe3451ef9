#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "effergo/budget.hpp"
#include "effergo/clopen.hpp"
#include "effergo/measure.hpp"
#include "effergo/point.hpp"
#include "effergo/reals.hpp"

namespace effergo {

// ---------------------------------------------------------------------------
// Zig-zag embedding of bidirectional sequences: position i of a Z-indexed
// sequence is stored at position zigzag(i) of a one-sided sequence, in the
// order 0, -1, 1, -2, 2, ...

inline std::uint64_t zigzag(std::int64_t i) {
    if (i > 0) return 2 * static_cast<std::uint64_t>(i);
    if (i < 0) return 2 * static_cast<std::uint64_t>(-(i + 1)) + 1;
    return 0;
}

inline std::int64_t unzigzag(std::uint64_t j) {
    if (j == 0) return 0;
    if (j % 2 == 1) return -static_cast<std::int64_t>((j + 1) / 2);
    return static_cast<std::int64_t>(j / 2);
}

/// A finite partial function Z -> {0,1}: a cylinder of the bidirectional space.
using BiAssignment = std::map<std::int64_t, int>;

/// Clopen set of all one-sided sequences whose embedded bits match `x`.
inline ClopenSet embed_bidirectional(const BiAssignment& x, const Budget& budget = {}) {
    std::map<std::uint64_t, int> fixed;
    for (const auto& [i, bit] : x) {
        if (bit != 0 && bit != 1) throw SchemaError("bidirectional assignment bit must be 0 or 1");
        fixed[zigzag(i)] = bit;
    }
    if (fixed.empty()) return ClopenSet::full();
    const std::size_t length = static_cast<std::size_t>(fixed.rbegin()->first) + 1;
    budget.check_depth(length, "embed_bidirectional");
    const std::size_t free_bits = length - fixed.size();
    if (free_bits >= 63) budget.check_words(std::size_t(-1), "embed_bidirectional");
    budget.check_words(std::size_t{1} << free_bits, "embed_bidirectional");

    std::vector<std::size_t> free_positions;
    std::string base(length, '0');
    for (std::size_t pos = 0; pos < length; ++pos) {
        auto it = fixed.find(pos);
        if (it == fixed.end()) {
            free_positions.push_back(pos);
        } else {
            base[pos] = it->second ? '1' : '0';
        }
    }
    std::vector<Word> words;
    words.reserve(std::size_t{1} << free_bits);
    for (std::size_t code = 0; code < (std::size_t{1} << free_bits); ++code) {
        std::string bits = base;
        for (std::size_t k = 0; k < free_bits; ++k) {
            bits[free_positions[k]] = ((code >> (free_bits - 1 - k)) & 1u) ? '1' : '0';
        }
        words.push_back(Word::unchecked(std::move(bits)));
    }
    return normalize(std::move(words));
}

/// The bidirectional cylinder named by an embedded one-sided word.
inline BiAssignment unembed_word(const Word& w) {
    BiAssignment x;
    for (std::size_t j = 0; j < w.size(); ++j) x[unzigzag(j)] = w[j];
    return x;
}

// ---------------------------------------------------------------------------

/// Preimages of cylinders are exact clopen sets.
struct ClopenExact {
    std::function<ClopenSet(const Word&)> preimage;
};

/// Preimages of cylinders are only sandwiched: inner(w,p) ⊆ T^-1(wΩ) ⊆ outer(w,p),
/// with a measure gap of at most 2^-p.
struct Approximable {
    std::function<ClopenSet(const Word&, std::size_t)> inner;
    std::function<ClopenSet(const Word&, std::size_t)> outer;
};

/// What a transform was built from; used for serialization and reports.
struct TransformDescriptor {
    std::string name;
    std::optional<std::int64_t> n;
    std::optional<std::string> alpha;
    std::optional<std::size_t> precision;
};

/// A computable map of Cantor space presented by cylinder preimages, plus a
/// prefix-monotone forward map on finite words for orbit evaluation.
class TransformSpec {
public:
    using Kind = std::variant<ClopenExact, Approximable>;
    using Forward = std::function<Word(const Word&)>;

    TransformSpec(TransformDescriptor descriptor, Kind kind, Forward forward)
        : descriptor_(std::move(descriptor)), kind_(std::move(kind)), forward_(std::move(forward)) {}

    const std::string& name() const noexcept { return descriptor_.name; }
    const TransformDescriptor& descriptor() const noexcept { return descriptor_; }
    const Kind& kind() const noexcept { return kind_; }
    bool is_exact() const noexcept { return std::holds_alternative<ClopenExact>(kind_); }

    /// Longest output prefix determined by the input prefix `u`.
    Word forward(const Word& u) const { return forward_(u); }

    const ClopenExact& exact() const {
        if (!is_exact()) {
            throw PreconditionError("transform '" + name() +
                                    "' is approximable; use preimage_approx instead of an exact preimage");
        }
        return std::get<ClopenExact>(kind_);
    }

    const Approximable* approximable() const noexcept { return std::get_if<Approximable>(&kind_); }

private:
    TransformDescriptor descriptor_;
    Kind kind_;
    Forward forward_;
};

namespace detail {

// Canonical words covering the cells [lo, hi) of the depth-q grid (0 <= lo <= hi <= 2^q).
inline void dyadic_range(std::uint64_t lo, std::uint64_t hi, std::size_t q, std::vector<Word>& out) {
    while (lo < hi) {
        // Largest aligned block starting at lo that fits.
        std::size_t level = 0;
        while (level < q && (lo & ((std::uint64_t{1} << (level + 1)) - 1)) == 0 &&
               lo + (std::uint64_t{1} << (level + 1)) <= hi) {
            ++level;
        }
        std::size_t len = q - level;
        std::string bits(len, '0');
        std::uint64_t prefix = lo >> level;
        for (std::size_t i = 0; i < len; ++i) bits[len - 1 - i] = ((prefix >> i) & 1u) ? '1' : '0';
        out.push_back(Word::unchecked(std::move(bits)));
        lo += std::uint64_t{1} << level;
    }
}

// Cells [start, start + count) taken modulo 2^q.
inline ClopenSet cyclic_range(std::int64_t start, std::uint64_t count, std::size_t q) {
    const std::uint64_t modulus = std::uint64_t{1} << q;
    if (count >= modulus) return ClopenSet::full();
    std::int64_t m = static_cast<std::int64_t>(modulus);
    auto lo = static_cast<std::uint64_t>(((start % m) + m) % m);
    std::vector<Word> words;
    if (lo + count <= modulus) {
        dyadic_range(lo, lo + count, q, words);
    } else {
        dyadic_range(lo, modulus, q, words);
        dyadic_range(0, lo + count - modulus, q, words);
    }
    return normalize(std::move(words));
}

inline std::uint64_t word_value(const Word& w) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < w.size(); ++i) v = (v << 1) | static_cast<std::uint64_t>(w[i]);
    return v;
}

inline Word value_word(std::uint64_t v, std::size_t len) {
    std::string bits(len, '0');
    for (std::size_t i = 0; i < len; ++i) bits[len - 1 - i] = ((v >> i) & 1u) ? '1' : '0';
    return Word::unchecked(std::move(bits));
}

constexpr std::size_t kMaxRotationGrid = 60;

} // namespace detail

// ---------------------------------------------------------------------------
// Built-in transforms.

/// Left shift: drops the first bit.
inline TransformSpec shift_transform() {
    return TransformSpec(
        {"shift", {}, {}, {}},
        ClopenExact{[](const Word& w) { return normalize({Word("0") + w, Word("1") + w}); }},
        [](const Word& u) { return u.suffix_from(1); });
}

/// The odometer (dyadic adding machine): F(1^n 0 w) = 0^n 1 w, F(111...) = 000...
inline TransformSpec odometer_transform() {
    auto forward = [](const Word& u) {
        std::string bits = u.str();
        std::size_t n = bits.find('0');
        if (n == std::string::npos) return Word::repeat(0, bits.size());
        for (std::size_t i = 0; i < n; ++i) bits[i] = '0';
        bits[n] = '1';
        return Word::unchecked(std::move(bits));
    };
    // F^-1 subtracts one: 0^n 1 v -> 1^n 0 v, and 0^L Ω -> 1^L Ω.
    auto preimage = [](const Word& w) {
        std::string bits = w.str();
        std::size_t n = bits.find('1');
        if (n == std::string::npos) return ClopenSet{Word::repeat(1, bits.size())};
        for (std::size_t i = 0; i < n; ++i) bits[i] = '1';
        bits[n] = '0';
        return ClopenSet{Word::unchecked(std::move(bits))};
    };
    return TransformSpec({"odometer", {}, {}, {}}, ClopenExact{preimage}, forward);
}

/// Identity map: measure preserving and not ergodic.
inline TransformSpec identity_transform() {
    return TransformSpec({"identity", {}, {}, {}}, ClopenExact{[](const Word& w) { return ClopenSet{w}; }},
                         [](const Word& u) { return u; });
}

/// Bidirectional shift by n in zig-zag coordinates: (Tω)(i) = ω(i + n).
inline TransformSpec bidirectional_shift_transform(std::int64_t n, Budget budget = {}) {
    auto preimage = [n, budget](const Word& w) {
        BiAssignment x;
        for (std::size_t j = 0; j < w.size(); ++j) x[unzigzag(j) + n] = w[j];
        return embed_bidirectional(x, budget);
    };
    auto forward = [n](const Word& u) {
        std::string out;
        for (std::size_t j = 0;; ++j) {
            std::uint64_t src = zigzag(unzigzag(j) + n);
            if (src >= u.size()) break;
            out.push_back(u.str()[static_cast<std::size_t>(src)]);
        }
        return Word::unchecked(std::move(out));
    };
    return TransformSpec({"bidirectional_shift", n, {}, {}}, ClopenExact{preimage}, forward);
}

/// Rotation x -> x + alpha mod 1 of Ω read as binary expansions in [0,1).
///
/// Preimages use a dyadic grid of depth max(p, |w|) + 2 and an enclosure of
/// alpha of the same resolution, rounded inward for the inner set and outward
/// for the outer set.
inline TransformSpec rotation_transform(ComputableReal alpha, std::size_t default_precision = 8) {
    auto approx = [alpha](const Word& w, std::size_t p, bool outer) {
        if (w.empty()) return ClopenSet::full();
        const std::size_t q = std::max(p, w.size()) + 2;
        if (q > detail::kMaxRotationGrid) throw BudgetError("rotation preimage: grid depth exceeds 60 bits");
        const auto f = static_cast<std::int64_t>(alpha.floor_scaled(q));
        const auto cells = std::uint64_t{1} << (q - w.size());
        const auto start = static_cast<std::int64_t>(detail::word_value(w) << (q - w.size()));
        // The true preimage is [c, c + cells) with c in [start - f - 1, start - f].
        if (outer) return detail::cyclic_range(start - f - 1, cells + 1, q);
        return detail::cyclic_range(start - f, cells - 1, q);
    };
    auto forward = [alpha](const Word& u) {
        const std::size_t q = u.size() + 2;
        if (q > detail::kMaxRotationGrid) throw BudgetError("rotation forward: input prefix exceeds 58 bits");
        const std::uint64_t modulus = std::uint64_t{1} << q;
        const auto f = static_cast<std::uint64_t>(alpha.floor_scaled(q));
        const std::uint64_t lo = ((detail::word_value(u) << 2) + f) % modulus;
        const std::uint64_t count = 4 + 1;  // the image interval plus alpha's uncertainty
        if (lo + count > modulus) return Word();
        Word a = detail::value_word(lo, q);
        Word b = detail::value_word(lo + count - 1, q);
        std::size_t common = 0;
        while (common < q && a[common] == b[common]) ++common;
        return a.prefix(common);
    };
    return TransformSpec({"rotation", {}, alpha.name(), default_precision},
                         Approximable{[approx](const Word& w, std::size_t p) { return approx(w, p, false); },
                                      [approx](const Word& w, std::size_t p) { return approx(w, p, true); }},
                         forward);
}

// ---------------------------------------------------------------------------
// Preimage algebra.

/// Exact preimage T^-1(s) of a clopen set under a ClopenExact transform.
inline ClopenSet preimage_clopen(const TransformSpec& t, const ClopenSet& s, const Budget& budget = {}) {
    const auto& exact = t.exact();
    std::vector<Word> words;
    for (const auto& w : s.words()) {
        auto pre = exact.preimage(w);
        words.insert(words.end(), pre.words().begin(), pre.words().end());
        budget.check_words(words.size(), "preimage_clopen");
    }
    return normalize(std::move(words));
}

struct PreimageSandwich {
    ClopenSet inner;
    ClopenSet outer;
};

/// inner ⊆ T^-1(s) ⊆ outer, with measure gap at most |s| * 2^-p.
inline PreimageSandwich preimage_approx(const TransformSpec& t, const ClopenSet& s, std::size_t p) {
    if (t.is_exact()) {
        auto pre = preimage_clopen(t, s);
        return {pre, pre};
    }
    const auto* approx = t.approximable();
    std::vector<Word> inner, outer;
    for (const auto& w : s.words()) {
        auto in = approx->inner(w, p);
        auto out = approx->outer(w, p);
        inner.insert(inner.end(), in.words().begin(), in.words().end());
        outer.insert(outer.end(), out.words().begin(), out.words().end());
    }
    return {normalize(std::move(inner)), normalize(std::move(outer))};
}

/// T^-i(s)
inline ClopenSet iterate_preimage(const TransformSpec& t, const ClopenSet& s, std::size_t i,
                                  const Budget& budget = {}) {
    ClopenSet current = s;
    for (std::size_t step = 0; step < i; ++step) current = preimage_clopen(t, current, budget);
    return current;
}

// ---------------------------------------------------------------------------
// Orbits.

/// Maintains the first `depth` bits of T^k(p) as k advances, regrowing the
/// input prefix when forward evaluation loses bits.
class Orbit {
public:
    Orbit(const TransformSpec& t, Point p, std::size_t depth, std::size_t input_budget = std::size_t{1} << 22)
        : t_(&t), p_(std::move(p)), depth_(depth), input_budget_(input_budget) {
        input_len_ = depth_ + 64;
        rebuild();
    }

    std::size_t index() const noexcept { return k_; }

    /// First `depth` bits of T^index(p).
    Word current() const { return buffer_.prefix(depth_); }

    void advance() {
        buffer_ = t_->forward(buffer_);
        ++k_;
        if (buffer_.size() < depth_) {
            input_len_ *= 2;
            rebuild();
        }
    }

private:
    void rebuild() {
        for (;;) {
            if (input_len_ > input_budget_) {
                throw BudgetError("orbit of " + p_.describe() + " under " + t_->name() + ": cannot produce " +
                                  std::to_string(depth_) + " bits of iterate " + std::to_string(k_) +
                                  " within an input budget of " + std::to_string(input_budget_) + " bits");
            }
            buffer_ = p_.prefix_of(input_len_);
            for (std::size_t i = 0; i < k_ && buffer_.size() >= depth_; ++i) buffer_ = t_->forward(buffer_);
            if (buffer_.size() >= depth_) return;
            input_len_ *= 2;
        }
    }

    const TransformSpec* t_;
    Point p_;
    std::size_t depth_;
    std::size_t input_budget_;
    std::size_t input_len_ = 0;
    std::size_t k_ = 0;
    Word buffer_;
};

/// First out_len bits of T^k(p).
inline Word apply_point(const TransformSpec& t, const Point& p, std::size_t k, std::size_t out_len,
                        std::size_t input_budget = std::size_t{1} << 22) {
    for (std::size_t len = out_len + 64; len <= input_budget; len *= 2) {
        Word u = p.prefix_of(len);
        for (std::size_t i = 0; i < k && u.size() >= out_len; ++i) u = t.forward(u);
        if (u.size() >= out_len) return u.prefix(out_len);
    }
    throw BudgetError("apply_point: " + t.name() + " cannot produce " + std::to_string(out_len) +
                      " bits of iterate " + std::to_string(k) + " within an input budget of " +
                      std::to_string(input_budget) + " bits");
}

// ---------------------------------------------------------------------------

struct MeasureViolation {
    Word cylinder;
    Rational expected;
    Rational actual;
};

struct MeasurePreservationReport {
    std::string transform;
    std::size_t depth = 0;
    std::size_t checked = 0;
    std::vector<MeasureViolation> violations;
    bool passed() const noexcept { return violations.empty(); }
};

/// Checks mu(T^-1(wΩ)) = mu(wΩ) exactly for every |w| <= depth.
inline MeasurePreservationReport check_measure_preserving(const TransformSpec& t, std::size_t depth,
                                                          const MeasureSpec& m = MeasureSpec::uniform()) {
    MeasurePreservationReport report{t.name(), depth, 0, {}};
    for (std::size_t len = 0; len <= depth; ++len) {
        for_each_word(len, [&](const Word& w) {
            Rational expected = m.cylinder(w);
            Rational actual = measure(preimage_clopen(t, ClopenSet{w}), m);
            ++report.checked;
            if (actual != expected) report.violations.push_back({w, expected, actual});
        });
    }
    return report;
}

} // namespace effergo
