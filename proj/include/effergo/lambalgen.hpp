#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "effergo/clopen.hpp"
#include "effergo/measure.hpp"
#include "effergo/point.hpp"
#include "effergo/transforms.hpp"

namespace effergo {

/// Constraints on finitely many coordinates of a point of Ω^ℕ; missing coordinates are free.
using ProductCylinder = std::map<std::size_t, Word>;

/// A finite union of product cylinders.
class ProductClopen {
public:
    ProductClopen() = default;
    ProductClopen(std::initializer_list<ProductCylinder> cylinders)
        : ProductClopen(std::vector<ProductCylinder>(cylinders)) {}

    explicit ProductClopen(std::vector<ProductCylinder> cylinders) {
        for (auto& c : cylinders) {
            std::erase_if(c, [](const auto& kv) { return kv.second.empty(); });
            if (c.empty()) {
                cylinders_ = {ProductCylinder{}};
                return;
            }
        }
        std::sort(cylinders.begin(), cylinders.end());
        cylinders.erase(std::unique(cylinders.begin(), cylinders.end()), cylinders.end());
        cylinders_ = std::move(cylinders);
    }

    static ProductClopen full() { return ProductClopen({ProductCylinder{}}); }

    const std::vector<ProductCylinder>& cylinders() const noexcept { return cylinders_; }
    bool empty() const noexcept { return cylinders_.empty(); }
    bool is_full() const noexcept { return cylinders_.size() == 1 && cylinders_.front().empty(); }

    /// One past the largest constrained coordinate.
    std::size_t coordinate_count() const {
        std::size_t n = 0;
        for (const auto& c : cylinders_) {
            if (!c.empty()) n = std::max(n, c.rbegin()->first + 1);
        }
        return n;
    }

    /// Longest constraint at `coord`, 0 if unconstrained.
    std::size_t depth_at(std::size_t coord) const {
        std::size_t d = 0;
        for (const auto& c : cylinders_) {
            auto it = c.find(coord);
            if (it != c.end()) d = std::max(d, it->second.size());
        }
        return d;
    }

    friend bool operator==(const ProductClopen&, const ProductClopen&) = default;

private:
    std::vector<ProductCylinder> cylinders_;
};

namespace detail {

// Fixes coordinate `coord` to any point extending w, keeping coordinate indices.
inline ProductClopen fix_coordinate(const ProductClopen& u, std::size_t coord, const Word& w) {
    std::vector<ProductCylinder> out;
    for (const auto& c : u.cylinders()) {
        auto it = c.find(coord);
        if (it == c.end()) {
            out.push_back(c);
        } else if (it->second.is_prefix_of(w)) {
            ProductCylinder rest = c;
            rest.erase(coord);
            out.push_back(std::move(rest));
        }
    }
    return ProductClopen(std::move(out));
}

inline ProductClopen reindex_down(const ProductClopen& u) {
    std::vector<ProductCylinder> out;
    for (const auto& c : u.cylinders()) {
        ProductCylinder moved;
        for (const auto& [i, w] : c) {
            if (i == 0) throw PreconditionError("reindex_down: coordinate 0 still constrained");
            moved.emplace(i - 1, w);
        }
        out.push_back(std::move(moved));
    }
    return ProductClopen(std::move(out));
}

// Measures here are dyadic, so they are kept as num / 2^exp to avoid rational normalization.
struct DyadicMass {
    Integer num;
    std::size_t exp = 0;
};

inline void add_mass(DyadicMass& total, const DyadicMass& part) {
    if (part.exp > total.exp) {
        total.num <<= (part.exp - total.exp);
        total.exp = part.exp;
    }
    total.num += part.num << (total.exp - part.exp);
}

inline DyadicMass product_mass(const ProductClopen& u) {
    if (u.empty()) return {0, 0};
    if (u.is_full()) return {1, 0};
    std::size_t coord = u.coordinate_count();
    for (const auto& c : u.cylinders()) coord = std::min(coord, c.begin()->first);
    if (std::all_of(u.cylinders().begin(), u.cylinders().end(),
                    [&](const ProductCylinder& c) { return c.size() == 1 && c.begin()->first == coord; })) {
        std::vector<Word> words;
        for (const auto& c : u.cylinders()) words.push_back(c.begin()->second);
        ClopenSet s = normalize(std::move(words));
        DyadicMass m{0, s.max_depth()};
        for (const auto& w : s.words()) m.num += Integer(1) << (m.exp - w.size());
        return m;
    }
    const std::size_t depth = u.depth_at(coord);
    DyadicMass total{0, 0};
    for_each_word(depth, [&](const Word& w) { add_mass(total, product_mass(fix_coordinate(u, coord, w))); });
    total.exp += depth;
    return total;
}

} // namespace detail

/// Exact measure under the uniform product measure, by refining one coordinate at a time.
inline Rational product_measure(const ProductClopen& u) {
    auto m = detail::product_mass(u);
    return Rational(m.num, Integer(1) << m.exp);
}

/// {tails : (α, tails) ∈ u} for α extending w, with coordinates shifted down by one.
inline ProductClopen section(const ProductClopen& u, const Word& w) {
    const std::size_t need = u.depth_at(0);
    if (w.size() < need) {
        throw PreconditionError("section: word of length " + std::to_string(w.size()) +
                                " too short, coordinate 0 needs length " + std::to_string(need));
    }
    return detail::reindex_down(detail::fix_coordinate(u, 0, w));
}

/// {w of length depth : measure(section(u, w)) > t}, normalized.
inline ClopenSet threshold_set(const ProductClopen& u, const Rational& t, std::size_t depth) {
    const std::size_t need = u.depth_at(0);
    if (depth < need) {
        throw PreconditionError("threshold_set: depth " + std::to_string(depth) + " below coordinate-0 depth " +
                                std::to_string(need));
    }
    std::vector<Word> words;
    for_each_word(depth, [&](const Word& w) {
        if (product_measure(section(u, w)) > t) words.push_back(w);
    });
    return normalize(std::move(words));
}

/// Coordinates 0..m-1 given by points, all later coordinates constant `fill`.
struct ProductPoint {
    std::vector<Point> coords;
    int fill = 0;

    Word prefix(std::size_t coord, std::size_t n) const {
        if (coord < coords.size()) return coords[coord].prefix_of(n);
        return Word::repeat(fill, n);
    }
};

inline bool contains_product_point(const ProductClopen& u, const ProductPoint& p) {
    return std::any_of(u.cylinders().begin(), u.cylinders().end(), [&](const ProductCylinder& c) {
        return std::all_of(c.begin(), c.end(), [&](const auto& kv) {
            return kv.second.is_prefix_of(p.prefix(kv.first, kv.second.size()));
        });
    });
}

/// The search at one coordinate ran out of budget while the orbit stayed inside V_i.
class TrappedError : public BudgetError {
public:
    TrappedError(std::size_t coordinate, Rational v_measure, ClopenSet v, std::vector<Word> orbit)
        : BudgetError("point trapped: orbit of coordinate " + std::to_string(coordinate) + " stayed inside V_" +
                      std::to_string(coordinate) + " (measure " + to_string(v_measure) + ") for " +
                      std::to_string(orbit.size()) + " steps"),
          coordinate_(coordinate), v_measure_(std::move(v_measure)), v_(std::move(v)), orbit_(std::move(orbit)) {}

    std::size_t coordinate() const noexcept { return coordinate_; }
    const Rational& v_measure() const noexcept { return v_measure_; }
    const ClopenSet& v() const noexcept { return v_; }
    /// Prefixes of T^n(ω_i) for n = 0..budget, each inside V_i.
    const std::vector<Word>& orbit() const noexcept { return orbit_; }

private:
    std::size_t coordinate_;
    Rational v_measure_;
    ClopenSet v_;
    std::vector<Word> orbit_;
};

struct LambalgenStep {
    std::size_t index = 0;          // n_i
    Rational threshold;             // (i+2)/(i+3)
    Rational complex_measure;       // measure of the section complex before fixing coordinate i
    Rational ladder_bound;          // (i+1)/(i+2)
    ClopenSet v;
    Rational v_measure;
    Word fixed_prefix;              // prefix of T^(n_i)(ω_i) used to take the section
};

struct LambalgenReport {
    std::vector<LambalgenStep> steps;
    bool verified = false;

    std::vector<std::size_t> indices() const {
        std::vector<std::size_t> out;
        for (const auto& s : steps) out.push_back(s.index);
        return out;
    }
};

/// Independent check that (T^(n_0)(ω_0), …, T^(n_{m-1})(ω_{m-1}), fill, …) lies outside u.
inline bool verify_outside(const ProductClopen& u, const std::vector<Point>& pts, const TransformSpec& t,
                           const std::vector<std::size_t>& indices) {
    for (const auto& c : u.cylinders()) {
        bool inside = true;
        for (const auto& [coord, w] : c) {
            if (coord >= pts.size()) {
                inside = inside && w == Word::repeat(0, w.size());
            } else {
                inside = inside && apply_point(t, pts[coord], indices.at(coord), w.size()) == w;
            }
            if (!inside) break;
        }
        if (inside) return false;
    }
    return true;
}

/// Fixes each coordinate in turn to an orbit point that keeps the remaining
/// section below the ladder threshold (i+2)/(i+3).
inline LambalgenReport lambalgen_construct(const ProductClopen& u, const std::vector<Point>& pts,
                                           const TransformSpec& t, std::size_t budget) {
    (void)t.exact();
    const Rational total = product_measure(u);
    if (total > Rational(1, 2)) {
        throw PreconditionError("lambalgen_construct: measure(u) = " + to_string(total) + " exceeds 1/2");
    }
    if (u.coordinate_count() > pts.size()) {
        throw PreconditionError("lambalgen_construct: u constrains coordinate " +
                                std::to_string(u.coordinate_count() - 1) + " but only " +
                                std::to_string(pts.size()) + " points were given");
    }
    LambalgenReport rep;
    ProductClopen complex = u;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        LambalgenStep step;
        step.complex_measure = product_measure(complex);
        step.ladder_bound = Rational(i + 1, i + 2);
        if (step.complex_measure > step.ladder_bound) {
            throw Error("lambalgen_construct: ladder broken at coordinate " + std::to_string(i));
        }
        step.threshold = Rational(i + 2, i + 3);
        const std::size_t depth = complex.depth_at(0);
        step.v = threshold_set(complex, step.threshold, depth);
        step.v_measure = measure(step.v);
        if (step.v_measure == 1) {
            throw PreconditionError("V_" + std::to_string(i) + " has measure 1; the section complex violates the " +
                                    "measure hypothesis");
        }
        Orbit orbit(t, pts[i], depth);
        std::vector<Word> seen;
        std::optional<std::size_t> found;
        for (std::size_t n = 0; n <= budget; ++n) {
            if (n > 0) orbit.advance();
            Word prefix = orbit.current();
            if (!step.v.decide(prefix).value_or(false)) {
                found = n;
                step.fixed_prefix = std::move(prefix);
                break;
            }
            seen.push_back(std::move(prefix));
        }
        if (!found) throw TrappedError(i, step.v_measure, step.v, std::move(seen));
        step.index = *found;
        complex = section(complex, step.fixed_prefix);
        rep.steps.push_back(std::move(step));
    }
    rep.verified = complex.empty() && verify_outside(u, pts, t, rep.indices());
    return rep;
}

} // namespace effergo
