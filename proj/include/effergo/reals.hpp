#pragma once

#include <functional>
#include <string>
#include <utility>

#include "effergo/rational.hpp"

namespace effergo {

/// A computable real in [0,1) presented by its exact dyadic floors:
/// floor_scaled(p) = floor(x * 2^p). Consecutive enclosures
/// [f/2^p, (f+1)/2^p] are nested, so every derived approximation is monotone.
class ComputableReal {
public:
    using Floors = std::function<Integer(std::size_t)>;

    ComputableReal(std::string name, Floors floors) : name_(std::move(name)), floors_(std::move(floors)) {}

    /// sqrt(2) - 1, the default rotation angle.
    static ComputableReal sqrt2_minus_1() {
        return ComputableReal("sqrt2m1", [](std::size_t p) {
            Integer scaled = Integer(2) << (2 * p);
            return Integer(boost::multiprecision::sqrt(scaled) - (Integer(1) << p));
        });
    }

    /// (sqrt(5) - 1) / 2
    static ComputableReal golden_conjugate() {
        return ComputableReal("golden", [](std::size_t p) {
            Integer scaled = Integer(5) << (2 * p);
            Integer s = boost::multiprecision::sqrt(scaled) - (Integer(1) << p);
            // floor((x - 2^p)/2) = floor(floor(x - 2^p)/2) for s >= 0
            return Integer(s >> 1);
        });
    }

    static ComputableReal rational(const Rational& q) {
        if (q < 0 || q >= 1) throw PreconditionError("rational angle must lie in [0,1)");
        return ComputableReal(to_string(q), [q](std::size_t p) {
            Integer num = numerator_of(q) << p;
            return Integer(num / denominator_of(q));
        });
    }

    const std::string& name() const noexcept { return name_; }

    Integer floor_scaled(std::size_t p) const { return floors_(p); }

    /// [lo, hi] containing the real, hi - lo = 2^-p.
    std::pair<Rational, Rational> enclosure(std::size_t p) const {
        Integer f = floors_(p);
        Integer den = Integer(1) << p;
        return {Rational(f, den), Rational(Integer(f + 1), den)};
    }

private:
    std::string name_;
    Floors floors_;
};

} // namespace effergo
