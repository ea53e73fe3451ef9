#pragma once

#include <array>
#include <string>
#include <variant>

#include "effergo/clopen.hpp"
#include "effergo/rational.hpp"

namespace effergo {

struct Uniform {
    friend bool operator==(const Uniform&, const Uniform&) = default;
};

/// i.i.d. bits; `p` is the probability of a 1.
struct Bernoulli {
    Rational p;
    friend bool operator==(const Bernoulli&, const Bernoulli&) = default;
};

/// Two-state Markov chain: initial[b] = P(first bit = b),
/// transition[a][b] = P(next bit = b | current bit = a).
struct Markov {
    std::array<Rational, 2> initial;
    std::array<std::array<Rational, 2>, 2> transition;
    friend bool operator==(const Markov&, const Markov&) = default;
};

/// A computable measure on Cantor space with exact rational cylinder masses.
class MeasureSpec {
public:
    using Kind = std::variant<Uniform, Bernoulli, Markov>;

    MeasureSpec() = default;

    static MeasureSpec uniform() { return MeasureSpec(Uniform{}); }

    static MeasureSpec bernoulli(Rational p) {
        if (p <= 0 || p >= 1) throw PreconditionError("Bernoulli parameter must lie strictly in (0,1)");
        return MeasureSpec(Bernoulli{std::move(p)});
    }

    static MeasureSpec markov(std::array<Rational, 2> initial, std::array<std::array<Rational, 2>, 2> transition) {
        auto stochastic = [](const std::array<Rational, 2>& row) {
            return row[0] >= 0 && row[1] >= 0 && row[0] + row[1] == 1;
        };
        if (!stochastic(initial) || !stochastic(transition[0]) || !stochastic(transition[1])) {
            throw PreconditionError("Markov initial distribution and transition rows must be stochastic");
        }
        return MeasureSpec(Markov{std::move(initial), std::move(transition)});
    }

    const Kind& kind() const noexcept { return kind_; }
    bool is_uniform() const noexcept { return std::holds_alternative<Uniform>(kind_); }

    std::string name() const {
        if (std::holds_alternative<Uniform>(kind_)) return "uniform";
        if (std::holds_alternative<Bernoulli>(kind_)) return "bernoulli";
        return "markov";
    }

    /// mu(wΩ)
    Rational cylinder(const Word& w) const {
        return std::visit(
            [&](const auto& k) -> Rational {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, Uniform>) {
                    return dyadic(w.size());
                } else if constexpr (std::is_same_v<K, Bernoulli>) {
                    std::size_t ones = 0;
                    for (std::size_t i = 0; i < w.size(); ++i) ones += static_cast<std::size_t>(w[i]);
                    return pow(k.p, ones) * pow(1 - k.p, w.size() - ones);
                } else {
                    if (w.empty()) return Rational(1);
                    Rational mass = k.initial[static_cast<std::size_t>(w[0])];
                    for (std::size_t i = 1; i < w.size() && mass != 0; ++i) {
                        mass *= k.transition[static_cast<std::size_t>(w[i - 1])][static_cast<std::size_t>(w[i])];
                    }
                    return mass;
                }
            },
            kind_);
    }

    friend bool operator==(const MeasureSpec&, const MeasureSpec&) = default;

private:
    explicit MeasureSpec(Kind kind) : kind_(std::move(kind)) {}
    Kind kind_ = Uniform{};
};

/// Exact measure of a canonical clopen set.
inline Rational measure(const ClopenSet& s, const MeasureSpec& m = MeasureSpec::uniform()) {
    if (s.empty()) return 0;
    if (m.is_uniform()) {
        // Sum of 2^(depth - |w|) over a common denominator 2^depth.
        std::size_t depth = s.max_depth();
        Integer num = 0;
        for (const auto& w : s.words()) num += Integer(1) << (depth - w.size());
        Integer den = 1;
        den <<= depth;
        return Rational(num, den);
    }
    Rational total = 0;
    for (const auto& w : s.words()) total += m.cylinder(w);
    return total;
}

} // namespace effergo
