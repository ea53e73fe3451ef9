#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>

#include "effergo/clopen.hpp"

namespace effergo {

/// preamble followed by the cycle repeated forever.
struct Periodic {
    Word preamble;
    Word cycle;
    friend bool operator==(const Periodic&, const Periodic&) = default;
};

/// Bits drawn from std::mt19937_64 seeded with `seed`; output j supplies
/// bits 64j .. 64j+63, least significant bit first.
struct Seeded {
    std::uint64_t seed = 0;
    friend bool operator==(const Seeded&, const Seeded&) = default;
};

/// `prefix` followed by `fill` forever.
struct Explicit {
    Word prefix;
    int fill = 0;
    friend bool operator==(const Explicit&, const Explicit&) = default;
};

/// A finitely presented infinite binary sequence. None of these are
/// Martin-Löf random; they stand in for random starting points in experiments.
class Point {
public:
    using Generator = std::variant<Periodic, Seeded, Explicit>;

    Point() : gen_(Explicit{}) {}

    static Point periodic(Word preamble, Word cycle) {
        if (cycle.empty()) throw PreconditionError("periodic point needs a nonempty cycle");
        return Point(Periodic{std::move(preamble), std::move(cycle)});
    }
    static Point seeded(std::uint64_t seed) { return Point(Seeded{seed}); }
    static Point explicit_fill(Word prefix, int fill) {
        if (fill != 0 && fill != 1) throw PreconditionError("fill bit must be 0 or 1");
        return Point(Explicit{std::move(prefix), fill});
    }

    const Generator& generator() const noexcept { return gen_; }

    /// First n bits. prefix_of(n) is a prefix of prefix_of(m) whenever n <= m.
    Word prefix_of(std::size_t n) const {
        std::string bits;
        bits.reserve(n);
        std::visit(
            [&](const auto& g) {
                using G = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<G, Periodic>) {
                    for (std::size_t i = 0; i < n; ++i) {
                        if (i < g.preamble.size()) {
                            bits.push_back(g.preamble.str()[i]);
                        } else {
                            bits.push_back(g.cycle.str()[(i - g.preamble.size()) % g.cycle.size()]);
                        }
                    }
                } else if constexpr (std::is_same_v<G, Seeded>) {
                    std::mt19937_64 engine(g.seed);
                    std::uint64_t chunk = 0;
                    for (std::size_t i = 0; i < n; ++i) {
                        if (i % 64 == 0) chunk = engine();
                        bits.push_back(((chunk >> (i % 64)) & 1u) ? '1' : '0');
                    }
                } else {
                    for (std::size_t i = 0; i < n; ++i) {
                        bits.push_back(i < g.prefix.size() ? g.prefix.str()[i] : (g.fill ? '1' : '0'));
                    }
                }
            },
            gen_);
        return Word::unchecked(std::move(bits));
    }

    std::string describe() const {
        return std::visit(
            [](const auto& g) -> std::string {
                using G = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<G, Periodic>) {
                    return "periodic(" + g.preamble.str() + "|" + g.cycle.str() + ")";
                } else if constexpr (std::is_same_v<G, Seeded>) {
                    return "seeded(" + std::to_string(g.seed) + ")";
                } else {
                    return "explicit(" + g.prefix.str() + "|" + std::to_string(g.fill) + ")";
                }
            },
            gen_);
    }

    friend bool operator==(const Point&, const Point&) = default;

private:
    explicit Point(Generator gen) : gen_(std::move(gen)) {}
    Generator gen_;
};

/// Exact membership: decided by the prefix of length s.max_depth().
inline bool contains_point(const ClopenSet& s, const Point& p) {
    return s.decide(p.prefix_of(s.max_depth())).value_or(false);
}

} // namespace effergo
