#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "effergo/measure.hpp"
#include "effergo/point.hpp"
#include "effergo/reals.hpp"

namespace effergo {

/// Stateful, single-owner stream of cylinders; nullopt once exhausted.
using CylinderEnumerator = std::function<std::optional<Word>()>;

/// An effectively open set: a finite clopen set or an enumeration of cylinders.
///
/// The value itself is immutable; each fuel-bounded view opens a fresh
/// enumerator, so prefixes are reproducible.
class EffOpen {
public:
    using Factory = std::function<CylinderEnumerator()>;

    static EffOpen finite(ClopenSet set, std::optional<Rational> assumed_upper = std::nullopt) {
        EffOpen e;
        e.finite_ = std::make_shared<const ClopenSet>(std::move(set));
        e.assumed_ = std::move(assumed_upper);
        e.name_ = "finite";
        return e;
    }

    static EffOpen enumerated(std::string name, Factory factory,
                              std::optional<Rational> assumed_upper = std::nullopt) {
        EffOpen e;
        e.factory_ = std::move(factory);
        e.assumed_ = std::move(assumed_upper);
        e.name_ = std::move(name);
        return e;
    }

    /// [0, x) as a union of dyadic intervals, enumerated along the binary expansion of x.
    static EffOpen below(const ComputableReal& x, std::optional<Rational> assumed_upper = std::nullopt) {
        return enumerated("below_" + x.name(), [x] {
            return CylinderEnumerator([x, position = std::size_t{0}, bits = std::string()]() mutable {
                // Bit j of x equal to 1 contributes the cylinder (x_1..x_{j-1} 0).
                for (;;) {
                    ++position;
                    if (position > 4096) return std::optional<Word>();
                    int bit = static_cast<int>(x.floor_scaled(position) & 1);
                    std::string word = bits + "0";
                    bits.push_back(bit ? '1' : '0');
                    if (bit == 1) return std::optional<Word>(Word::unchecked(std::move(word)));
                }
            });
        }, std::move(assumed_upper));
    }

    bool is_finite() const noexcept { return finite_ != nullptr; }
    const ClopenSet* finite_set() const noexcept { return finite_.get(); }
    const std::optional<Rational>& assumed_measure_upper() const noexcept { return assumed_; }
    const std::string& name() const noexcept { return name_; }

    CylinderEnumerator open() const {
        if (finite_) {
            return [set = finite_, i = std::size_t{0}]() mutable -> std::optional<Word> {
                if (i >= set->size()) return std::nullopt;
                return set->words()[i++];
            };
        }
        return factory_();
    }

private:
    EffOpen() = default;
    std::shared_ptr<const ClopenSet> finite_;
    Factory factory_;
    std::optional<Rational> assumed_;
    std::string name_;
};

struct FuelView {
    ClopenSet set;
    Rational measure;     // a lower bound on the measure of the whole open set
    std::size_t pulled = 0;
    bool exhausted = false;
};

/// Pulls at most `fuel` cylinders and normalizes their union.
inline FuelView eff_open_prefix(const EffOpen& a, std::size_t fuel, const MeasureSpec& m = MeasureSpec::uniform()) {
    auto next = a.open();
    std::vector<Word> words;
    FuelView view;
    while (view.pulled < fuel) {
        auto w = next();
        if (!w) {
            view.exhausted = true;
            break;
        }
        words.push_back(std::move(*w));
        ++view.pulled;
    }
    view.set = normalize(std::move(words));
    view.measure = measure(view.set, m);
    return view;
}

enum class Coverage { yes, unknown };

/// `yes` iff the fuel-bounded prefix of `a` already contains `p`.
inline Coverage covered_at_fuel(const EffOpen& a, const Point& p, std::size_t fuel) {
    return contains_point(eff_open_prefix(a, fuel).set, p) ? Coverage::yes : Coverage::unknown;
}

} // namespace effergo
