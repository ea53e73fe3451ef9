#pragma once

#include <cstddef>
#include <string>

#include "effergo/errors.hpp"

namespace effergo {

/// Limits on the size of intermediate clopen sets. Exceeding either raises BudgetError.
struct Budget {
    std::size_t max_words = std::size_t{1} << 16;
    std::size_t max_depth = 4096;

    void check_words(std::size_t words, const char* what) const {
        if (words > max_words) {
            throw BudgetError(std::string(what) + ": " + std::to_string(words) + " words exceeds word budget " +
                              std::to_string(max_words));
        }
    }

    void check_depth(std::size_t depth, const char* what) const {
        if (depth > max_depth) {
            throw BudgetError(std::string(what) + ": depth " + std::to_string(depth) + " exceeds depth budget " +
                              std::to_string(max_depth));
        }
    }
};

} // namespace effergo
