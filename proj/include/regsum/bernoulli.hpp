#pragma once

#include <cstdint>
#include <vector>

#include "regsum/rational.hpp"

namespace regsum {

/* Exact Bernoulli numbers B_0..B_max (B_1 = -1/2 convention). */
class BernoulliTable {
public:
    explicit BernoulliTable(uint32_t max_index);

    const Rational& operator[](uint32_t m) const {
        if (m >= b_.size()) throw std::domain_error("bernoulli: index beyond table");
        return b_[m];
    }
    uint32_t max_index() const { return static_cast<uint32_t>(b_.size() - 1); }

private:
    std::vector<Rational> b_;
};

/* B_m(x) = sum_{j<=m} C(m,j) B_j x^(m-j), exact. */
Rational bernoulli_poly(uint32_t m, const Rational& x, const BernoulliTable& table);

}  // namespace regsum
