#include "regsum/bernoulli.hpp"

namespace regsum {

BernoulliTable::BernoulliTable(uint32_t max_index) {
    b_.reserve(max_index + 1);
    b_.push_back(Rational(1));
    for (uint32_t n = 1; n <= max_index; ++n) {
        if (n > 1 && n % 2 == 1) {
            b_.push_back(Rational(0));
            continue;
        }
        Rational s(0);
        for (uint32_t k = 0; k < n; ++k) s += binomial(n + 1, k) * b_[k];
        b_.push_back(-s / Rational(static_cast<long>(n) + 1));
    }
}

Rational bernoulli_poly(uint32_t m, const Rational& x, const BernoulliTable& table) {
    Rational acc = table[0];
    for (uint32_t j = 1; j <= m; ++j) acc = acc * x + binomial(m, j) * table[j];
    return acc;
}

}  // namespace regsum
