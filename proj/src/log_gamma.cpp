#include "regsum/log_gamma.hpp"

#include <cmath>
#include <map>
#include <memory>

#include "regsum/bernoulli.hpp"

namespace regsum {

namespace {

struct StirlingPlan {
    long shift;
    std::vector<Rational> coeff;  // B_{2n} / (2n (2n-1)), n = 1..N
};

/* log2 of the first omitted Stirling term at argument >= shift. */
double omitted_term_log2(long N, long shift) {
    double l2 = 1.0 + std::lgamma(2.0 * N + 3.0) / std::log(2.0);
    l2 -= (2.0 * N + 2.0) * std::log2(2.0 * M_PI);
    l2 -= std::log2((2.0 * N + 2.0) * (2.0 * N + 1.0));
    l2 -= (2.0 * N + 1.0) * std::log2(static_cast<double>(shift));
    return l2;
}

const StirlingPlan& plan_for(mpfr_prec_t work_prec) {
    thread_local std::map<mpfr_prec_t, std::unique_ptr<StirlingPlan>> cache;
    auto& slot = cache[work_prec];
    if (slot) return *slot;

    long shift = 32, terms = 0;
    for (;; shift *= 2) {
        for (long N = 4; N <= 256; ++N) {
            if (omitted_term_log2(N, shift) <= -(static_cast<double>(work_prec) + 6)) {
                terms = N;
                break;
            }
        }
        if (terms) break;
    }

    auto plan = std::make_unique<StirlingPlan>();
    plan->shift = shift;
    BernoulliTable table(static_cast<uint32_t>(2 * terms));
    for (long n = 1; n <= terms; ++n)
        plan->coeff.push_back(table[static_cast<uint32_t>(2 * n)] /
                              Rational(2 * n * (2 * n - 1)));
    slot = std::move(plan);
    return *slot;
}

void check_domain(const Rational& x) {
    if (x.sign() <= 0 || x > Rational(1))
        throw std::domain_error("log_gamma: argument must lie in (0, 1]");
}

}  // namespace

Real log_gamma(const Rational& x, mpfr_prec_t prec) {
    check_domain(x);
    const mpfr_prec_t w = prec + 64;
    const StirlingPlan& plan = plan_for(w);

    /* lgamma(x) = lgamma(x + shift) - log prod_{j<shift} (x + j), exact product. */
    Rational prod(1);
    for (long j = 0; j < plan.shift; ++j) prod *= x + Rational(j);
    Rational zq = x + Rational(plan.shift);

    Real z(zq, w);
    Real lz = log(z);
    Real half(Rational(1, 2), w);

    Real result = (z - half) * lz - z;
    Real two_pi = Real(2, w) * Real::pi(w);
    result += half * log(two_pi);

    Real t = Real(1, w) / (z * z);
    Real acc(plan.coeff.back(), w);
    for (size_t n = plan.coeff.size() - 1; n-- > 0;) {
        acc *= t;
        acc += Real(plan.coeff[n], w);
    }
    result += acc / z;
    result -= log(Real(prod, w));

    Real out(prec);
    mpfr_set(out.raw(), result.raw(), MPFR_RNDN);
    return out;
}

Real log_gamma_reference(const Rational& x, mpfr_prec_t prec) {
    check_domain(x);
    Real z(x, prec + 32);
    Real r(prec + 32);
    mpfr_lngamma(r.raw(), z.raw(), MPFR_RNDN);
    Real out(prec);
    mpfr_set(out.raw(), r.raw(), MPFR_RNDN);
    return out;
}

}  // namespace regsum
