#include "regsum/euler.hpp"

#include <cmath>

#include "regsum/arith.hpp"
#include "regsum/bernoulli.hpp"
#include "detail/parallel.hpp"

namespace regsum {

namespace {

/* sum_{p > B} C / p^k <= C (1.25506 k/(k-1) - 1) / (B^{k-1} log B), from
 * pi(x) < 1.25506 x/log x (x > 1) and pi(B) > B/log B (B >= 17). */
double prime_tail_bound(uint64_t B, int k, double C) {
    double lb = std::log(static_cast<double>(B));
    return C * (1.25506 * k / (k - 1.0) - 1.0) * std::pow(static_cast<double>(B), 1.0 - k) / lb;
}

Real round_to(const Real& x, mpfr_prec_t prec) {
    Real out(prec);
    mpfr_set(out.raw(), x.raw(), MPFR_RNDN);
    return out;
}

}  // namespace

/* --- Euler products --- */

BoundedValue euler_product(const EulerProductSpec& spec, const SpfSieve& sieve,
                           mpfr_prec_t prec, int threads) {
    if (spec.prime_bound < 100) throw std::domain_error("euler_product: prime bound too small");
    if (spec.prime_bound > sieve.limit())
        throw std::domain_error("euler_product: prime bound exceeds sieve limit");
    if (spec.tail_decay < 2) throw std::domain_error("euler_product: tail decay must be >= 2");

    const mpfr_prec_t w = prec + 32;
    std::vector<uint64_t> ps = sieve.primes(spec.prime_bound);

    /* log of the product, accumulated per fixed block of primes; within a
     * block, exact rational sub-products of 16 factors take one log each. */
    const uint64_t block = 4096;
    uint64_t nblocks = ps.empty() ? 1 : (ps.size() - 1) / block + 1;
    std::vector<Real> partial(nblocks, Real(w));
    detail::parallel_blocks(
        0, ps.size() - 1, threads, block, [&](uint64_t b, uint64_t lo, uint64_t hi) {
            Real acc(w);
            Rational batch(1);
            int in_batch = 0;
            for (uint64_t i = lo; i <= hi; ++i) {
                Rational loc = spec.local_factor(ps[i]);
                if (loc.sign() <= 0)
                    throw std::domain_error("euler_product: non-positive local factor at p=" +
                                            std::to_string(ps[i]));
                batch *= loc;
                if (++in_batch == 16) {
                    acc += log(Real(batch, w));
                    batch = Rational(1);
                    in_batch = 0;
                }
            }
            if (in_batch) acc += log(Real(batch, w));
            partial[b] = acc;
        });

    Real logsum(w);
    for (const Real& pr : partial) logsum += pr;

    BoundedValue out;
    out.value = round_to(exp(logsum), prec);
    double tail = prime_tail_bound(spec.prime_bound, spec.tail_decay, spec.tail_c);
    double rounding = (static_cast<double>(ps.size()) + 16.0) *
                      std::ldexp(1.0 + std::fabs(logsum.to_double()), -static_cast<int>(w) + 2);
    /* |e^t - 1| <= |t| e^|t| converts the log-scale bound */
    out.error_bound = std::fabs(out.value.to_double()) * (tail + rounding) * 1.01 + 1e-300;
    out.method = "euler_product(" + std::to_string(spec.prime_bound) + ")";
    return out;
}

std::vector<EulerProductSpec> main_term_product_specs(uint64_t prime_bound) {
    std::vector<EulerProductSpec> specs;
    auto zp = [](uint64_t p) { return mpz_class(static_cast<unsigned long>(p)); };

    specs.push_back({"K1",
                     [zp](uint64_t p) {
                         mpz_class P = zp(p);
                         return Rational(1) - Rational(mpz_class(1), mpz_class(P * (P + 1)));
                     },
                     2, 1.0, prime_bound});

    for (int m = 1; m <= 4; ++m) {
        specs.push_back({"C" + std::to_string(m),
                         [zp, m](uint64_t p) {
                             mpz_class P = zp(p);
                             mpz_class num = (P - 1) * (pow_z(P, 2 * m - 1) - 1);
                             mpz_class den = P * (pow_z(P, 2 * m + 1) - 1);
                             return Rational(1) - Rational(num, den);
                         },
                         2, 1.01, prime_bound});
    }

    specs.push_back({"D0",
                     [zp](uint64_t p) {
                         mpz_class P1 = zp(p) + 1;
                         return Rational(1) + Rational(mpz_class(1), mpz_class(P1 * P1));
                     },
                     2, 1.01, prime_bound});

    for (int m = 1; m <= 4; ++m) {
        specs.push_back({"D" + std::to_string(m),
                         [zp, m](uint64_t p) {
                             mpz_class P = zp(p);
                             mpz_class num = P * (pow_z(P, 2 * m - 1) - 1);
                             mpz_class den = (P + 1) * (pow_z(P, 2 * m + 2) - 1);
                             return Rational(1) - Rational(num, den);
                         },
                         3, 1.01, prime_bound});
    }

    for (int m = 1; m <= 4; ++m) {
        specs.push_back({"E" + std::to_string(m),
                         [zp, m](uint64_t p) {
                             mpz_class P = zp(p);
                             mpz_class num = P * (pow_z(P, 2 * m - 1) - 1);
                             mpz_class den = (P + 1) * (pow_z(P, 2 * m + 1) - 1);
                             return Rational(1) - Rational(num, den);
                         },
                         2, 1.01, prime_bound});
    }

    specs.push_back({"P_tau",
                     [zp](uint64_t p) {
                         mpz_class P = zp(p);
                         mpz_class num = P * (2 * P * P - 1);
                         mpz_class den = (P - 1) * (P - 1) * pow_z(P + 1, 3);
                         return Rational(1) + Rational(num, den);
                     },
                     2, 2.05, prime_bound});

    return specs;
}

/* --- zeta values --- */

BoundedValue zeta2_closed(mpfr_prec_t prec) {
    BoundedValue out;
    Real pi = Real::pi(prec + 16);
    out.value = round_to(pi * pi / Real(6, prec + 16), prec);
    out.error_bound = std::ldexp(2.0, -static_cast<int>(prec)) *
                      std::fabs(out.value.to_double());
    out.method = "pi^2/6";
    return out;
}

/* Euler-Maclaurin at N = 64 (a power of two, so N^-e is exact in binary):
 * zeta(s) = sum_{n<N} n^-s + N^{1-s}/(s-1) + N^-s/2
 *           + sum_j B_2j/(2j)! (s)_{2j-1} N^{1-s-2j} + R. */
BoundedValue zeta_em(uint32_t s, mpfr_prec_t prec) {
    if (s < 2) throw std::domain_error("zeta_em: s must be >= 2");
    const mpfr_prec_t w = prec + 48;
    const long N = 64, LOG2N = 6;

    Real acc(w);
    for (long n = 1; n < N; ++n) {
        Real t(w);
        mpfr_ui_pow_ui(t.raw(), static_cast<unsigned long>(n), s, MPFR_RNDN);
        mpfr_ui_div(t.raw(), 1, t.raw(), MPFR_RNDN);
        acc += t;
    }
    Real tN(w);
    mpfr_set_ui_2exp(tN.raw(), 1, -LOG2N * (static_cast<long>(s) - 1), MPFR_RNDN);
    acc += tN / Real(static_cast<long>(s) - 1, w);
    Real half(w);
    mpfr_set_ui_2exp(half.raw(), 1, -LOG2N * static_cast<long>(s) - 1, MPFR_RNDN);
    acc += half;

    BernoulliTable B(64);
    double omitted = 0;
    bool converged = false;
    for (uint32_t j = 1; j <= 80; ++j) {
        if (2 * j > B.max_index()) B = BernoulliTable(2 * j + 32);
        /* coeff = B_2j/(2j)! * s(s+1)...(s+2j-2), exact */
        mpz_class fact, poch = 1;
        mpz_fac_ui(fact.get_mpz_t(), 2 * j);
        for (uint32_t i = 0; i + 2 <= 2 * j; ++i) poch *= s + i;
        Rational coeff = B[2 * j] * Rational(poch, fact);
        Real term(Rational(coeff), w);
        mpfr_mul_2si(term.raw(), term.raw(),
                     LOG2N * (1 - static_cast<long>(s) - 2 * static_cast<long>(j)), MPFR_RNDN);
        double mag = std::fabs(term.to_double());
        if (mag < std::ldexp(1.0, -static_cast<int>(w) - 8)) {
            omitted = mag;
            converged = true;
            break;
        }
        acc += term;
    }
    if (!converged) throw std::runtime_error("zeta_em: series did not converge");

    BoundedValue out;
    out.value = round_to(acc, prec);
    out.error_bound = 2 * omitted + std::ldexp(200.0, -static_cast<int>(w)) +
                      std::ldexp(2.0, -static_cast<int>(prec)) * out.value.to_double();
    out.method = "euler_maclaurin(N=64)";
    return out;
}

BoundedValue zeta3_accelerated(mpfr_prec_t prec) {
    /* zeta(3) = 5/2 sum_{n>=1} (-1)^(n-1) / (n^3 C(2n,n)), exact partial sum */
    const int M = 64;
    Rational s(0);
    for (int n = 1; n <= M; ++n) {
        mpz_class c;
        mpz_bin_uiui(c.get_mpz_t(), 2 * n, n);
        Rational term(mpz_class(1), mpz_class(c * n * n * n));
        s += (n % 2 == 1) ? term : -term;
    }
    s *= Rational(5, 2);
    mpz_class cnext;
    mpz_bin_uiui(cnext.get_mpz_t(), 2 * (M + 1), M + 1);
    BoundedValue out;
    out.value = Real(s, prec);
    out.error_bound = 3.0 * Rational(mpz_class(1), mpz_class(cnext * (M + 1) * (M + 1) * (M + 1)))
                                .to_double();
    out.method = "central_binomial(64)";
    return out;
}

BoundedValue zeta_prime_2(mpfr_prec_t prec) {
    /* zeta'(2) = -[ sum_{n<N} log n/n^2 + (log N + 1)/N + log N/(2 N^2)
     *             + sum_j B_2j N^{-1-2j} (log N - H_2j + 1) ] + R, N = 64 */
    const mpfr_prec_t w = prec + 48;
    const long N = 64, LOG2N = 6;

    Real logN(w);
    mpfr_const_log2(logN.raw(), MPFR_RNDN);
    logN *= Real(LOG2N, w);

    Real acc(w);
    for (long n = 2; n < N; ++n) {
        Real t = Real::log_ui(static_cast<unsigned long>(n), w);
        mpfr_div_ui(t.raw(), t.raw(), static_cast<unsigned long>(n * n), MPFR_RNDN);
        acc += t;
    }
    acc += (logN + Real(1, w)) / Real(N, w);
    acc += logN / Real(2 * N * N, w);

    BernoulliTable B(64);
    double omitted = 0;
    bool converged = false;
    Rational Hrun(0);  // harmonic number H_{2j}
    uint32_t hterm = 0;
    for (uint32_t j = 1; j <= 80; ++j) {
        if (2 * j > B.max_index()) B = BernoulliTable(2 * j + 32);
        while (hterm < 2 * j) {
            ++hterm;
            Hrun += Rational(1, hterm);
        }
        /* B_2j N^{-1-2j} (log N - (H_2j - 1)) */
        Real term = logN - Real(Hrun - Rational(1), w);
        term *= Real(B[2 * j], w);
        mpfr_mul_2si(term.raw(), term.raw(), -LOG2N * (1 + 2 * static_cast<long>(j)), MPFR_RNDN);
        double mag = std::fabs(term.to_double());
        if (mag < std::ldexp(1.0, -static_cast<int>(w) - 8)) {
            omitted = mag;
            converged = true;
            break;
        }
        acc += term;
    }
    if (!converged) throw std::runtime_error("zeta_prime_2: series did not converge");

    BoundedValue out;
    out.value = round_to(-acc, prec);
    out.error_bound = 2 * omitted + std::ldexp(300.0, -static_cast<int>(w));
    out.method = "euler_maclaurin(N=64)";
    return out;
}

BoundedValue zeta_prime_2_lambda(const SpfSieve& sieve, uint64_t bound, mpfr_prec_t prec) {
    if (bound < 100 || bound > sieve.limit())
        throw std::domain_error("zeta_prime_2_lambda: bad bound");
    const mpfr_prec_t w = prec + 32;
    /* -zeta'(2)/zeta(2) = sum_d Lambda(d)/d^2 = sum_p log p/(p^2 - 1) */
    Real s(w);
    for (uint64_t p : sieve.primes(bound)) {
        Real t = Real::log_ui(p, w);
        mpfr_div_ui(t.raw(), t.raw(), p * p - 1, MPFR_RNDN);
        s += t;
    }
    Real z2 = zeta2_closed(prec + 16).value;
    BoundedValue out;
    out.value = round_to(-(z2 * s), prec);
    /* tail of sum_p log p/(p^2-1) beyond bound, times zeta(2) */
    out.error_bound = 1.65 * 2.02 / static_cast<double>(bound) + 1e-30;
    out.method = "lambda_sum(" + std::to_string(bound) + ")";
    return out;
}

/* --- Euler's constant --- */

BoundedValue euler_gamma(mpfr_prec_t prec) {
    /* gamma = H_N - log N - 1/(2N) + sum_j B_2j/(2j) N^-2j + R, N = 64 */
    const mpfr_prec_t w = prec + 48;
    const long N = 64, LOG2N = 6;

    Rational H(0);
    for (long n = 1; n <= N; ++n) H += Rational(1, static_cast<unsigned long>(n));
    Real acc(H, w);

    Real logN(w);
    mpfr_const_log2(logN.raw(), MPFR_RNDN);
    acc -= logN * Real(LOG2N, w);
    Real half(w);
    mpfr_set_ui_2exp(half.raw(), 1, -LOG2N - 1, MPFR_RNDN);
    acc -= half;

    BernoulliTable B(64);
    double omitted = 0;
    bool converged = false;
    for (uint32_t j = 1; j <= 80; ++j) {
        if (2 * j > B.max_index()) B = BernoulliTable(2 * j + 32);
        Real term(B[2 * j] / Rational(2 * static_cast<long>(j)), w);
        mpfr_mul_2si(term.raw(), term.raw(), -LOG2N * 2 * static_cast<long>(j), MPFR_RNDN);
        double mag = std::fabs(term.to_double());
        if (mag < std::ldexp(1.0, -static_cast<int>(w) - 8)) {
            omitted = mag;
            converged = true;
            break;
        }
        acc += term;
    }
    if (!converged) throw std::runtime_error("euler_gamma: series did not converge");

    BoundedValue out;
    out.value = round_to(acc, prec);
    out.error_bound = 2 * omitted + std::ldexp(100.0, -static_cast<int>(w));
    out.method = "euler_maclaurin(N=64)";
    return out;
}

BoundedValue euler_gamma_reference(mpfr_prec_t prec) {
    BoundedValue out;
    Real g(prec);
    mpfr_const_euler(g.raw(), MPFR_RNDN);
    out.value = g;
    out.error_bound = std::ldexp(1.0, -static_cast<int>(prec) + 1);
    out.method = "const_euler";
    return out;
}

/* --- K2 --- */

const char* alpha_variant_name(AlphaVariant v) {
    return v == AlphaVariant::paper_literal ? "paper_literal" : "log_p";
}

BoundedValue k2_series(uint64_t truncation, AlphaVariant variant, const SpfSieve& sieve,
                       mpfr_prec_t prec) {
    if (truncation < 10000) throw std::domain_error("k2_series: truncation must be >= 10^4");
    if (truncation > sieve.limit())
        throw std::domain_error("k2_series: truncation exceeds sieve limit");

    /* series part in double: its truncation tail (~ log N / N) dwarfs rounding */
    double series = 0.0;
    for (uint64_t n = 2; n <= truncation; ++n) {
        uint64_t m = n, psi = 1;
        int mu = 1;
        double alpha = 0.0, beta = 0.0, sum_inv_pm1 = 0.0;
        bool squarefree = true;
        while (m > 1) {
            uint64_t p = sieve.spf(m);
            uint32_t a = 0;
            while (m % p == 0) {
                m /= p;
                ++a;
            }
            if (a > 1) {
                squarefree = false;
                break;
            }
            mu = -mu;
            psi *= p + 1;
            double lp = std::log(static_cast<double>(p));
            double pd = static_cast<double>(p);
            sum_inv_pm1 += 1.0 / (pd - 1.0);
            alpha += lp / (pd - 1.0);
            beta += lp / (pd * pd - 1.0);
        }
        if (!squarefree) continue;
        double logn = std::log(static_cast<double>(n));
        double a_used = (variant == AlphaVariant::paper_literal) ? logn * sum_inv_pm1 : alpha;
        series += mu * (logn - a_used + 2.0 * beta) / (static_cast<double>(n) * psi);
    }

    /* closed part K1 (2 gamma - 1/2 - 2 zeta'(2)/zeta(2)) in high precision */
    uint64_t k1_bound = std::min<uint64_t>(sieve.limit(), 1000000);
    EulerProductSpec k1s = main_term_product_specs(k1_bound)[0];
    BoundedValue k1 = euler_product(k1s, sieve, prec);
    BoundedValue g = euler_gamma(prec);
    BoundedValue zp2 = zeta_prime_2(prec);
    BoundedValue z2 = zeta2_closed(prec);

    Real closed = Real(2, prec) * g.value - Real(Rational(1, 2), prec) -
                  Real(2, prec) * zp2.value / z2.value;
    Real value = k1.value * closed - Real(series, prec);

    double logN = std::log(static_cast<double>(truncation));
    double tail_coef = (variant == AlphaVariant::paper_literal) ? 4.5 : 3.0;
    BoundedValue out;
    out.value = value;
    out.error_bound = tail_coef * (logN + 1.0) / static_cast<double>(truncation) +
                      2.8 * k1.error_bound + 2.0 * k1.value.to_double() *
                      (g.error_bound + zp2.error_bound + z2.error_bound) + 1e-12;
    out.method = std::string("k2_series(") + alpha_variant_name(variant) + "," +
                 std::to_string(truncation) + ")";
    return out;
}

/* --- K --- */

KConstant k_constant(uint64_t bound, const SpfSieve& sieve, mpfr_prec_t prec) {
    if (bound < 100 || bound > sieve.limit()) throw std::domain_error("k_constant: bad bound");
    const mpfr_prec_t w = prec + 32;

    /* direct d-sum: Lambda(d)/(d^2 psi(d)) over prime powers d <= bound */
    Real dsum(w);
    for (uint64_t d = 2; d <= bound; ++d) {
        uint64_t m = d, p = sieve.spf(d);
        while (m % p == 0) m /= p;
        if (m != 1) continue;
        Real t = Real::log_ui(p, w);
        Factorization f = factorize(d, sieve);
        mpfr_div_ui(t.raw(), t.raw(), d * d, MPFR_RNDN);
        mpfr_div_ui(t.raw(), t.raw(), dedekind_psi(f), MPFR_RNDN);
        dsum += t;
    }

    /* same terms grouped by prime: log p sum_{p^a <= bound} 1/(p^2a psi(p^a)) */
    Real matched(w);
    Real full(w);
    for (uint64_t p : sieve.primes(bound)) {
        Rational geo_matched(0);
        for (unsigned __int128 pa = p; pa <= bound; pa *= p) {
            uint64_t d = static_cast<uint64_t>(pa);
            Factorization f = factorize(d, sieve);
            geo_matched += Rational(mpz_class(1),
                                    mpz_class(mpz_class(static_cast<unsigned long>(d)) * d *
                                              static_cast<unsigned long>(dedekind_psi(f))));
        }
        matched += Real(geo_matched, w) * Real::log_ui(p, w);
        /* all powers: sum_a 1/(p^2a p^(a-1)(p+1)) = p/((p+1)(p^3-1)) */
        mpz_class P(static_cast<unsigned long>(p));
        Rational geo_full(P, mpz_class((P + 1) * (pow_z(P, 3) - 1)));
        full += Real(geo_full, w) * Real::log_ui(p, w);
    }

    KConstant out;
    out.d_sum_partial = round_to(dsum, prec);
    out.matched_prime_sum = round_to(matched, prec);
    out.full.value = round_to(full, prec);
    double lb = std::log(static_cast<double>(bound));
    double B2 = static_cast<double>(bound) * static_cast<double>(bound);
    out.full.error_bound = 1.02 * ((2 * lb + 1) / (4 * B2) + lb / (B2 * static_cast<double>(bound))) +
                           std::ldexp(4.0 * lb, -static_cast<int>(w));
    out.full.method = "prime_sum(" + std::to_string(bound) + ")";
    return out;
}

/* --- store --- */

void ConstantStore::put(const std::string& name, BoundedValue v) {
    if (!map_.count(name)) order_.push_back(name);
    map_[name] = std::move(v);
}

const BoundedValue& ConstantStore::get(const std::string& name) const {
    auto it = map_.find(name);
    if (it == map_.end()) throw std::domain_error("constant store: unresolved constant '" + name + "'");
    return it->second;
}

ConstantStore build_constant_store(const SpfSieve& sieve, uint64_t prime_bound,
                                   mpfr_prec_t prec, int threads) {
    if (prime_bound > sieve.limit())
        throw std::domain_error("constant store: prime bound exceeds sieve limit");
    ConstantStore store;

    store.put("zeta2", zeta2_closed(prec));
    store.put("zeta3", zeta_em(3, prec));
    store.put("zeta5", zeta_em(5, prec));
    store.put("zeta7", zeta_em(7, prec));
    store.put("zeta9", zeta_em(9, prec));
    store.put("zeta_prime2", zeta_prime_2(prec));
    store.put("euler_gamma", euler_gamma(prec));

    BoundedValue lsp;
    Real two_pi = Real(2, prec + 16) * Real::pi(prec + 16);
    lsp.value = round_to(log(two_pi) / Real(2, prec + 16), prec);
    lsp.error_bound = std::ldexp(2.0, -static_cast<int>(prec));
    lsp.method = "log(sqrt(2*pi))";
    store.put("log_sqrt_2pi", lsp);

    for (const EulerProductSpec& spec : main_term_product_specs(prime_bound))
        store.put(spec.name, euler_product(spec, sieve, prec, threads));

    uint64_t kb = std::min<uint64_t>(prime_bound, 1000000);
    store.put("K", k_constant(kb, sieve, prec).full);

    uint64_t trunc = std::max<uint64_t>(10000, prime_bound);
    store.put("K2", k2_series(trunc, AlphaVariant::log_p, sieve, prec));
    store.put("K2_literal", k2_series(trunc, AlphaVariant::paper_literal, sieve, prec));

    return store;
}

}  // namespace regsum
