#include "regsum/partial_sum.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "detail/parallel.hpp"
#include "regsum/bernoulli.hpp"

namespace regsum {

namespace {

constexpr double kUlp64 = 0x1p-64;
constexpr double kUlp65 = 0x1p-65;

/* --- 128-bit fixed point, Q64.64 --- */

mpz_class i128_to_mpz(__int128 v) {
    bool neg = v < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : v;
    mpz_class r(static_cast<unsigned long>(u >> 64));
    mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), 64);
    r += static_cast<unsigned long>(u);
    return neg ? mpz_class(-r) : r;
}

__int128 mpz_to_i128(const mpz_class& z) {
    uint64_t limbs[2] = {0, 0};
    size_t cnt = 0;
    mpz_export(limbs, &cnt, -1, 8, 0, 0, z.get_mpz_t());
    unsigned __int128 u = (static_cast<unsigned __int128>(limbs[1]) << 64) | limbs[0];
    return mpz_sgn(z.get_mpz_t()) < 0 ? -static_cast<__int128>(u) : static_cast<__int128>(u);
}

Rational fixed_to_rational(__int128 v) {
    mpz_class den(1);
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), 64);
    return Rational(i128_to_mpz(v), den);
}

double fixed_abs_to_double(__int128 v) {
    unsigned __int128 u = v < 0 ? -static_cast<unsigned __int128>(v) : v;
    return (static_cast<double>(static_cast<uint64_t>(u >> 64)) * 0x1p64 +
            static_cast<double>(static_cast<uint64_t>(u))) *
           kUlp64;
}

/* Truncating Q64.64 product; |error| <= 2^-64. Operands must keep the true
 * product magnitude below 2^63 in value terms. */
__int128 mulfix(__int128 a, __int128 b) {
    bool neg = (a < 0) != (b < 0);
    unsigned __int128 ua = a < 0 ? -static_cast<unsigned __int128>(a) : a;
    unsigned __int128 ub = b < 0 ? -static_cast<unsigned __int128>(b) : b;
    uint64_t a1 = static_cast<uint64_t>(ua >> 64), a0 = static_cast<uint64_t>(ua);
    uint64_t b1 = static_cast<uint64_t>(ub >> 64), b0 = static_cast<uint64_t>(ub);
    unsigned __int128 r = (static_cast<unsigned __int128>(a1) * b1) << 64;
    r += static_cast<unsigned __int128>(a1) * b0;
    r += static_cast<unsigned __int128>(a0) * b1;
    r += (static_cast<unsigned __int128>(a0) * b0) >> 64;
    return neg ? -static_cast<__int128>(r) : static_cast<__int128>(r);
}

/* Round num/den to Q64.64, half toward +inf. */
__int128 fixed_of_mpz_frac(const mpz_class& num, const mpz_class& den) {
    mpz_class t;
    mpz_mul_2exp(t.get_mpz_t(), num.get_mpz_t(), 65);
    t += den;
    mpz_class d2 = den << 1, r;
    mpz_fdiv_q(r.get_mpz_t(), t.get_mpz_t(), d2.get_mpz_t());
    if (mpz_sizeinbase(r.get_mpz_t(), 2) > 126)
        throw std::domain_error("fixed128 accumulation: value exceeds Q64.64 range");
    return mpz_to_i128(r);
}

__int128 fixed_of_i64_frac(int64_t num, uint64_t den) {
    uint64_t an = num < 0 ? static_cast<uint64_t>(-num) : static_cast<uint64_t>(num);
    unsigned __int128 t = ((static_cast<unsigned __int128>(an) << 64) + den / 2) / den;
    return num < 0 ? -static_cast<__int128>(t) : static_cast<__int128>(t);
}

/* --- equation catalogue --- */

struct EqDef {
    const char* id;
    int family;
    FnKind f;
    bool f_free;
    bool has_main;
    const char* shape;
};

const EqDef kEqDefs[] = {
    {"eq1", 1, FnKind::id, true, false, "none"},
    {"eq2", 2, FnKind::id, true, false, "none"},
    {"eq3", 3, FnKind::id, true, false, "none"},
    {"eq4", 4, FnKind::id, true, false, "none"},
    {"eq5", 5, FnKind::id, true, false, "none"},
    {"eq6", 6, FnKind::id, true, false, "none"},
    {"eqcor11", 1, FnKind::id, false, true, "sqrt_x"},
    {"eqcor12", 1, FnKind::mobius, false, true, "log3"},
    {"eqcor13", 1, FnKind::tau, false, true, "log5"},
    {"eqcor14", 2, FnKind::phi2, false, true, "log4"},
    {"eqthm21", 3, FnKind::id, false, true, "log2"},
    {"eqthm22", 3, FnKind::phi, false, true, "log3"},
    {"eqthm23", 3, FnKind::tau, false, false, "log5"},
    {"eqthm24", 3, FnKind::mobius, false, false, "log3"},
    {"eqthm25", 4, FnKind::phi, false, true, "log4"},
    {"eqthm26", 4, FnKind::phi2, false, true, "log3_over_x"},
    {"eqthm61", 5, FnKind::id, false, true, "x"},
    {"eqthm62", 5, FnKind::tau, false, true, "log5"},
    {"eqthm63", 5, FnKind::mobius, false, true, "log3"},
    {"eqthm64", 6, FnKind::phi, false, true, "sqrt_x"},
    {"eqthm65", 6, FnKind::phi2, false, true, "log4"},
};

const char* fn_kind_name(FnKind k) {
    switch (k) {
        case FnKind::one: return "one";
        case FnKind::id: return "id";
        case FnKind::mobius: return "mu";
        case FnKind::tau: return "tau";
        case FnKind::tau_star: return "tau_star";
        case FnKind::phi: return "phi";
        case FnKind::phi2: return "phi2";
        case FnKind::sigma: return "sigma";
        default: return "custom";
    }
}

bool family_needs_r(int family) { return family == 1 || family == 2; }
bool family_needs_m(int family) { return family == 3 || family == 4; }
bool family_divides_by_f(int family) { return family % 2 == 0; }

/* --- weight tables for the convolution engine --- */

struct ValueTable {
    bool exact = false;
    bool is_one = false;
    std::vector<mpq_class> q;     // exact values, index 0..x
    std::vector<__int128> fx;     // Q64.64 values
    std::vector<double> av;       // |value| upper estimates
    double sum_abs = 0.0;
    double max_abs = 0.0;
};

enum class WeightKind { phi_m_over_d, phi_m_over_f, f_over_l, one };

std::vector<int64_t> euler_phi_table(uint64_t x, const SpfSieve& sieve) {
    std::vector<int64_t> phi(x + 1, 0);
    if (x >= 1) phi[1] = 1;
    for (uint64_t d = 2; d <= x; ++d) {
        uint64_t p = sieve.spf(d), d1 = d / p;
        phi[d] = phi[d1] * static_cast<int64_t>(d1 % p == 0 ? p : p - 1);
    }
    return phi;
}

void table_stats(ValueTable& t) {
    t.sum_abs = 0;
    t.max_abs = 0;
    for (double a : t.av) {
        t.sum_abs += a;
        t.max_abs = std::max(t.max_abs, a);
    }
}

ValueTable build_table(WeightKind kind, uint32_t m, const ArithmeticalFunction& f, uint64_t x,
                       const SpfSieve& sieve, bool exact_mode, int threads) {
    ValueTable t;
    t.exact = exact_mode;
    if (kind == WeightKind::one) {
        t.is_one = true;
        t.sum_abs = static_cast<double>(x);
        t.max_abs = 1.0;
        return t;
    }

    std::vector<int64_t> fv;
    if (kind == WeightKind::f_over_l || kind == WeightKind::phi_m_over_f)
        fv = f.table_i64(x, sieve);

    if (exact_mode)
        t.q.assign(x + 1, mpq_class(0));
    else {
        t.fx.assign(x + 1, 0);
        t.av.assign(x + 1, 0.0);
    }

    auto emit_i64 = [&](uint64_t i, int64_t num, uint64_t den) {
        if (exact_mode) {
            t.q[i] = mpq_class(static_cast<long>(num), static_cast<unsigned long>(den));
            t.q[i].canonicalize();
        } else {
            t.fx[i] = fixed_of_i64_frac(num, den);
            t.av[i] = std::fabs(static_cast<double>(num)) / static_cast<double>(den);
        }
    };

    if (kind == WeightKind::phi_m_over_f && !f.nonvanishing())
        throw std::domain_error("weight '" + f.name() + "' vanishes; cannot divide by f(d)");

    if (kind == WeightKind::f_over_l) {
        for (uint64_t l = 1; l <= x; ++l) emit_i64(l, fv[l], l);
    } else if (m == 0) {
        /* nonvanishing builtin weights are strictly positive, so f(d) > 0 here */
        std::vector<int64_t> phi = euler_phi_table(x, sieve);
        for (uint64_t d = 1; d <= x; ++d)
            emit_i64(d, phi[d],
                     kind == WeightKind::phi_m_over_d ? d : static_cast<uint64_t>(fv[d]));
    } else {
        /* phi_{1-2m}(d) = N(d) / d^e with e = 2m-1, N(d) = prod_{p|d}(1 - p^e). */
        unsigned long e = 2ul * m - 1;
        std::vector<mpz_class> N(x + 1);
        if (x >= 1) N[1] = 1;
        for (uint64_t d = 2; d <= x; ++d) {
            uint64_t p = sieve.spf(d), d1 = d / p;
            if (d1 % p == 0)
                N[d] = N[d1];
            else
                N[d] = N[d1] * (1 - pow_z(mpz_class(static_cast<unsigned long>(p)), e));
        }
        detail::parallel_blocks(1, x, threads, 4096, [&](uint64_t, uint64_t lo, uint64_t hi) {
            for (uint64_t d = lo; d <= hi; ++d) {
                mpz_class den = pow_z(mpz_class(static_cast<unsigned long>(d)), e);
                if (kind == WeightKind::phi_m_over_d)
                    den *= static_cast<unsigned long>(d);
                else
                    den *= static_cast<long>(fv[d]);
                if (exact_mode) {
                    t.q[d] = mpq_class(N[d], den);
                    t.q[d].canonicalize();
                } else {
                    t.fx[d] = fixed_of_mpz_frac(N[d], den);
                    t.av[d] = std::fabs(mpz_get_d(N[d].get_mpz_t()) /
                                        mpz_get_d(den.get_mpz_t()));
                }
            }
        });
    }
    if (!exact_mode) table_stats(t);
    return t;
}

/* --- coprime pair sums, bucketed by checkpoint --- */

struct PairSums {
    std::vector<std::vector<Rational>> val;  // [g][checkpoint], cumulative
    std::vector<std::vector<double>> err;
};

PairSums pair_sums(const std::vector<const ValueTable*>& gs, const ValueTable& h,
                   const std::vector<uint64_t>& cps, bool exact_mode, int threads) {
    size_t G = gs.size(), J = cps.size();
    uint64_t x = cps.back();
    const uint64_t BLK = 256;
    uint64_t nblocks = (x - 1) / BLK + 1;

    std::vector<std::vector<std::vector<mpq_class>>> bq;
    std::vector<std::vector<std::vector<__int128>>> bf;
    std::vector<std::vector<std::vector<double>>> be;
    if (exact_mode)
        bq.assign(nblocks, std::vector<std::vector<mpq_class>>(G, std::vector<mpq_class>(J)));
    else {
        bf.assign(nblocks, std::vector<std::vector<__int128>>(G, std::vector<__int128>(J, 0)));
        be.assign(nblocks, std::vector<std::vector<double>>(G, std::vector<double>(J, 0.0)));
    }

    detail::parallel_blocks(1, x, threads, BLK, [&](uint64_t b, uint64_t dlo, uint64_t dhi) {
        for (uint64_t d = dlo; d <= dhi; ++d) {
            uint32_t d32 = static_cast<uint32_t>(d);
            uint64_t y = x / d;
            size_t j = static_cast<size_t>(
                std::lower_bound(cps.begin(), cps.end(), d) - cps.begin());
            uint64_t lo = 1;
            for (; j < J && lo <= y; ++j) {
                uint64_t hi = cps[j] / d;
                if (hi < lo) continue;
                if (exact_mode) {
                    mpq_class hs(0);
                    unsigned long cnt = 0;
                    for (uint64_t l = lo; l <= hi; ++l)
                        if (std::gcd(d32, static_cast<uint32_t>(l)) == 1) {
                            if (!h.is_one) hs += h.q[l];
                            ++cnt;
                        }
                    if (h.is_one) hs = cnt;
                    for (size_t g = 0; g < G; ++g) bq[b][g][j] += gs[g]->q[d] * hs;
                } else {
                    __int128 hs = 0;
                    uint64_t cnt = 0;
                    double habs = 0;
                    for (uint64_t l = lo; l <= hi; ++l)
                        if (std::gcd(d32, static_cast<uint32_t>(l)) == 1) {
                            if (!h.is_one) {
                                hs += h.fx[l];
                                habs += h.av[l];
                            }
                            ++cnt;
                        }
                    if (h.is_one) {
                        hs = static_cast<__int128>(static_cast<unsigned __int128>(cnt) << 64);
                        habs = static_cast<double>(cnt);
                    }
                    for (size_t g = 0; g < G; ++g) {
                        bf[b][g][j] += mulfix(gs[g]->fx[d], hs);
                        be[b][g][j] += gs[g]->av[d] * (h.is_one ? 0.0 : cnt * kUlp65) +
                                       habs * kUlp65 + kUlp64;
                    }
                }
                lo = hi + 1;
            }
        }
    });

    PairSums out;
    out.val.assign(G, std::vector<Rational>(J, Rational(0L)));
    out.err.assign(G, std::vector<double>(J, 0.0));
    for (size_t g = 0; g < G; ++g) {
        if (exact_mode) {
            mpq_class run(0);
            for (size_t j = 0; j < J; ++j) {
                for (uint64_t b = 0; b < nblocks; ++b) run += bq[b][g][j];
                out.val[g][j] = Rational(run);
            }
        } else {
            __int128 run = 0;
            double erun = 0;
            for (size_t j = 0; j < J; ++j) {
                for (uint64_t b = 0; b < nblocks; ++b) {
                    run += bf[b][g][j];
                    erun += be[b][g][j];
                }
                out.val[g][j] = fixed_to_rational(run);
                out.err[g][j] = erun;
            }
        }
    }
    return out;
}

/* --- von Mangoldt convolution pieces (gamma families) --- */

/* T_p(y) = sum_{l<=y, p !| l} h(l), via T_p(y) = H(y) - sum_b h(p^b) T_p(y/p^b). */
struct TpFixed {
    __int128 v;
    double err;
};

TpFixed tp_fixed(uint64_t p, uint64_t y, const std::vector<__int128>& H, const ValueTable& h,
                 std::map<uint64_t, TpFixed>& memo) {
    if (y == 0) return {0, 0.0};
    auto it = memo.find(y);
    if (it != memo.end()) return it->second;
    TpFixed r{H[y], static_cast<double>(y) * kUlp65};
    for (uint64_t pb = p; pb <= y; pb *= p) {
        TpFixed sub = tp_fixed(p, y / pb, H, h, memo);
        r.v -= mulfix(h.fx[pb], sub.v);
        r.err += h.av[pb] * sub.err + fixed_abs_to_double(sub.v) * kUlp65 + kUlp64;
        if (pb > y / p) break;
    }
    memo[y] = r;
    return r;
}

mpq_class tp_exact(uint64_t p, uint64_t y, const std::vector<mpq_class>& H,
                   const ValueTable& h, std::map<uint64_t, mpq_class>& memo) {
    if (y == 0) return mpq_class(0);
    auto it = memo.find(y);
    if (it != memo.end()) return it->second;
    mpq_class r = H[y];
    for (uint64_t pb = p; pb <= y; pb *= p) {
        r -= h.q[pb] * tp_exact(p, y / pb, H, h, memo);
        if (pb > y / p) break;
    }
    memo[y] = r;
    return r;
}

__int128 fixed_div_u64(__int128 v, uint64_t d) { return v / static_cast<__int128>(d); }

Real log_sqrt_2pi(mpfr_prec_t prec) {
    Real two_pi = Real::pi(prec) * Real(2, prec);
    return log(two_pi) / Real(2, prec);
}

/* --- series assembly --- */

void validate_checkpoints(const std::vector<uint64_t>& cps, const SpfSieve& sieve) {
    if (cps.empty()) throw std::domain_error("no checkpoints given");
    for (size_t i = 0; i < cps.size(); ++i) {
        if (cps[i] < 1) throw std::domain_error("checkpoints must be >= 1");
        if (i && cps[i] <= cps[i - 1])
            throw std::domain_error("checkpoints must be strictly increasing");
    }
    if (cps.back() > sieve.limit())
        throw std::domain_error("checkpoint exceeds sieve limit; raise --sieve-limit");
}

/* family 1/2 coefficient list: (m, C(r+1,2m) B_2m / (r+1)) for 0 <= 2m <= r */
std::vector<std::pair<uint32_t, Rational>> power_coefs(uint32_t r) {
    BernoulliTable bern(r + 1);
    std::vector<std::pair<uint32_t, Rational>> cs;
    for (uint32_t m = 0; 2 * m <= r; ++m) {
        Rational c = binomial(r + 1, 2 * m) * bern[2 * m] / Rational(static_cast<long>(r) + 1);
        cs.emplace_back(m, c);
    }
    return cs;
}

SumSeries brute_series(const TheoremEq& eq, const std::vector<uint64_t>& cps,
                       const SpfSieve& sieve, mpfr_prec_t prec, int threads,
                       GammaCache* gamma_cache) {
    uint64_t x = cps.back();
    if (x > 3000)
        throw std::domain_error("brute mode is capped at x = 3000; use convolution mode");
    size_t J = cps.size();
    SumSeries out;
    out.eq = eq;
    out.checkpoints = cps;
    out.mode = SumMode::brute;
    out.accum = AccumMode::exact;
    mpfr_prec_t w = prec + 32;

    auto bucket_of = [&](uint64_t n) {
        return static_cast<size_t>(std::lower_bound(cps.begin(), cps.end(), n) - cps.begin());
    };

    if (eq.family <= 4) {
        const uint64_t BLK = 64;
        uint64_t nblocks = (x - 1) / BLK + 1;
        std::vector<std::vector<mpq_class>> bq(nblocks, std::vector<mpq_class>(J));
        detail::parallel_blocks(1, x, threads, BLK, [&](uint64_t b, uint64_t lo, uint64_t hi) {
            for (uint64_t n = lo; n <= hi; ++n) {
                Rational per = (eq.family <= 2) ? power_sum_lhs(eq.f, n, eq.r, sieve)
                                                : bernoulli_sum_lhs(eq.f, n, eq.m, sieve);
                Rational div = family_divides_by_f(eq.family)
                                   ? eq.f.eval_q(factorize(n, sieve))
                                   : Rational(static_cast<long>(n));
                bq[b][bucket_of(n)] += (per / div).raw();
            }
        });
        out.exact_values = true;
        mpq_class run(0);
        for (size_t j = 0; j < J; ++j) {
            for (uint64_t b = 0; b < nblocks; ++b) run += bq[b][j];
            out.lhs_exact.push_back(Rational(run));
            out.lhs.push_back(Real(Rational(run), w));
            out.lhs_error.push_back(0.0);
        }
        return out;
    }

    GammaCache own(w);
    GammaCache& cache = gamma_cache ? *gamma_cache : own;
    cache.build_upto(x, threads);
    const uint64_t BLK = 64;
    uint64_t nblocks = (x - 1) / BLK + 1;
    std::vector<std::vector<Real>> br(nblocks, std::vector<Real>(J, Real(0, w)));
    detail::parallel_blocks(1, x, threads, BLK, [&](uint64_t b, uint64_t lo, uint64_t hi) {
        for (uint64_t n = lo; n <= hi; ++n) {
            Real per = gamma_sum_lhs(eq.f, n, sieve, cache);
            Rational div = family_divides_by_f(eq.family) ? eq.f.eval_q(factorize(n, sieve))
                                                          : Rational(static_cast<long>(n));
            br[b][bucket_of(n)] += per / Real(div, w);
        }
    });
    Real run(0, w);
    for (size_t j = 0; j < J; ++j) {
        for (uint64_t b = 0; b < nblocks; ++b) run += br[b][j];
        out.lhs.push_back(run);
        out.lhs_error.push_back(static_cast<double>(cps[j]) * 40.0 *
                                std::ldexp(1.0, -static_cast<int>(cache.precision()) + 6));
    }
    return out;
}

SumSeries conv_series(const TheoremEq& eq, const std::vector<uint64_t>& cps, AccumMode accum,
                      const SpfSieve& sieve, mpfr_prec_t prec, int threads) {
    bool ex = accum == AccumMode::exact;
    uint64_t x = cps.back();
    size_t J = cps.size();
    mpfr_prec_t w = prec + 32;
    SumSeries out;
    out.eq = eq;
    out.checkpoints = cps;
    out.mode = SumMode::convolution;
    out.accum = accum;

    const bool gamma_family = eq.family >= 5;
    const bool h_is_f = eq.family % 2 == 1;  // families 1,3,5 pair against f(l)/l

    ValueTable h = build_table(h_is_f ? WeightKind::f_over_l : WeightKind::one, 0, eq.f, x,
                               sieve, ex, threads);

    std::vector<std::pair<uint32_t, Rational>> coefs;
    if (eq.family == 1 || eq.family == 2)
        coefs = power_coefs(eq.r);
    else if (eq.family == 3 || eq.family == 4) {
        BernoulliTable bern(2 * eq.m);
        coefs.emplace_back(eq.m, bern[2 * eq.m]);
    } else
        coefs.emplace_back(0u, Rational(1L));

    WeightKind gk = h_is_f ? WeightKind::phi_m_over_d : WeightKind::phi_m_over_f;
    std::vector<ValueTable> gtabs;
    gtabs.reserve(coefs.size());
    for (const auto& c : coefs) gtabs.push_back(build_table(gk, c.first, eq.f, x, sieve, ex, threads));
    std::vector<const ValueTable*> gptrs;
    for (const auto& t : gtabs) gptrs.push_back(&t);

    if (!ex) {
        /* coarse Q64.64 range check on the dominant pair sum */
        double bound = 0;
        for (const auto& t : gtabs) bound = std::max(bound, t.max_abs);
        if (bound * (h.is_one ? static_cast<double>(x) : h.sum_abs) > 0x1p120)
            throw std::domain_error("fixed128 accumulation would overflow; reduce x");
    }

    PairSums P = pair_sums(gptrs, h, cps, ex, threads);

    /* prefix of h at checkpoints (F1 for odd families, floor(x) for even) */
    std::vector<Rational> f1(J, Rational(0L));
    std::vector<double> f1err(J, 0.0);
    std::vector<__int128> hpref;   // random-access prefix, gamma fixed mode
    std::vector<mpq_class> hprefq; // exact gamma mode
    if (h_is_f) {
        if (ex) {
            if (gamma_family) {
                hprefq.assign(x + 1, mpq_class(0));
                for (uint64_t l = 1; l <= x; ++l) hprefq[l] = hprefq[l - 1] + h.q[l];
                for (size_t j = 0; j < J; ++j) f1[j] = Rational(hprefq[cps[j]]);
            } else {
                mpq_class run(0);
                size_t j = 0;
                for (uint64_t l = 1; l <= x && j < J; ++l) {
                    run += h.q[l];
                    while (j < J && cps[j] == l) f1[j++] = Rational(run);
                }
            }
        } else {
            hpref.assign(x + 1, 0);
            for (uint64_t l = 1; l <= x; ++l) hpref[l] = hpref[l - 1] + h.fx[l];
            for (size_t j = 0; j < J; ++j) {
                f1[j] = fixed_to_rational(hpref[cps[j]]);
                f1err[j] = static_cast<double>(cps[j]) * kUlp65;
            }
        }
    } else {
        for (size_t j = 0; j < J; ++j) f1[j] = Rational(static_cast<long>(cps[j]));
    }

    if (!gamma_family) {
        out.exact_values = ex;
        for (size_t j = 0; j < J; ++j) {
            Rational lhs(0L);
            double err = 0;
            if (eq.family <= 2) {
                lhs = f1[j] / Rational(2L);
                err = f1err[j] / 2;
            }
            for (size_t i = 0; i < coefs.size(); ++i) {
                lhs += coefs[i].second * P.val[i][j];
                err += std::fabs(coefs[i].second.to_double()) * P.err[i][j];
            }
            if (ex) out.lhs_exact.push_back(lhs);
            out.lhs.push_back(Real(lhs, w));
            out.lhs_error.push_back(err);
        }
        return out;
    }

    /* gamma families: L*(P0 - F1) - (1/2) * von Mangoldt part */
    std::vector<uint64_t> primes = sieve.primes(x);
    Real L = log_sqrt_2pi(w);

    if (eq.family == 5) {
        if (ex) {
            for (size_t j = 0; j < J; ++j) {
                LogLinear ll;
                ll.c0 = P.val[0][j] - f1[j];
                for (uint64_t p : primes) {
                    if (p > cps[j]) break;
                    std::map<uint64_t, mpq_class> memo;
                    mpq_class cp(0);
                    for (uint64_t pa = p; pa <= cps[j]; pa *= p) {
                        mpq_class tp = tp_exact(p, cps[j] / pa, hprefq, h, memo);
                        cp += tp / mpq_class(static_cast<unsigned long>(pa));
                        if (pa > cps[j] / p) break;
                    }
                    if (cp != 0) {
                        mpq_class v = cp / mpq_class(2);
                        ll.logs[p] = Rational(mpq_class(-v));
                    }
                }
                out.lhs.push_back(ll.eval(w));
                out.lhs_error.push_back(0.0);
            }
        } else {
            std::vector<Real> logp;
            logp.reserve(primes.size());
            for (uint64_t p : primes) logp.push_back(Real::log_ui(p, w));
            for (size_t j = 0; j < J; ++j) {
                Real lam(0, w);
                double lam_err = 0;
                for (size_t pi = 0; pi < primes.size() && primes[pi] <= cps[j]; ++pi) {
                    uint64_t p = primes[pi];
                    std::map<uint64_t, TpFixed> memo;
                    __int128 cp = 0;
                    double cerr = 0;
                    for (uint64_t pa = p; pa <= cps[j]; pa *= p) {
                        TpFixed tp = tp_fixed(p, cps[j] / pa, hpref, h, memo);
                        cp += fixed_div_u64(tp.v, pa);
                        cerr += tp.err / static_cast<double>(pa) + kUlp64;
                        if (pa > cps[j] / p) break;
                    }
                    if (cp != 0) lam += logp[pi] * Real(fixed_to_rational(cp), w);
                    lam_err += std::log(static_cast<double>(p)) * cerr;
                }
                Real base = Real(P.val[0][j] - f1[j], w);
                out.lhs.push_back(L * base - lam / Real(2, w));
                double lerr = std::fabs(L.to_double());
                out.lhs_error.push_back(lerr * (P.err[0][j] + f1err[j]) + lam_err / 2);
            }
        }
        return out;
    }

    /* family 6: exact per-prime coefficients in both modes */
    for (size_t j = 0; j < J; ++j) {
        uint64_t xj = cps[j];
        std::vector<std::pair<uint64_t, Rational>> cq;
        for (uint64_t p : primes) {
            if (p > xj) break;
            Rational c(0L);
            uint32_t a = 1;
            for (uint64_t pa = p; pa <= xj; pa *= p, ++a) {
                uint64_t y = xj / pa;
                Rational fpa = eq.f.eval_q(Factorization{pa, {{p, a}}});
                c += Rational(static_cast<long>(y - y / p)) / fpa;
                if (pa > xj / p) break;
            }
            if (!c.is_zero()) cq.emplace_back(p, c);
        }
        if (ex) {
            LogLinear ll;
            ll.c0 = P.val[0][j] - Rational(static_cast<long>(xj));
            for (auto& pc : cq) ll.logs[pc.first] = -pc.second / Rational(2L);
            out.lhs.push_back(ll.eval(w));
            out.lhs_error.push_back(0.0);
        } else {
            Real lam(0, w);
            for (auto& pc : cq) lam += Real::log_ui(pc.first, w) * Real(pc.second, w);
            Real base = Real(P.val[0][j] - Rational(static_cast<long>(xj)), w);
            out.lhs.push_back(L * base - lam / Real(2, w));
            out.lhs_error.push_back(std::fabs(L.to_double()) * P.err[0][j]);
        }
    }
    return out;
}

}  // namespace

const std::vector<std::string>& equation_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> v;
        for (const auto& d : kEqDefs) v.emplace_back(d.id);
        return v;
    }();
    return ids;
}

TheoremEq make_equation(const std::string& id, const ArithmeticalFunction& f, uint32_t r,
                        uint32_t m) {
    const EqDef* def = nullptr;
    for (const auto& d : kEqDefs)
        if (id == d.id) {
            def = &d;
            break;
        }
    if (!def) throw std::domain_error("unknown equation id '" + id + "'");
    TheoremEq eq;
    eq.id = id;
    eq.family = def->family;
    eq.f_is_free = def->f_free;
    eq.has_main = def->has_main;
    eq.error_shape = def->shape;
    eq.f = def->f_free ? f : ArithmeticalFunction::parse(fn_kind_name(def->f));
    if (family_needs_r(eq.family)) {
        if (r < 1 || r > 8) throw std::domain_error("power exponent r must be in 1..8");
        eq.r = r;
    }
    if (family_needs_m(eq.family)) {
        if (m < 1 || m > 4) throw std::domain_error("Bernoulli index m must be in 1..4");
        eq.m = m;
    }
    if (family_divides_by_f(eq.family) && !eq.f.nonvanishing())
        throw std::domain_error("equation '" + id + "' divides by f(n); weight '" +
                                eq.f.name() + "' vanishes on some n");
    return eq;
}

SumMode parse_sum_mode(const std::string& s) {
    if (s == "convolution" || s == "conv") return SumMode::convolution;
    if (s == "brute") return SumMode::brute;
    throw std::domain_error("unknown mode '" + s + "' (expected convolution or brute)");
}

AccumMode parse_accum_mode(const std::string& s) {
    if (s == "exact") return AccumMode::exact;
    if (s == "fixed128" || s == "fixed") return AccumMode::fixed128;
    throw std::domain_error("unknown accumulation '" + s + "' (expected exact or fixed128)");
}

SumSeries lhs_series(const TheoremEq& eq, const std::vector<uint64_t>& checkpoints,
                     SumMode mode, AccumMode accum, const SpfSieve& sieve, mpfr_prec_t prec,
                     int threads, GammaCache* gamma_cache) {
    validate_checkpoints(checkpoints, sieve);
    auto t0 = std::chrono::steady_clock::now();
    SumSeries out = mode == SumMode::brute
                        ? brute_series(eq, checkpoints, sieve, prec, threads, gamma_cache)
                        : conv_series(eq, checkpoints, accum, sieve, prec, threads);
    out.elapsed_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

std::vector<Rational> lhs_series_mobius(const TheoremEq& eq,
                                        const std::vector<uint64_t>& checkpoints,
                                        const SpfSieve& sieve) {
    validate_checkpoints(checkpoints, sieve);
    if (eq.family > 4)
        throw std::domain_error("Mobius cross-check covers the rational families only");
    uint64_t x = checkpoints.back();
    size_t J = checkpoints.size();
    bool h_is_f = eq.family % 2 == 1;

    ValueTable h = build_table(h_is_f ? WeightKind::f_over_l : WeightKind::one, 0, eq.f, x,
                               sieve, true, 1);
    std::vector<std::pair<uint32_t, Rational>> coefs;
    if (eq.family <= 2)
        coefs = power_coefs(eq.r);
    else {
        BernoulliTable bern(2 * eq.m);
        coefs.emplace_back(eq.m, bern[2 * eq.m]);
    }
    WeightKind gk = h_is_f ? WeightKind::phi_m_over_d : WeightKind::phi_m_over_f;

    std::vector<std::vector<mpq_class>> pair(coefs.size(), std::vector<mpq_class>(J));
    for (size_t i = 0; i < coefs.size(); ++i) {
        ValueTable g = build_table(gk, coefs[i].first, eq.f, x, sieve, true, 1);
        for (uint64_t c = 1; c * c <= x; ++c) {
            int mu = mobius(factorize(c, sieve));
            if (mu == 0) continue;
            uint64_t cc = c * c;
            for (uint64_t d = 1; d * cc <= x; ++d) {
                mpq_class gv = g.q[c * d];
                if (gv == 0) continue;
                uint64_t ymax = x / (cc * d);
                size_t j = static_cast<size_t>(
                    std::lower_bound(checkpoints.begin(), checkpoints.end(), cc * d) -
                    checkpoints.begin());
                uint64_t lo = 1;
                for (; j < J && lo <= ymax; ++j) {
                    uint64_t hi = checkpoints[j] / (cc * d);
                    if (hi < lo) continue;
                    mpq_class hs(0);
                    for (uint64_t l = lo; l <= hi; ++l)
                        hs += h.is_one ? mpq_class(1) : h.q[c * l];
                    pair[i][j] += (mu > 0 ? gv : mpq_class(-gv)) * hs;
                    lo = hi + 1;
                }
            }
        }
        mpq_class run(0);
        for (size_t j = 0; j < J; ++j) {
            run += pair[i][j];
            pair[i][j] = run;
        }
    }

    std::vector<Rational> out;
    for (size_t j = 0; j < J; ++j) {
        Rational lhs(0L);
        if (eq.family <= 2) {
            Rational f1 = h_is_f ? [&] {
                mpq_class run(0);
                for (uint64_t l = 1; l <= checkpoints[j]; ++l) run += h.q[l];
                return Rational(run);
            }()
                                 : Rational(static_cast<long>(checkpoints[j]));
            lhs = f1 / Rational(2L);
        }
        for (size_t i = 0; i < coefs.size(); ++i)
            lhs += coefs[i].second * Rational(pair[i][j]);
        out.push_back(lhs);
    }
    return out;
}

MainTerm main_term(const TheoremEq& eq, uint64_t x, const ConstantStore& store,
                   mpfr_prec_t prec) {
    MainTerm out;
    if (!eq.has_main) return out;
    mpfr_prec_t w = prec + 32;
    Real X(Rational(mpz_class(static_cast<unsigned long>(x))), w);
    Real LX = log(X);
    double xd = static_cast<double>(x), lx = std::log(xd);
    BernoulliTable bern(10);

    auto V = [&](const std::string& n) { return store.get(n).value; };
    auto E = [&](const std::string& n) { return store.get(n).error_bound; };

    const std::string& id = eq.id;
    if (id == "eqcor11") {
        double rp1 = eq.r + 1.0;
        Real z2 = V("zeta2"), K1 = V("K1"), K2 = V("K2");
        Real rr(static_cast<long>(eq.r) + 1, w);
        Real lin = Real(Rational(1L, 2UL), w) - K1 / (Real(2, w) * rr * z2) + K2 / (rr * z2);
        for (uint32_t mm = 1; 2 * mm <= eq.r; ++mm) {
            Rational c = binomial(eq.r + 1, 2 * mm) * bern[2 * mm];
            lin += Real(c, w) * V("C" + std::to_string(mm)) / rr;
        }
        out.value = K1 / (rr * z2) * X * LX + lin * X;
        double err = xd * (lx + 1) / rp1 * (E("K1") + E("K2"));
        for (uint32_t mm = 1; 2 * mm <= eq.r; ++mm)
            err += xd * std::fabs((binomial(eq.r + 1, 2 * mm) * bern[2 * mm]).to_double()) *
                   E("C" + std::to_string(mm)) / rp1;
        out.error_bound = 2 * err + xd * (lx + 1) * E("zeta2");
    } else if (id == "eqcor12") {
        Real rr(static_cast<long>(eq.r) + 1, w);
        out.value = V("K1") * X / (rr * V("zeta2"));
        out.error_bound = 2 * xd * (E("K1") + E("zeta2")) / (eq.r + 1.0);
    } else if (id == "eqcor13") {
        Real rr(static_cast<long>(eq.r) + 1, w);
        out.value = V("P_tau") * X / (rr * V("zeta2"));
        out.error_bound = 2 * xd * (E("P_tau") + E("zeta2")) / (eq.r + 1.0);
    } else if (id == "eqcor14") {
        Real rr(static_cast<long>(eq.r) + 1, w);
        Real lin = Real(Rational(1L, 2UL), w) + V("D0") / rr;
        for (uint32_t mm = 1; 2 * mm <= eq.r; ++mm) {
            Rational c = binomial(eq.r + 1, 2 * mm) * bern[2 * mm];
            lin += Real(c, w) * V("D" + std::to_string(mm)) / rr;
        }
        out.value = lin * X;
        double err = xd * E("D0") / (eq.r + 1.0);
        for (uint32_t mm = 1; 2 * mm <= eq.r; ++mm)
            err += xd * std::fabs((binomial(eq.r + 1, 2 * mm) * bern[2 * mm]).to_double()) *
                   E("D" + std::to_string(mm)) / (eq.r + 1.0);
        out.error_bound = 2 * err;
    } else if (id == "eqthm21") {
        out.value = Real(bern[2 * eq.m], w) * V("C" + std::to_string(eq.m)) * X;
        out.error_bound = 2 * xd * std::fabs(bern[2 * eq.m].to_double()) *
                          E("C" + std::to_string(eq.m));
    } else if (id == "eqthm22") {
        out.value = Real(bern[2 * eq.m], w) * V("E" + std::to_string(eq.m)) * X / V("zeta2");
        out.error_bound = 2 * xd * std::fabs(bern[2 * eq.m].to_double()) *
                          (E("E" + std::to_string(eq.m)) + E("zeta2"));
    } else if (id == "eqthm25") {
        out.value = Real(bern[2 * eq.m], w) * V("zeta" + std::to_string(2 * eq.m + 1)) * X /
                    V("zeta2");
        out.error_bound = 2 * xd * std::fabs(bern[2 * eq.m].to_double()) *
                          (E("zeta" + std::to_string(2 * eq.m + 1)) + E("zeta2"));
    } else if (id == "eqthm26") {
        out.value = Real(bern[2 * eq.m], w) * V("D" + std::to_string(eq.m)) * X;
        out.error_bound = 2 * xd * std::fabs(bern[2 * eq.m].to_double()) *
                          E("D" + std::to_string(eq.m));
    } else if (id == "eqthm61") {
        out.value = V("log_sqrt_2pi") / V("zeta2") * V("K1") * X * LX;
        out.error_bound = 2 * xd * lx * (E("K1") + E("zeta2") + E("log_sqrt_2pi"));
    } else if (id == "eqthm62") {
        out.value = V("log_sqrt_2pi") / V("zeta2") * V("P_tau") * X;
        out.error_bound = 2 * xd * (E("P_tau") + E("zeta2") + E("log_sqrt_2pi"));
    } else if (id == "eqthm63") {
        out.value = V("log_sqrt_2pi") / V("zeta2") * V("K1") * X;
        out.error_bound = 2 * xd * (E("K1") + E("zeta2") + E("log_sqrt_2pi"));
    } else if (id == "eqthm64") {
        Real L = V("log_sqrt_2pi"), z2 = V("zeta2");
        Real lin = Real(2, w) * V("euler_gamma") - Real(1, w) + V("zeta_prime2") / z2 - z2 +
                   V("zeta_prime2") / (Real(2, w) * L);
        out.value = L / z2 * X * (LX + lin);
        out.error_bound = 2 * xd * (lx + 4) * (E("euler_gamma") + E("zeta_prime2") +
                                               E("zeta2") + E("log_sqrt_2pi"));
    } else if (id == "eqthm65") {
        Real L = V("log_sqrt_2pi");
        out.value = L * (V("D0") - V("K") / (Real(2, w) * L) - Real(1, w)) * X;
        out.error_bound = 2 * xd * (E("D0") + E("K") + E("log_sqrt_2pi"));
    } else {
        return out;
    }
    out.defined = true;
    return out;
}

namespace {

double shape_value(const std::string& shape, double x) {
    double lx = std::log(x);
    if (shape == "log2") return lx * lx;
    if (shape == "log3") return lx * lx * lx;
    if (shape == "log4") return lx * lx * lx * lx;
    if (shape == "log5") return lx * lx * lx * lx * lx;
    if (shape == "log3_over_x") return lx * lx * lx / x;
    if (shape == "x") return x;
    if (shape == "sqrt_x") return std::sqrt(x);
    return 1.0;
}

}  // namespace

ResidualReport residual_report(const SumSeries& series, const ConstantStore& store,
                               mpfr_prec_t prec) {
    ResidualReport rep;
    rep.eq = series.eq;
    rep.has_main = series.eq.has_main;
    rep.shape = series.eq.error_shape;
    mpfr_prec_t w = prec + 32;

    std::vector<double> fit_x, fit_y;
    bool dec = rep.has_main && series.checkpoints.size() >= 2;
    double prev_ratio = 0;
    for (size_t j = 0; j < series.checkpoints.size(); ++j) {
        ResidualRow row;
        row.x = series.checkpoints[j];
        row.lhs = series.lhs[j];
        row.lhs_error = series.lhs_error[j];
        if (rep.has_main) {
            MainTerm mt = main_term(series.eq, row.x, store, prec);
            row.main = mt.value;
            row.main_error = mt.error_bound;
            row.residual = row.lhs - row.main;
            double mv = std::fabs(row.main.to_double());
            row.ratio = mv > 0 ? std::fabs(row.residual.to_double()) / mv : 0.0;
            if (j > 0 && row.ratio >= prev_ratio) dec = false;
            prev_ratio = row.ratio;
        } else {
            row.main = Real(0, w);
            row.residual = row.lhs;
        }
        double mag = std::fabs(row.residual.to_double());
        if (mag > 0) {
            fit_x.push_back(std::log(static_cast<double>(row.x)));
            fit_y.push_back(std::log(mag));
        }
        double sv = shape_value(rep.shape, static_cast<double>(row.x));
        if (rep.shape != "none" && sv > 0) rep.fitted_c = std::max(rep.fitted_c, mag / sv);
        rep.rows.push_back(row);
    }
    rep.ratios_decreasing = dec;

    if (fit_x.size() >= 2 && fit_x.front() != fit_x.back()) {
        double n = static_cast<double>(fit_x.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t i = 0; i < fit_x.size(); ++i) {
            sx += fit_x[i];
            sy += fit_y[i];
            sxx += fit_x[i] * fit_x[i];
            sxy += fit_x[i] * fit_y[i];
        }
        double var = sxx - sx * sx / n;
        if (var > 0) {
            rep.fitted_exponent = (sxy - sx * sy / n) / var;
            rep.has_fit = true;
        }
    }
    return rep;
}

K2Fit k2_fit_from_sums(const std::vector<std::pair<uint64_t, Real>>& sums, const Real& zeta2,
                       const Real& k1, mpfr_prec_t prec) {
    K2Fit fit;
    fit.k1_used = k1.to_double();
    mpfr_prec_t w = prec + 32;
    for (const auto& s : sums) {
        Real X(Rational(mpz_class(static_cast<unsigned long>(s.first))), w);
        Real est = Real(2, w) * zeta2 * s.second / (X * X) - k1 * log(X);
        fit.points.emplace_back(s.first, est.to_double());
    }
    double n = static_cast<double>(fit.points.size());
    double mean = 0;
    for (const auto& p : fit.points) mean += p.second;
    mean /= n;
    fit.estimate = mean;
    if (fit.points.size() >= 2) {
        double ss = 0;
        for (const auto& p : fit.points) ss += (p.second - mean) * (p.second - mean);
        fit.std_error = std::sqrt(ss / (n - 1)) / std::sqrt(n);
    }
    return fit;
}

K2Fit k2_fit(const std::vector<uint64_t>& xs, const SpfSieve& sieve,
             const ConstantStore& store, mpfr_prec_t prec) {
    if (xs.empty()) throw std::domain_error("k2 fit needs at least one point");
    for (size_t i = 1; i < xs.size(); ++i)
        if (xs[i] <= xs[i - 1]) throw std::domain_error("k2 fit points must be increasing");
    uint64_t x = xs.back();
    if (x > sieve.limit()) throw std::domain_error("k2 fit point exceeds sieve limit");

    /* S(x) = sum_{n<=x} ptilde(n) via one multiplicative pass */
    std::vector<int64_t> pt(x + 1, 0);
    if (x >= 1) pt[1] = 1;
    for (uint64_t n = 2; n <= x; ++n) {
        uint64_t p = sieve.spf(n), q = p, n1 = n / p;
        while (n1 % p == 0) {
            n1 /= p;
            q *= p;
        }
        pt[n] = pt[n1] * static_cast<int64_t>(2 * q - q / p);
    }
    mpfr_prec_t w = prec + 32;
    std::vector<std::pair<uint64_t, Real>> sums;
    unsigned __int128 run = 0;
    size_t j = 0;
    for (uint64_t n = 1; n <= x && j < xs.size(); ++n) {
        run += static_cast<uint64_t>(pt[n]);
        if (n == xs[j]) {
            sums.emplace_back(n, Real(Rational(i128_to_mpz(static_cast<__int128>(run))), w));
            ++j;
        }
    }
    return k2_fit_from_sums(sums, store.get("zeta2").value, store.get("K1").value, prec);
}

}  // namespace regsum
