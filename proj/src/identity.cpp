#include "regsum/identity.hpp"

#include "regsum/log_gamma.hpp"
#include "detail/parallel.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numeric>

namespace regsum {

IdentityKind parse_identity(const std::string& name) {
    if (name == "power") return IdentityKind::power_sum;
    if (name == "bernoulli") return IdentityKind::bernoulli_sum;
    if (name == "gamma") return IdentityKind::gamma_sum;
    if (name == "coprime") return IdentityKind::coprime_count;
    throw std::domain_error("unknown identity '" + name +
                            "' (expected power bernoulli gamma coprime)");
}

const char* identity_name(IdentityKind k) {
    switch (k) {
        case IdentityKind::power_sum: return "power";
        case IdentityKind::bernoulli_sum: return "bernoulli";
        case IdentityKind::gamma_sum: return "gamma";
        case IdentityKind::coprime_count: return "coprime";
    }
    return "?";
}

namespace {

mpz_class u128_to_mpz(unsigned __int128 v) {
    mpz_class hi(static_cast<unsigned long>(v >> 64));
    mpz_class lo(static_cast<unsigned long>(v & ~uint64_t(0)));
    return (hi << 64) + lo;
}

const BernoulliTable& bern_upto(uint32_t m) {
    thread_local std::unique_ptr<BernoulliTable> table;
    if (!table || table->max_index() < m)
        table = std::make_unique<BernoulliTable>(std::max<uint32_t>(m, 16));
    return *table;
}

/* Per-class power sums over regular residues: mom[i][s] = sum k^s over
 * k in [1,n] with gcd(k,n) = gs[i], for each unitary divisor gs[i]. */
struct RegularMoments {
    std::vector<uint64_t> gs;
    std::vector<std::array<unsigned __int128, 10>> mom;

    RegularMoments(uint64_t n, uint32_t smax, const Factorization& fact) {
        if (smax > 9) throw std::domain_error("moment order too large");
        if ((smax + 1) * std::log2(static_cast<double>(n)) > 125.0)
            throw std::domain_error("power sums overflow 128 bits for this n");
        gs = unitary_divisors(fact);
        mom.assign(gs.size(), {});
        for (uint64_t k = 1; k <= n; ++k) {
            uint64_t g = std::gcd(k, n);
            if (std::gcd(g, n / g) != 1) continue;
            size_t i = std::lower_bound(gs.begin(), gs.end(), g) - gs.begin();
            unsigned __int128 pw = 1;
            for (uint32_t s = 0; s <= smax; ++s) {
                mom[i][s] += pw;
                pw *= k;
            }
        }
    }
};

std::vector<std::pair<uint64_t, Rational>> unitary_f_values(const ArithmeticalFunction& f,
                                                            const Factorization& fact,
                                                            const SpfSieve& sieve) {
    /* pairs (d, f(n/d)) over unitary divisors d of n */
    std::vector<std::pair<uint64_t, Rational>> out;
    for (uint64_t d : unitary_divisors(fact))
        out.emplace_back(d, f.eval_q(factorize(fact.n / d, sieve)));
    return out;
}

void require_n(uint64_t n, const SpfSieve& sieve) {
    if (n < 1) throw std::domain_error("n must be >= 1");
    if (n > sieve.limit()) throw std::domain_error("n exceeds sieve limit");
}

using detail::parallel_blocks;

}  // namespace

/* --- power sums --- */

Rational power_sum_lhs(const ArithmeticalFunction& f, uint64_t n, uint32_t r,
                       const SpfSieve& sieve) {
    require_n(n, sieve);
    if (r < 1) throw std::domain_error("power_sum: r must be >= 1");
    Factorization fact = factorize(n, sieve);
    RegularMoments mm(n, r, fact);
    Rational num(0);
    for (size_t i = 0; i < mm.gs.size(); ++i)
        num += f.eval_q(factorize(mm.gs[i], sieve)) * Rational(u128_to_mpz(mm.mom[i][r]));
    return num / Rational(pow_z(mpz_class(static_cast<unsigned long>(n)), r));
}

Rational power_sum_rhs(const ArithmeticalFunction& f, uint64_t n, uint32_t r,
                       const SpfSieve& sieve) {
    require_n(n, sieve);
    if (r < 1) throw std::domain_error("power_sum: r must be >= 1");
    Factorization fact = factorize(n, sieve);
    const BernoulliTable& B = bern_upto(r + 1);
    auto fv = unitary_f_values(f, fact, sieve);

    Rational acc(0);
    for (uint32_t m = 0; 2 * m <= r; ++m) {
        Rational inner(0);
        for (const auto& [d, fnd] : fv)
            inner += fnd * jordan_phi(1 - 2 * static_cast<int>(m), factorize(d, sieve));
        acc += binomial(r + 1, 2 * m) * B[2 * m] * inner;
    }
    return f.eval_q(fact) / Rational(2) + acc / Rational(static_cast<long>(r) + 1);
}

/* --- Bernoulli-polynomial sums --- */

Rational bernoulli_sum_lhs(const ArithmeticalFunction& f, uint64_t n, uint32_t m,
                           const SpfSieve& sieve) {
    require_n(n, sieve);
    if (m < 1) throw std::domain_error("bernoulli_sum: m must be >= 1");
    Factorization fact = factorize(n, sieve);
    RegularMoments mm(n, 2 * m, fact);
    const BernoulliTable& B = bern_upto(2 * m);

    mpz_class nz(static_cast<unsigned long>(n));
    Rational total(0);
    for (size_t i = 0; i < mm.gs.size(); ++i) {
        Rational cls(0);
        for (uint32_t j = 0; j <= 2 * m; ++j)
            cls += binomial(2 * m, j) * B[j] *
                   Rational(mpz_class(pow_z(nz, j) * u128_to_mpz(mm.mom[i][2 * m - j])));
        total += f.eval_q(factorize(mm.gs[i], sieve)) * cls;
    }
    return total / Rational(pow_z(nz, 2 * m));
}

Rational bernoulli_sum_rhs(const ArithmeticalFunction& f, uint64_t n, uint32_t m,
                           const SpfSieve& sieve) {
    require_n(n, sieve);
    if (m < 1) throw std::domain_error("bernoulli_sum: m must be >= 1");
    Factorization fact = factorize(n, sieve);
    Rational inner(0);
    for (const auto& [d, fnd] : unitary_f_values(f, fact, sieve))
        inner += fnd * jordan_phi(1 - 2 * static_cast<int>(m), factorize(d, sieve));
    return bern_upto(2 * m)[2 * m] * inner;
}

/* --- Gamma sums --- */

void GammaCache::build_upto(uint64_t t_max, int threads) {
    if (t_max + 1 <= w_.size()) return;
    size_t old = w_.size();
    w_.resize(t_max + 1, Real(prec_));
    mpfr_prec_t acc_prec = prec_ + 32;
    parallel_blocks(std::max<uint64_t>(1, old), t_max, threads, 16,
                    [&](uint64_t, uint64_t lo, uint64_t hi) {
                        for (uint64_t t = lo; t <= hi; ++t) {
                            Real acc(acc_prec);
                            for (uint64_t j = 1; j <= t; ++j) {
                                if (std::gcd(j, t) != 1) continue;
                                acc += log_gamma(Rational(static_cast<long>(j),
                                                          static_cast<unsigned long>(t)),
                                                 prec_);
                            }
                            Real out(prec_);
                            mpfr_set(out.raw(), acc.raw(), MPFR_RNDN);
                            w_[t] = out;
                        }
                    });
}

const Real& GammaCache::w(uint64_t t) const {
    if (t >= w_.size()) throw std::domain_error("gamma cache: t beyond built range");
    return w_[t];
}

Real gamma_sum_lhs(const ArithmeticalFunction& f, uint64_t n, const SpfSieve& sieve,
                   GammaCache& cache) {
    require_n(n, sieve);
    cache.build_upto(n, 1);
    Factorization fact = factorize(n, sieve);
    Real acc(cache.precision());
    for (uint64_t t : unitary_divisors(fact))
        acc += Real(f.eval_q(factorize(fact.n / t, sieve)), cache.precision()) * cache.w(t);
    return acc;
}

LogLinear gamma_sum_rhs(const ArithmeticalFunction& f, uint64_t n, const SpfSieve& sieve) {
    require_n(n, sieve);
    Factorization fact = factorize(n, sieve);
    LogLinear out;
    Rational half(1, 2);
    for (const auto& [d, fnd] : unitary_f_values(f, fact, sieve)) {
        out.c0 += fnd * jordan_phi(1, factorize(d, sieve));
        out.add_scaled(von_mangoldt(factorize(d, sieve)), -half * fnd);
    }
    out.c0 -= f.eval_q(fact);
    return out;
}

/* --- coprime counting with sawtooth correction --- */

CoprimeCheck coprime_count_check(uint64_t t, const Rational& x, const SpfSieve& sieve) {
    require_n(t, sieve);
    /* at t = 1 the mu-sum over d | t no longer cancels the half from theta,
     * so the identity only holds for t > 1 */
    if (t < 2) throw std::domain_error("coprime_count: t must be > 1");
    if (x.sign() < 0) throw std::domain_error("coprime_count: x must be >= 0");
    mpz_class xf = x.floor();
    if (xf > 100000000) throw std::domain_error("coprime_count: x too large for brute count");
    uint64_t X = xf.get_ui();

    CoprimeCheck chk;
    chk.lhs = 0;
    for (uint64_t k = 1; k <= X; ++k)
        if (std::gcd(k, t) == 1) ++chk.lhs;

    Factorization fact = factorize(t, sieve);
    /* squarefree divisors carry the whole mu-sum */
    std::vector<std::pair<uint64_t, int>> sq{{1, 1}};
    for (const auto& e : fact.pk) {
        size_t sz = sq.size();
        for (size_t i = 0; i < sz; ++i) sq.push_back({sq[i].first * e.p, -sq[i].second});
    }
    Rational corr(0);
    for (const auto& [d, mu] : sq)
        corr += Rational(mu) * theta(x / Rational(static_cast<long>(d)));
    chk.rhs = Rational(static_cast<long>(euler_phi(fact)), static_cast<unsigned long>(t)) * x - corr;
    chk.match = Rational(chk.lhs) == chk.rhs;
    return chk;
}

/* --- bulk verification --- */

namespace {

struct ChunkResult {
    std::vector<Mismatch> mismatches;
    double max_abs_residual = 0.0;
    uint64_t checked = 0;
};

}  // namespace

VerifyReport verify(const VerifyOptions& opts, const SpfSieve& sieve) {
    auto t0 = std::chrono::steady_clock::now();
    uint64_t n_lo = opts.n_lo;
    /* the coprime-count identity starts at t = 2 */
    if (opts.kind == IdentityKind::coprime_count && n_lo < 2) n_lo = 2;
    if (n_lo < 1 || opts.n_hi < n_lo)
        throw std::domain_error("verify: bad n range");
    if (opts.n_hi > sieve.limit()) throw std::domain_error("verify: n range exceeds sieve limit");

    VerifyReport rep;
    rep.kind = opts.kind;
    rep.f_name = opts.f.name();
    rep.n_lo = n_lo;
    rep.n_hi = opts.n_hi;
    rep.param = opts.kind == IdentityKind::power_sum      ? opts.r
                : opts.kind == IdentityKind::bernoulli_sum ? opts.m
                                                           : 0;

    const uint64_t block = 32;
    uint64_t nblocks = (opts.n_hi - n_lo) / block + 1;
    std::vector<ChunkResult> chunks(nblocks);

    GammaCache cache(opts.prec);
    if (opts.kind == IdentityKind::gamma_sum) cache.build_upto(opts.n_hi, opts.threads);
    Real tol(opts.gamma_tol, opts.prec);

    parallel_blocks(n_lo, opts.n_hi, opts.threads, block,
                    [&](uint64_t b, uint64_t lo, uint64_t hi) {
                        ChunkResult& cr = chunks[b];
                        for (uint64_t n = lo; n <= hi; ++n) {
                            ++cr.checked;
                            switch (opts.kind) {
                                case IdentityKind::power_sum: {
                                    Rational l = power_sum_lhs(opts.f, n, opts.r, sieve);
                                    Rational r = power_sum_rhs(opts.f, n, opts.r, sieve);
                                    if (l != r)
                                        cr.mismatches.push_back({n, l.to_string(), r.to_string()});
                                    break;
                                }
                                case IdentityKind::bernoulli_sum: {
                                    Rational l = bernoulli_sum_lhs(opts.f, n, opts.m, sieve);
                                    Rational r = bernoulli_sum_rhs(opts.f, n, opts.m, sieve);
                                    if (l != r)
                                        cr.mismatches.push_back({n, l.to_string(), r.to_string()});
                                    break;
                                }
                                case IdentityKind::gamma_sum: {
                                    Real l = gamma_sum_lhs(opts.f, n, sieve, cache);
                                    Real r = gamma_sum_rhs(opts.f, n, sieve).eval(opts.prec);
                                    Real d = abs(l - r);
                                    cr.max_abs_residual =
                                        std::max(cr.max_abs_residual, d.to_double());
                                    if (!(d < tol))
                                        cr.mismatches.push_back(
                                            {n, l.to_string(40), r.to_string(40)});
                                    break;
                                }
                                case IdentityKind::coprime_count: {
                                    long tn = static_cast<long>(n);
                                    for (const Rational& x :
                                         {Rational(tn) + Rational(1, 2),
                                          Rational(3 * tn) + Rational(1, 3),
                                          Rational(10 * tn)}) {
                                        CoprimeCheck chk = coprime_count_check(n, x, sieve);
                                        if (!chk.match)
                                            cr.mismatches.push_back({n, chk.lhs.get_str(),
                                                                     chk.rhs.to_string()});
                                    }
                                    break;
                                }
                            }
                        }
                    });

    for (const auto& cr : chunks) {
        rep.checked += cr.checked;
        rep.max_abs_residual = std::max(rep.max_abs_residual, cr.max_abs_residual);
        for (const auto& mm : cr.mismatches) rep.mismatches.push_back(mm);
    }
    rep.ok = rep.mismatches.empty();
    rep.elapsed_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace regsum
