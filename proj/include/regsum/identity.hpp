#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "regsum/arith.hpp"
#include "regsum/bernoulli.hpp"
#include "regsum/rational.hpp"
#include "regsum/real.hpp"
#include "regsum/sieve.hpp"

namespace regsum {

enum class IdentityKind { power_sum, bernoulli_sum, gamma_sum, coprime_count };

IdentityKind parse_identity(const std::string& name);
const char* identity_name(IdentityKind k);

/* --- finite identities over regular residues, exact per n --- */

/* (1/n^r) * sum_{k regular mod n} f(gcd(k,n)) k^r */
Rational power_sum_lhs(const ArithmeticalFunction& f, uint64_t n, uint32_t r,
                       const SpfSieve& sieve);

/* f(n)/2 + 1/(r+1) * sum_{2m<=r} C(r+1,2m) B_2m sum_{d||n} f(n/d) phi_{1-2m}(d) */
Rational power_sum_rhs(const ArithmeticalFunction& f, uint64_t n, uint32_t r,
                       const SpfSieve& sieve);

/* sum_{k regular mod n} f(gcd(k,n)) B_2m(k/n) */
Rational bernoulli_sum_lhs(const ArithmeticalFunction& f, uint64_t n, uint32_t m,
                           const SpfSieve& sieve);

/* B_2m * sum_{d||n} f(n/d) phi_{1-2m}(d) */
Rational bernoulli_sum_rhs(const ArithmeticalFunction& f, uint64_t n, uint32_t m,
                           const SpfSieve& sieve);

/* W(t) = sum_{1<=j<=t, gcd(j,t)=1} log Gamma(j/t), computed once per t. */
class GammaCache {
public:
    explicit GammaCache(mpfr_prec_t prec) : prec_(prec) {}

    mpfr_prec_t precision() const { return prec_; }

    /* Fill W(1..t_max) in parallel; required before w() beyond current size. */
    void build_upto(uint64_t t_max, int threads);
    const Real& w(uint64_t t) const;

private:
    mpfr_prec_t prec_;
    std::vector<Real> w_;
};

/* sum_{k regular mod n} f(gcd(k,n)) log Gamma(k/n) */
Real gamma_sum_lhs(const ArithmeticalFunction& f, uint64_t n, const SpfSieve& sieve,
                   GammaCache& cache);

/* log sqrt(2 pi) (sum_{d||n} f(n/d) phi(d) - f(n)) - 1/2 sum_{d||n} f(n/d) Lambda(d) */
LogLinear gamma_sum_rhs(const ArithmeticalFunction& f, uint64_t n, const SpfSieve& sieve);

/* --- sawtooth-corrected coprime counting --- */

struct CoprimeCheck {
    mpz_class lhs;   // #{ n <= x : gcd(n, t) = 1 }
    Rational rhs;    // (phi(t)/t) x - sum_{d|t} mu(d) theta(x/d)
    bool match;
};

// requires t >= 2: the mu-sum over d | t only cancels the sawtooth half for t > 1
CoprimeCheck coprime_count_check(uint64_t t, const Rational& x, const SpfSieve& sieve);

/* --- bulk verification --- */

struct VerifyOptions {
    IdentityKind kind = IdentityKind::power_sum;
    ArithmeticalFunction f;
    uint64_t n_lo = 1;
    uint64_t n_hi = 1000;
    uint32_t r = 2;           // power_sum exponent
    uint32_t m = 1;           // bernoulli_sum half-degree
    mpfr_prec_t prec = 192;   // gamma_sum working precision
    double gamma_tol = 1e-30; // gamma_sum pass threshold on |lhs - rhs|
    int threads = 1;
};

struct Mismatch {
    uint64_t n;
    std::string lhs, rhs;
};

struct VerifyReport {
    IdentityKind kind;
    std::string f_name;
    uint64_t n_lo = 0, n_hi = 0;
    uint32_t param = 0;
    uint64_t checked = 0;
    std::vector<Mismatch> mismatches;
    double max_abs_residual = 0.0;  // gamma_sum only
    bool ok = false;
    double elapsed_sec = 0.0;
};

VerifyReport verify(const VerifyOptions& opts, const SpfSieve& sieve);

}  // namespace regsum
