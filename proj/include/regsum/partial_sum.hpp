#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regsum/arith.hpp"
#include "regsum/euler.hpp"
#include "regsum/identity.hpp"
#include "regsum/rational.hpp"
#include "regsum/real.hpp"
#include "regsum/sieve.hpp"

namespace regsum {

/* --- the theorem equations --- */

/* Families by left-hand side, all summed over n <= x:
 *   1: sum (1/n^{r+1}) sum_{k in Reg_n} f(gcd) k^r
 *   2: sum (1/(n^r f(n))) sum_{k in Reg_n} f(gcd) k^r      (f nonvanishing)
 *   3: sum (1/n) sum_{k in Reg_n} f(gcd) B_2m(k/n)
 *   4: sum (1/f(n)) sum_{k in Reg_n} f(gcd) B_2m(k/n)      (f nonvanishing)
 *   5: sum (1/n) sum_{k in Reg_n} f(gcd) log Gamma(k/n)
 *   6: sum (1/f(n)) sum_{k in Reg_n} f(gcd) log Gamma(k/n) (f nonvanishing) */
struct TheoremEq {
    std::string id;
    int family = 1;
    ArithmeticalFunction f;
    uint32_t r = 1;
    uint32_t m = 1;
    bool f_is_free = true;
    bool has_main = false;
    std::string error_shape;  // log2 log3 log4 log5 log3_over_x x sqrt_x none
};

const std::vector<std::string>& equation_ids();

/* Validates params and the nonvanishing requirement; applied ids carry their
 * own fixed f (the f argument is ignored for them). */
TheoremEq make_equation(const std::string& id, const ArithmeticalFunction& f, uint32_t r,
                        uint32_t m);

/* --- partial-sum series --- */

enum class SumMode { convolution, brute };
enum class AccumMode { exact, fixed128 };

SumMode parse_sum_mode(const std::string& s);
AccumMode parse_accum_mode(const std::string& s);

struct SumSeries {
    TheoremEq eq;
    std::vector<uint64_t> checkpoints;
    SumMode mode = SumMode::convolution;
    AccumMode accum = AccumMode::exact;
    bool exact_values = false;        // families 1..4 under exact accumulation
    std::vector<Rational> lhs_exact;  // filled when exact_values
    std::vector<Real> lhs;            // always filled
    std::vector<double> lhs_error;    // accumulation error bound per checkpoint
    double elapsed_sec = 0.0;
};

/* Gamma-family series reuse a caller-provided W cache when given. */
SumSeries lhs_series(const TheoremEq& eq, const std::vector<uint64_t>& checkpoints,
                     SumMode mode, AccumMode accum, const SpfSieve& sieve, mpfr_prec_t prec,
                     int threads, GammaCache* gamma_cache = nullptr);

/* Mobius-over-gcd restructuring of the coprime pair sums; exact cross-check
 * path for the direct gcd-test loop. Families 1..4 only. */
std::vector<Rational> lhs_series_mobius(const TheoremEq& eq,
                                        const std::vector<uint64_t>& checkpoints,
                                        const SpfSieve& sieve);

/* --- main terms and residuals --- */

struct MainTerm {
    bool defined = false;
    Real value{64};
    double error_bound = 0.0;
};

MainTerm main_term(const TheoremEq& eq, uint64_t x, const ConstantStore& store,
                   mpfr_prec_t prec);

struct ResidualRow {
    uint64_t x = 0;
    Real lhs{64};
    Real main{64};
    Real residual{64};
    double ratio = 0.0;      // |residual| / |main|
    double lhs_error = 0.0;
    double main_error = 0.0;
};

struct ResidualReport {
    TheoremEq eq;
    bool has_main = false;
    std::vector<ResidualRow> rows;
    bool has_fit = false;
    double fitted_exponent = 0.0;  // slope of log|residual| (or log|lhs|) vs log x
    double fitted_c = 0.0;         // max |residual| / shape(x)
    std::string shape;
    bool ratios_decreasing = false;
};

ResidualReport residual_report(const SumSeries& series, const ConstantStore& store,
                               mpfr_prec_t prec);

/* --- K2 from sieved gcd-sum data --- */

struct K2Fit {
    double estimate = 0.0;
    double std_error = 0.0;
    double k1_used = 0.0;
    std::vector<std::pair<uint64_t, double>> points;  // (x, per-point estimate)
};

K2Fit k2_fit(const std::vector<uint64_t>& xs, const SpfSieve& sieve,
             const ConstantStore& store, mpfr_prec_t prec);

/* Same fit on caller-supplied sums S(x) = sum_{n<=x} pillai_regular(n). */
K2Fit k2_fit_from_sums(const std::vector<std::pair<uint64_t, Real>>& sums, const Real& zeta2,
                       const Real& k1, mpfr_prec_t prec);

}  // namespace regsum
