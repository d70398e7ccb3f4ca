#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "regsum/rational.hpp"
#include "regsum/real.hpp"
#include "regsum/sieve.hpp"

namespace regsum {

struct BoundedValue {
    Real value{64};
    double error_bound = 0.0;
    std::string method;
};

/* A constant given by a product over primes of exact local factors,
 * with |log local_factor(p)| <= tail_c / p^tail_decay for p > prime_bound. */
struct EulerProductSpec {
    std::string name;
    std::function<Rational(uint64_t p)> local_factor;
    int tail_decay = 2;
    double tail_c = 1.0;
    uint64_t prime_bound = 10000000;
};

BoundedValue euler_product(const EulerProductSpec& spec, const SpfSieve& sieve,
                           mpfr_prec_t prec, int threads = 1);

/* Every product constant appearing in the main terms: K1, C1..C4, D0..D4,
 * E1..E4, P_tau. */
std::vector<EulerProductSpec> main_term_product_specs(uint64_t prime_bound);

/* --- zeta and friends --- */

BoundedValue zeta2_closed(mpfr_prec_t prec);              // pi^2/6
BoundedValue zeta_em(uint32_t s, mpfr_prec_t prec);       // Euler-Maclaurin, s >= 2
BoundedValue zeta3_accelerated(mpfr_prec_t prec);         // central-binomial series
BoundedValue zeta_prime_2(mpfr_prec_t prec);              // EM on -sum log n/n^2
/* second route: zeta'(2) = -zeta(2) * sum_p log p/(p^2 - 1) */
BoundedValue zeta_prime_2_lambda(const SpfSieve& sieve, uint64_t bound, mpfr_prec_t prec);

BoundedValue euler_gamma(mpfr_prec_t prec);               // Euler-Maclaurin on H_N
BoundedValue euler_gamma_reference(mpfr_prec_t prec);     // independent second method

/* --- the K2 series with its ambiguous alpha --- */

enum class AlphaVariant { paper_literal, log_p };
const char* alpha_variant_name(AlphaVariant v);

/* K2 = K1 (2 gamma - 1/2 - 2 zeta'(2)/zeta(2)) - sum_{n>=1} mu(n)(log n - alpha(n)
 * + 2 beta(n))/(n psi(n)); alpha per variant, beta(n) = sum_{p|n} log p/(p^2-1). */
BoundedValue k2_series(uint64_t truncation, AlphaVariant variant, const SpfSieve& sieve,
                       mpfr_prec_t prec);

/* --- K = sum_d Lambda(d)/(d^2 psi(d)) --- */

struct KConstant {
    BoundedValue full;          // prime-sum with all powers, tail bounded
    Real d_sum_partial{64};     // sum over d <= bound
    Real matched_prime_sum{64}; // same terms grouped by prime: must agree
};

KConstant k_constant(uint64_t bound, const SpfSieve& sieve, mpfr_prec_t prec);

/* --- the store --- */

class ConstantStore {
public:
    void put(const std::string& name, BoundedValue v);
    const BoundedValue& get(const std::string& name) const;
    bool has(const std::string& name) const { return map_.count(name) != 0; }
    const std::vector<std::string>& names() const { return order_; }

private:
    std::vector<std::string> order_;
    std::map<std::string, BoundedValue> map_;
};

/* Everything main terms need: zeta2 zeta3 zeta5 zeta7 zeta9 zeta_prime2
 * euler_gamma log_sqrt_2pi K1 C1..C4 D0..D4 E1..E4 P_tau K K2 K2_literal. */
ConstantStore build_constant_store(const SpfSieve& sieve, uint64_t prime_bound,
                                   mpfr_prec_t prec, int threads = 1);

}  // namespace regsum
