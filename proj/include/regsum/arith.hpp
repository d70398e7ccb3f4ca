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

/* --- multiplicative kernels --- */

int mobius(const Factorization& f);
uint64_t tau(const Factorization& f);
uint64_t tau_star(const Factorization& f);  // 2^omega, counts unitary divisors
uint64_t euler_phi(const Factorization& f);
uint64_t dedekind_psi(const Factorization& f);
mpz_class sigma_k(uint32_t k, const Factorization& f);

/* Jordan-style totient phi_s = id^s * mu for any integer s (s <= 0 gives rationals). */
Rational jordan_phi(int s, const Factorization& f);

/* Unitary divisors d | n with gcd(d, n/d) = 1, ascending. */
std::vector<uint64_t> unitary_divisors(const Factorization& f);

/* k is regular mod n iff gcd(k, n) is a unitary divisor of n. */
bool is_regular(uint64_t k, uint64_t n);

/* Count of regular residues in [1, n]. */
uint64_t rho(const Factorization& f);

/* gcd sums: pillai over all k in [1, n], pillai_regular over regular k only. */
uint64_t pillai(const Factorization& f);
uint64_t pillai_regular(const Factorization& f);

/* theta(x) = x - floor(x) - 1/2, the sawtooth with range [-1/2, 1/2). */
Rational theta(const Rational& x);
double theta(double x);

/* --- regular-residue iteration --- */

class RegularRange {
public:
    explicit RegularRange(uint64_t n) : n_(n) {}

    class iterator {
    public:
        iterator(uint64_t k, uint64_t n) : k_(k), n_(n) { advance(); }
        uint64_t operator*() const { return k_; }
        iterator& operator++() { ++k_; advance(); return *this; }
        bool operator!=(const iterator& o) const { return k_ != o.k_; }

    private:
        void advance() {
            while (k_ <= n_ && !is_regular(k_, n_)) ++k_;
        }
        uint64_t k_, n_;
    };

    iterator begin() const { return iterator(1, n_); }
    iterator end() const { return iterator(n_ + 1, n_); }

private:
    uint64_t n_;
};

inline RegularRange reg_iter(uint64_t n) { return RegularRange(n); }

/* --- exact log-linear values: k + c0*log(sqrt(2*pi)) + sum_p c_p*log(p) --- */

struct LogLinear {
    Rational konst;
    Rational c0;
    std::map<uint64_t, Rational> logs;

    bool is_zero() const;
    LogLinear& operator+=(const LogLinear& o);
    LogLinear& operator-=(const LogLinear& o);
    void add_scaled(const LogLinear& o, const Rational& s);
    friend LogLinear operator+(LogLinear a, const LogLinear& b) { a += b; return a; }
    friend LogLinear operator-(LogLinear a, const LogLinear& b) { a -= b; return a; }
    friend bool operator==(const LogLinear& a, const LogLinear& b);

    Real eval(mpfr_prec_t prec) const;
    std::string to_string() const;
};

/* von Mangoldt: log p at prime powers p^a, zero elsewhere. */
LogLinear von_mangoldt(const Factorization& f);

/* --- the weight functions the identities range over --- */

enum class FnKind { one, id, mobius, tau, tau_star, phi, phi2, sigma, custom };

class ArithmeticalFunction {
public:
    ArithmeticalFunction() : kind_(FnKind::id) {}
    explicit ArithmeticalFunction(FnKind k) : kind_(k) {}

    using PrimePowerRule = std::function<Rational(uint64_t p, uint32_t a)>;
    static ArithmeticalFunction custom(std::string name, PrimePowerRule rule, bool nonvanishing);

    /* Accepted names: one id mu tau tau_star phi phi2 sigma. */
    static ArithmeticalFunction parse(const std::string& name);

    FnKind kind() const { return kind_; }
    const std::string& name() const { return name_; }

    /* Never zero on any n? (mu fails; needed where f(d) sits in a denominator) */
    bool nonvanishing() const;

    Rational eval_q(const Factorization& f) const;
    int64_t eval_i64(const Factorization& f) const;  // builtin kinds only

    /* Values f(1..x) in one pass; builtin kinds only. */
    std::vector<int64_t> table_i64(uint64_t x, const SpfSieve& sieve) const;

private:
    FnKind kind_;
    std::string name_ = "id";
    PrimePowerRule rule_;
    bool custom_nonvanishing_ = false;
};

}  // namespace regsum
