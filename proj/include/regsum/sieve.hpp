#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace regsum {

/* Smallest-prime-factor sieve up to a fixed limit. */
class SpfSieve {
public:
    explicit SpfSieve(uint64_t limit);

    uint64_t limit() const { return limit_; }
    bool is_prime(uint64_t n) const { return n >= 2 && spf(n) == n; }
    uint32_t spf(uint64_t n) const { return spf_[n]; }

    /* All primes <= bound (bound <= limit), ascending. */
    std::vector<uint64_t> primes(uint64_t bound) const;

private:
    uint64_t limit_;
    std::vector<uint32_t> spf_;
};

struct PrimePower {
    uint64_t p;
    uint32_t a;
};

struct Factorization {
    uint64_t n = 1;
    std::vector<PrimePower> pk;

    size_t omega() const { return pk.size(); }
    bool is_prime_power() const { return pk.size() == 1; }
    bool is_squarefree() const {
        for (const auto& e : pk)
            if (e.a > 1) return false;
        return true;
    }
};

/* Requires 1 <= n <= sieve.limit(). */
Factorization factorize(uint64_t n, const SpfSieve& sieve);

}  // namespace regsum
