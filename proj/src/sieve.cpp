#include "regsum/sieve.hpp"

#include <string>

namespace regsum {

SpfSieve::SpfSieve(uint64_t limit) : limit_(limit) {
    if (limit < 1) throw std::domain_error("sieve: limit must be >= 1");
    if (limit > (uint64_t(1) << 32)) throw std::domain_error("sieve: limit too large");
    spf_.assign(limit + 1, 0);
    for (uint64_t i = 2; i <= limit; ++i) {
        if (spf_[i] == 0) {
            spf_[i] = static_cast<uint32_t>(i);
            for (uint64_t j = i * i; j <= limit; j += i)
                if (spf_[j] == 0) spf_[j] = static_cast<uint32_t>(i);
        }
    }
}

std::vector<uint64_t> SpfSieve::primes(uint64_t bound) const {
    if (bound > limit_) throw std::domain_error("sieve: prime bound exceeds limit");
    std::vector<uint64_t> ps;
    for (uint64_t p = 2; p <= bound; ++p)
        if (spf_[p] == p) ps.push_back(p);
    return ps;
}

Factorization factorize(uint64_t n, const SpfSieve& sieve) {
    if (n < 1) throw std::domain_error("factorize: n must be >= 1");
    if (n > sieve.limit())
        throw std::domain_error("factorize: n exceeds sieve limit " + std::to_string(sieve.limit()));
    Factorization f;
    f.n = n;
    while (n > 1) {
        uint64_t p = sieve.spf(n);
        uint32_t a = 0;
        while (n % p == 0) {
            n /= p;
            ++a;
        }
        f.pk.push_back({p, a});
    }
    return f;
}

}  // namespace regsum
