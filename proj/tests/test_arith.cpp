#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "regsum/arith.hpp"
#include "regsum/sieve.hpp"

using namespace regsum;

namespace {

const SpfSieve& sieve() {
    static SpfSieve s(100000);
    return s;
}

/* trial-division oracle, independent of the sieve */
std::vector<std::pair<uint64_t, uint32_t>> factor_naive(uint64_t n) {
    std::vector<std::pair<uint64_t, uint32_t>> out;
    for (uint64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        uint32_t a = 0;
        while (n % p == 0) n /= p, ++a;
        out.push_back({p, a});
    }
    if (n > 1) out.push_back({n, 1});
    return out;
}

std::vector<uint64_t> divisors_naive(uint64_t n) {
    std::vector<uint64_t> out;
    for (uint64_t d = 1; d <= n; ++d)
        if (n % d == 0) out.push_back(d);
    return out;
}

int mobius_naive(uint64_t n) {
    auto fac = factor_naive(n);
    for (auto& [p, a] : fac)
        if (a > 1) return 0;
    return fac.size() % 2 ? -1 : 1;
}

/* definitional regularity: some x in [1, n] has k*k*x = k (mod n) */
bool regular_naive(uint64_t k, uint64_t n) {
    uint64_t k2 = (k % n) * (k % n) % n;
    for (uint64_t x = 1; x <= n; ++x)
        if ((k2 * x) % n == k % n) return true;
    return false;
}

Factorization fac(uint64_t n) { return factorize(n, sieve()); }

}  // namespace

TEST_CASE("factorize matches trial division") {
    for (uint64_t n = 1; n <= 3000; ++n) {
        Factorization f = fac(n);
        CHECK(f.n == n);
        auto naive = factor_naive(n);
        REQUIRE(f.pk.size() == naive.size());
        uint64_t prod = 1;
        for (size_t i = 0; i < naive.size(); ++i) {
            CHECK(f.pk[i].p == naive[i].first);
            CHECK(f.pk[i].a == naive[i].second);
            for (uint32_t j = 0; j < f.pk[i].a; ++j) prod *= f.pk[i].p;
        }
        CHECK(prod == n);
    }
    CHECK_THROWS_AS(factorize(0, sieve()), std::domain_error);
    CHECK_THROWS_AS(factorize(sieve().limit() + 1, sieve()), std::domain_error);
}

TEST_CASE("sieve primality and prime list") {
    auto ps = sieve().primes(100);
    std::vector<uint64_t> want{2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                               43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};
    CHECK(ps == want);
    for (uint64_t n = 2; n <= 2000; ++n)
        CHECK(sieve().is_prime(n) == (factor_naive(n).size() == 1 && fac(n).pk[0].a == 1));
}

TEST_CASE("multiplicative kernels against divisor-sum oracles") {
    for (uint64_t n = 1; n <= 1500; ++n) {
        Factorization f = fac(n);
        auto divs = divisors_naive(n);

        CHECK(mobius(f) == mobius_naive(n));
        CHECK(tau(f) == divs.size());

        uint64_t ustar = 0, phi_cnt = 0;
        for (uint64_t d : divs)
            if (std::gcd(d, n / d) == 1) ++ustar;
        for (uint64_t k = 1; k <= n; ++k)
            if (std::gcd(k, n) == 1) ++phi_cnt;
        CHECK(tau_star(f) == ustar);
        CHECK(euler_phi(f) == phi_cnt);

        /* psi = id * mu^2 */
        uint64_t psi = 0;
        for (uint64_t d : divs)
            if (mobius_naive(d) != 0) psi += n / d;
        CHECK(dedekind_psi(f) == psi);

        mpz_class s1 = 0, s2 = 0;
        for (uint64_t d : divs) {
            s1 += static_cast<unsigned long>(d);
            s2 += mpz_class(static_cast<unsigned long>(d)) * static_cast<unsigned long>(d);
        }
        CHECK(sigma_k(0, f) == static_cast<unsigned long>(divs.size()));
        CHECK(sigma_k(1, f) == s1);
        CHECK(sigma_k(2, f) == s2);
    }
}

TEST_CASE("jordan_phi equals its mobius convolution for positive and negative s") {
    for (int s : {-2, -1, 0, 1, 2, 3}) {
        for (uint64_t n = 1; n <= 400; ++n) {
            Rational want(0);
            for (uint64_t d : divisors_naive(n)) {
                int mu = mobius_naive(d);
                if (mu == 0) continue;
                uint64_t q = n / d;
                Rational qs = s >= 0 ? Rational(pow_z(mpz_class(static_cast<unsigned long>(q)),
                                                      static_cast<unsigned long>(s)))
                                     : Rational(1) / Rational(pow_z(
                                           mpz_class(static_cast<unsigned long>(q)),
                                           static_cast<unsigned long>(-s)));
                want += Rational(mu) * qs;
            }
            CHECK(jordan_phi(s, fac(n)) == want);
        }
    }
    CHECK(jordan_phi(-1, fac(4)) == Rational(-1, 4));
    CHECK(jordan_phi(1, fac(12)) == Rational(4));
    CHECK(jordan_phi(2, fac(12)) == Rational(96));
    for (uint64_t n = 1; n <= 300; ++n)
        CHECK(jordan_phi(1, fac(n)) == Rational(static_cast<long>(euler_phi(fac(n)))));
}

TEST_CASE("unitary divisors") {
    CHECK(unitary_divisors(fac(12)) == std::vector<uint64_t>{1, 3, 4, 12});
    CHECK(unitary_divisors(fac(1)) == std::vector<uint64_t>{1});
    for (uint64_t n = 1; n <= 1000; ++n) {
        std::vector<uint64_t> want;
        for (uint64_t d : divisors_naive(n))
            if (std::gcd(d, n / d) == 1) want.push_back(d);
        auto got = unitary_divisors(fac(n));
        CHECK(got == want);
        CHECK(got.size() == tau_star(fac(n)));
    }
}

TEST_CASE("regularity matches the definitional solvability test") {
    for (uint64_t n = 1; n <= 120; ++n)
        for (uint64_t k = 1; k <= n; ++k)
            CHECK(is_regular(k, n) == regular_naive(k, n));
    /* spot values */
    CHECK(is_regular(3, 4));
    CHECK(is_regular(4, 4));
    CHECK_FALSE(is_regular(2, 4));
    CHECK_FALSE(is_regular(6, 12));
    /* k beyond n reduces mod n */
    CHECK(is_regular(7, 4) == is_regular(3, 4));
}

TEST_CASE("rho, pillai, and regular gcd sums") {
    CHECK(rho(fac(12)) == 9);
    CHECK(pillai(fac(4)) == 8);
    CHECK(pillai(fac(12)) == 40);
    CHECK(pillai_regular(fac(4)) == 6);
    CHECK(pillai_regular(fac(12)) == 30);
    CHECK(tau_star(fac(12)) == 4);
    CHECK(dedekind_psi(fac(12)) == 24);

    for (uint64_t n = 1; n <= 500; ++n) {
        uint64_t cnt = 0, preg = 0, pall = 0;
        for (uint64_t k = 1; k <= n; ++k) {
            uint64_t g = std::gcd(k, n);
            pall += g;
            if (std::gcd(g, n / g) == 1) ++cnt, preg += g;
        }
        CHECK(rho(fac(n)) == cnt);
        CHECK(pillai(fac(n)) == pall);
        CHECK(pillai_regular(fac(n)) == preg);
    }
}

TEST_CASE("regular range iterates exactly the regular residues") {
    for (uint64_t n : {1, 2, 4, 12, 36, 97, 360}) {
        std::vector<uint64_t> got, want;
        for (uint64_t k : reg_iter(n)) got.push_back(k);
        for (uint64_t k = 1; k <= n; ++k)
            if (is_regular(k, n)) want.push_back(k);
        CHECK(got == want);
        CHECK(got.size() == rho(fac(n)));
    }
}

TEST_CASE("sawtooth theta") {
    CHECK(theta(Rational(7)) == Rational(-1, 2));
    CHECK(theta(Rational(15, 2)) == Rational(0));
    CHECK(theta(Rational(-1, 4)) == Rational(1, 4));
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        long num = static_cast<long>(rng() % 2000) - 1000;
        unsigned long den = 1 + rng() % 97;
        Rational x(num, den);
        Rational t = theta(x);
        CHECK(t >= Rational(-1, 2));
        CHECK(t < Rational(1, 2));
        /* x - theta(x) - 1/2 is the floor */
        Rational fl = x - t - Rational(1, 2);
        CHECK(fl.is_integer());
        CHECK(fl <= x);
        CHECK(x - fl < Rational(1));
        CHECK(doctest::Approx(theta(x.to_double())).epsilon(1e-12) == t.to_double());
    }
}

TEST_CASE("arithmetical function parsing and evaluation") {
    const char* names[] = {"one", "id", "mu", "tau", "tau_star", "phi", "phi2", "sigma"};
    for (const char* nm : names) {
        ArithmeticalFunction f = ArithmeticalFunction::parse(nm);
        CHECK(f.name() == nm);
        CHECK(f.nonvanishing() == (std::string(nm) != "mu"));
    }
    CHECK_THROWS_AS(ArithmeticalFunction::parse("nope"), std::domain_error);

    for (const char* nm : names) {
        ArithmeticalFunction f = ArithmeticalFunction::parse(nm);
        auto tab = f.table_i64(800, sieve());
        for (uint64_t n = 1; n <= 800; ++n) {
            int64_t v = f.eval_i64(fac(n));
            CHECK(Rational(static_cast<long>(v)) == f.eval_q(fac(n)));
            CHECK(tab[n] == v);
        }
    }

    /* expected built-in meanings on a few n */
    CHECK(ArithmeticalFunction::parse("one").eval_i64(fac(12)) == 1);
    CHECK(ArithmeticalFunction::parse("id").eval_i64(fac(12)) == 12);
    CHECK(ArithmeticalFunction::parse("mu").eval_i64(fac(30)) == -1);
    CHECK(ArithmeticalFunction::parse("tau").eval_i64(fac(12)) == 6);
    CHECK(ArithmeticalFunction::parse("tau_star").eval_i64(fac(12)) == 4);
    CHECK(ArithmeticalFunction::parse("phi").eval_i64(fac(12)) == 4);
    CHECK(ArithmeticalFunction::parse("phi2").eval_i64(fac(12)) == 96);
    CHECK(ArithmeticalFunction::parse("sigma").eval_i64(fac(12)) == 28);

    ArithmeticalFunction g = ArithmeticalFunction::custom(
        "psi", [](uint64_t p, uint32_t a) {
            mpz_class v = pow_z(mpz_class(static_cast<unsigned long>(p)), a);
            mpz_class w = pow_z(mpz_class(static_cast<unsigned long>(p)), a - 1);
            return Rational(mpz_class(v + w));
        },
        true);
    CHECK(g.name() == "psi");
    CHECK(g.nonvanishing());
    for (uint64_t n = 1; n <= 300; ++n)
        CHECK(g.eval_q(fac(n)) == Rational(static_cast<long>(dedekind_psi(fac(n)))));
}

TEST_CASE("log-linear values") {
    LogLinear a;
    a.konst = Rational(1, 2);
    a.c0 = Rational(2);
    a.logs[2] = Rational(3, 2);

    /* 1/2 + 2 log sqrt(2 pi) + (3/2) log 2 */
    Real v = a.eval(128);
    Real want(128);
    mpfr_const_pi(want.raw(), MPFR_RNDN);
    mpfr_mul_ui(want.raw(), want.raw(), 2, MPFR_RNDN);
    mpfr_log(want.raw(), want.raw(), MPFR_RNDN);
    want = want + Real(Rational(3, 2), 128) * Real::log_ui(2, 128);
    want += Real(Rational(1, 2), 128);
    CHECK(abs(v - want).to_double() < 1e-35);

    LogLinear b = a;
    CHECK(a == b);
    b -= a;
    CHECK(b.is_zero());
    b = a + a;
    CHECK(abs(b.eval(128) - (v + v)).to_double() < 1e-35);
    b.add_scaled(a, Rational(-2));
    CHECK(b.is_zero());

    CHECK(von_mangoldt(fac(8)).logs.at(2) == Rational(1));
    CHECK(von_mangoldt(fac(7)).logs.at(7) == Rational(1));
    CHECK(von_mangoldt(fac(6)).is_zero());
    CHECK(von_mangoldt(fac(1)).is_zero());
}
