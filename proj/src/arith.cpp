#include "regsum/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace regsum {

/* --- multiplicative kernels --- */

int mobius(const Factorization& f) {
    for (const auto& e : f.pk)
        if (e.a > 1) return 0;
    return (f.pk.size() % 2 == 0) ? 1 : -1;
}

uint64_t tau(const Factorization& f) {
    uint64_t t = 1;
    for (const auto& e : f.pk) t *= (e.a + 1);
    return t;
}

uint64_t tau_star(const Factorization& f) { return uint64_t(1) << f.pk.size(); }

static uint64_t upow(uint64_t p, uint32_t a) {
    uint64_t r = 1;
    while (a--) r *= p;
    return r;
}

uint64_t euler_phi(const Factorization& f) {
    uint64_t r = 1;
    for (const auto& e : f.pk) r *= upow(e.p, e.a - 1) * (e.p - 1);
    return r;
}

uint64_t dedekind_psi(const Factorization& f) {
    uint64_t r = 1;
    for (const auto& e : f.pk) r *= upow(e.p, e.a - 1) * (e.p + 1);
    return r;
}

mpz_class sigma_k(uint32_t k, const Factorization& f) {
    mpz_class r = 1;
    for (const auto& e : f.pk) {
        if (k == 0) {
            r *= e.a + 1;
        } else {
            mpz_class pk = pow_z(mpz_class(static_cast<unsigned long>(e.p)), k);
            mpz_class num = pow_z(pk, e.a + 1) - 1;
            r *= num / (pk - 1);
        }
    }
    return r;
}

static Rational rpow_si(uint64_t p, long e) {
    mpz_class pz(static_cast<unsigned long>(p));
    if (e >= 0) return Rational(pow_z(pz, static_cast<unsigned long>(e)));
    return Rational(mpz_class(1), pow_z(pz, static_cast<unsigned long>(-e)));
}

Rational jordan_phi(int s, const Factorization& f) {
    Rational r(1);
    for (const auto& e : f.pk) {
        long a = e.a;
        r *= rpow_si(e.p, a * s) - rpow_si(e.p, (a - 1) * s);
    }
    return r;
}

std::vector<uint64_t> unitary_divisors(const Factorization& f) {
    std::vector<uint64_t> ds{1};
    for (const auto& e : f.pk) {
        uint64_t q = upow(e.p, e.a);
        size_t sz = ds.size();
        for (size_t i = 0; i < sz; ++i) ds.push_back(ds[i] * q);
    }
    std::sort(ds.begin(), ds.end());
    return ds;
}

bool is_regular(uint64_t k, uint64_t n) {
    if (n == 0) throw std::domain_error("is_regular: n must be >= 1");
    uint64_t g = std::gcd(k, n);
    return std::gcd(g, n / g) == 1;
}

uint64_t rho(const Factorization& f) {
    uint64_t r = 1;
    for (const auto& e : f.pk) r *= upow(e.p, e.a) - upow(e.p, e.a - 1) + 1;
    return r;
}

uint64_t pillai(const Factorization& f) {
    uint64_t r = 1;
    for (const auto& e : f.pk) r *= (e.a + 1) * upow(e.p, e.a) - e.a * upow(e.p, e.a - 1);
    return r;
}

uint64_t pillai_regular(const Factorization& f) {
    uint64_t r = 1;
    for (const auto& e : f.pk) r *= 2 * upow(e.p, e.a) - upow(e.p, e.a - 1);
    return r;
}

Rational theta(const Rational& x) {
    return x - Rational(x.floor()) - Rational(1, 2);
}

double theta(double x) { return x - std::floor(x) - 0.5; }

/* --- LogLinear --- */

bool LogLinear::is_zero() const {
    if (!konst.is_zero() || !c0.is_zero()) return false;
    for (const auto& [p, c] : logs)
        if (!c.is_zero()) return false;
    return true;
}

static void prune(std::map<uint64_t, Rational>& logs) {
    for (auto it = logs.begin(); it != logs.end();)
        it = it->second.is_zero() ? logs.erase(it) : std::next(it);
}

LogLinear& LogLinear::operator+=(const LogLinear& o) {
    konst += o.konst;
    c0 += o.c0;
    for (const auto& [p, c] : o.logs) logs[p] += c;
    prune(logs);
    return *this;
}

LogLinear& LogLinear::operator-=(const LogLinear& o) {
    konst -= o.konst;
    c0 -= o.c0;
    for (const auto& [p, c] : o.logs) logs[p] -= c;
    prune(logs);
    return *this;
}

void LogLinear::add_scaled(const LogLinear& o, const Rational& s) {
    konst += o.konst * s;
    c0 += o.c0 * s;
    for (const auto& [p, c] : o.logs) logs[p] += c * s;
    prune(logs);
}

bool operator==(const LogLinear& a, const LogLinear& b) {
    return a.konst == b.konst && a.c0 == b.c0 && a.logs == b.logs;
}

Real LogLinear::eval(mpfr_prec_t prec) const {
    Real r(konst, prec);
    if (!c0.is_zero()) {
        Real two_pi = Real(2, prec) * Real::pi(prec);
        r += Real(c0, prec) * (log(two_pi) / Real(2, prec));
    }
    for (const auto& [p, c] : logs)
        if (!c.is_zero()) r += Real(c, prec) * Real::log_ui(p, prec);
    return r;
}

std::string LogLinear::to_string() const {
    std::ostringstream os;
    os << konst.to_string();
    if (!c0.is_zero()) os << " + (" << c0.to_string() << ")*log(sqrt(2*pi))";
    for (const auto& [p, c] : logs)
        if (!c.is_zero()) os << " + (" << c.to_string() << ")*log(" << p << ")";
    return os.str();
}

LogLinear von_mangoldt(const Factorization& f) {
    LogLinear v;
    if (f.pk.size() == 1) v.logs[f.pk[0].p] = Rational(1);
    return v;
}

/* --- ArithmeticalFunction --- */

ArithmeticalFunction ArithmeticalFunction::custom(std::string name, PrimePowerRule rule,
                                                  bool nonvanishing) {
    ArithmeticalFunction g(FnKind::custom);
    g.name_ = std::move(name);
    g.rule_ = std::move(rule);
    g.custom_nonvanishing_ = nonvanishing;
    return g;
}

ArithmeticalFunction ArithmeticalFunction::parse(const std::string& name) {
    static const std::map<std::string, FnKind> names = {
        {"one", FnKind::one},   {"id", FnKind::id},       {"mu", FnKind::mobius},
        {"tau", FnKind::tau},   {"tau_star", FnKind::tau_star}, {"phi", FnKind::phi},
        {"phi2", FnKind::phi2}, {"sigma", FnKind::sigma},
    };
    auto it = names.find(name);
    if (it == names.end())
        throw std::domain_error("unknown weight function '" + name +
                                "' (expected one id mu tau tau_star phi phi2 sigma)");
    ArithmeticalFunction g(it->second);
    g.name_ = name;
    return g;
}

bool ArithmeticalFunction::nonvanishing() const {
    if (kind_ == FnKind::mobius) return false;
    if (kind_ == FnKind::custom) return custom_nonvanishing_;
    return true;
}

int64_t ArithmeticalFunction::eval_i64(const Factorization& f) const {
    int64_t r = 1;
    switch (kind_) {
        case FnKind::one: return 1;
        case FnKind::id: return static_cast<int64_t>(f.n);
        case FnKind::mobius: return mobius(f);
        case FnKind::tau: return static_cast<int64_t>(tau(f));
        case FnKind::tau_star: return static_cast<int64_t>(tau_star(f));
        case FnKind::phi: return static_cast<int64_t>(euler_phi(f));
        case FnKind::phi2:
            for (const auto& e : f.pk) {
                int64_t pa1 = static_cast<int64_t>(upow(e.p, e.a - 1));
                r *= pa1 * pa1 * static_cast<int64_t>(e.p * e.p - 1);
            }
            return r;
        case FnKind::sigma: {
            for (const auto& e : f.pk) {
                int64_t s = 0, q = 1;
                for (uint32_t j = 0; j <= e.a; ++j, q *= static_cast<int64_t>(e.p)) s += q;
                r *= s;
            }
            return r;
        }
        case FnKind::custom:
            throw std::domain_error("eval_i64: custom weight has no integer fast path");
    }
    return r;
}

Rational ArithmeticalFunction::eval_q(const Factorization& f) const {
    if (kind_ != FnKind::custom) return Rational(static_cast<long>(eval_i64(f)));
    Rational r(1);
    for (const auto& e : f.pk) r *= rule_(e.p, e.a);
    return r;
}

std::vector<int64_t> ArithmeticalFunction::table_i64(uint64_t x, const SpfSieve& sieve) const {
    if (kind_ == FnKind::custom)
        throw std::domain_error("table_i64: custom weight has no integer fast path");
    if (x > sieve.limit()) throw std::domain_error("table_i64: x exceeds sieve limit");
    std::vector<int64_t> t(x + 1, 0);
    Factorization f;
    for (uint64_t n = 1; n <= x; ++n) {
        f.n = n;
        f.pk.clear();
        uint64_t m = n;
        while (m > 1) {
            uint64_t p = sieve.spf(m);
            uint32_t a = 0;
            while (m % p == 0) {
                m /= p;
                ++a;
            }
            f.pk.push_back({p, a});
        }
        t[n] = eval_i64(f);
    }
    return t;
}

}  // namespace regsum
