#pragma once

// Independent brute-force oracles for the test suites.  These deliberately
// avoid the code paths they are checking: the log oracle works with exact
// rational partial sums, the Teichmuller oracle with plain fixed-point
// iteration, and the cokernel oracle with explicit coset enumeration.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "logclass/padic.hpp"

namespace oracles {

inline mpz_class pw(long b, long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), b, e);
    return r;
}

// Teichmuller lift by iterating a -> a^ell until stationary
inline mpz_class teichmuller_fixed_point(const mpz_class& a, long ell, long m) {
    mpz_class mod = pw(ell, m);
    mpz_class x = a % mod;
    if (x < 0) x += mod;
    for (long i = 0; i < m + 2; ++i) {
        mpz_class y;
        mpz_powm_ui(y.get_mpz_t(), x.get_mpz_t(), ell, mod.get_mpz_t());
        if (y == x) break;
        x = y;
    }
    return x;
}

// Iwasawa log via exact rational partial sums of log(1 + t) with the
// denominator-valuation bookkeeping: term k has valuation >= k - v_ell(k),
// so the truncation index K is the first K with K - v_ell(K) >= N for all
// later terms.
inline logclass::PadicNum iwasawa_log_series(const mpq_class& u, long ell, long N) {
    // strip the Teichmuller part by passing to u^(ell-1) (u^2/sign at 2)
    mpq_class upow = 1;
    long e = (ell == 2) ? 2 : ell - 1;
    for (long i = 0; i < e; ++i) upow *= u;
    mpq_class t = upow - 1;
    mpq_class sum = 0, tk = 1;
    long K = 1;
    while (true) {
        long v = 0;
        long k = K;
        while (k % ell == 0) {
            k /= ell;
            ++v;
        }
        long minval = (ell == 2) ? 2 : 1;
        if (K * minval - v >= N + 2) break;
        ++K;
    }
    for (long k = 1; k <= K; ++k) {
        tk *= t;
        mpq_class term = tk / k;
        if (k % 2 == 0) term = -term;
        sum += term;
    }
    sum /= e;
    return logclass::PadicNum::from_rational(sum, ell, N);
}

// structure of (Z/ell^m)^cols modulo the row span, by explicit enumeration;
// returns (order, exponent-of-quotient profile) data: the multiset of
// cyclic exponents, derived from the subgroup sizes of ell^k-torsion
inline std::vector<long> coset_structure(long ell, long m,
                                         const std::vector<std::vector<long>>& rows, long cols) {
    long M = 1;
    for (long i = 0; i < m; ++i) M *= ell;
    long total = 1;
    for (long c = 0; c < cols; ++c) total *= M;
    auto encode = [&](const std::vector<long>& v) {
        long code = 0;
        for (long c = 0; c < cols; ++c) code = code * M + (v[c] % M + M) % M;
        return code;
    };
    // span of the rows
    std::set<long> span;
    std::vector<std::vector<long>> frontier{std::vector<long>(cols, 0)};
    span.insert(0);
    while (!frontier.empty()) {
        std::vector<std::vector<long>> next;
        for (const auto& v : frontier)
            for (const auto& r : rows) {
                std::vector<long> w(cols);
                for (long c = 0; c < cols; ++c) w[c] = (v[c] + r[c]) % M;
                long code = encode(w);
                if (!span.count(code)) {
                    span.insert(code);
                    next.push_back(w);
                }
            }
        frontier.swap(next);
    }
    long spansz = static_cast<long>(span.size());
    long qorder = total / spansz;
    // quotient exponent profile: N_k = #{x : ell^k x in span} / |span|
    std::vector<long> profile;  // log_ell of the ell^k-torsion of the quotient
    for (long k = 0; k <= m; ++k) {
        long lk = 1;
        for (long i = 0; i < k; ++i) lk *= ell;
        long cnt = 0;
        std::vector<long> x(cols, 0);
        while (true) {
            std::vector<long> y(cols);
            for (long c = 0; c < cols; ++c) y[c] = (x[c] * lk) % M;
            if (span.count(encode(y))) ++cnt;
            long c = 0;
            while (c < cols && x[c] == M - 1) x[c++] = 0;
            if (c == cols) break;
            ++x[c];
        }
        long tors = cnt / spansz;
        long lg = 0;
        while (tors > 1) {
            tors /= ell;
            ++lg;
        }
        profile.push_back(lg);
    }
    // turn the torsion profile into exponents
    std::vector<long> diffs;
    for (std::size_t i = 1; i < profile.size(); ++i) diffs.push_back(profile[i] - profile[i - 1]);
    std::vector<long> exps;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        long next = (i + 1 < diffs.size()) ? diffs[i + 1] : 0;
        for (long j = 0; j < diffs[i] - next; ++j) exps.push_back(static_cast<long>(i) + 1);
    }
    std::sort(exps.begin(), exps.end());
    (void)qorder;
    return exps;
}

// deterministic xorshift for reproducible property tests
struct Rng {
    std::uint64_t s;
    explicit Rng(std::uint64_t seed) : s(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
    std::uint64_t next() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return s;
    }
    long uniform(long lo, long hi) {  // inclusive
        return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

}  // namespace oracles
