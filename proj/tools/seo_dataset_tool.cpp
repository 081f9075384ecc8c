// Generator and auditor for the sextic unit datasets used by the norm-index
// verifier.  The units of k1 = Q(sqrt(d), theta), theta = 2cos(2pi/9), are
// produced through exact cyclotomic arithmetic in Z[x]/(x^f - 1) with
// f = 9*257 = 2313 and recognized in the theta-basis by exact linear algebra
// mod the cyclotomic polynomial; nothing here follows the validation path in
// src/seo.cpp, so the two routes check each other.
//
//   seo_dataset_tool gen257 <out.json>
//   seo_dataset_tool control <d> <out.json>   (negative-control search)
//   seo_dataset_tool verify <file.json> <d>

#include <gmpxx.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "logclass/padic.hpp"
#include "logclass/quadfield.hpp"
#include "logclass/seo.hpp"

using namespace logclass;

namespace {

using Poly = std::vector<mpz_class>;

constexpr long kF = 2313;  // 9 * 257

Poly poly_one() { return Poly{1}; }

// P <- P * (1 - x^c) modulo x^f - 1
void mul_binomial_cyclic(Poly& P, long c, long f) {
    if (P.size() != static_cast<std::size_t>(f)) P.resize(f, 0);
    Poly out(f, 0);
    for (long i = 0; i < f; ++i) {
        if (P[i] == 0) continue;
        out[i] += P[i];
        out[(i + c) % f] -= P[i];
    }
    P.swap(out);
}

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    }
    return c;
}

// exact division by a monic divisor
Poly poly_divexact_monic(Poly num, const Poly& den) {
    long dn = static_cast<long>(num.size()) - 1;
    long dd = static_cast<long>(den.size()) - 1;
    Poly q(dn - dd + 1, 0);
    for (long k = dn - dd; k >= 0; --k) {
        mpz_class c = num[k + dd];
        q[k] = c;
        if (c == 0) continue;
        for (long j = 0; j <= dd; ++j) num[k + j] -= c * den[j];
    }
    for (const auto& c : num)
        if (c != 0) throw std::logic_error("poly_divexact_monic: remainder");
    return q;
}

Poly xn_minus_1(long n) {
    Poly p(n + 1, 0);
    p[0] = -1;
    p[n] = 1;
    return p;
}

// Phi_2313(x) = Phi_771(x^3), Phi_771(y) = (y^771-1)(y-1)/((y^257-1)(y^3-1))
Poly cyclotomic_2313() {
    Poly num = poly_mul(xn_minus_1(771), xn_minus_1(1));
    Poly t = poly_divexact_monic(num, xn_minus_1(257));
    Poly phi771 = poly_divexact_monic(t, xn_minus_1(3));
    Poly out(3 * (phi771.size() - 1) + 1, 0);
    for (std::size_t i = 0; i < phi771.size(); ++i) out[3 * i] = phi771[i];
    return out;
}

Poly poly_mod(Poly p, const Poly& phi) {
    long dd = static_cast<long>(phi.size()) - 1;
    while (static_cast<long>(p.size()) - 1 >= dd) {
        long k = static_cast<long>(p.size()) - 1;
        mpz_class c = p.back();
        if (c != 0)
            for (long j = 0; j <= dd; ++j) p[k - dd + j] -= c * phi[j];
        p.pop_back();
    }
    p.resize(dd, 0);
    return p;
}

// Galois subgroup H of (Z/2313)^x fixing k1 = Q(theta, sqrt(257)):
// residues that are +-1 mod 9 and squares mod 257.
std::vector<long> fixing_subgroup() {
    std::set<long> squares;
    for (long t = 1; t < 257; ++t) squares.insert(t * t % 257);
    std::vector<long> H;
    for (long a = 1; a < kF; ++a) {
        if (a % 3 == 0 || a % 257 == 0) continue;
        long a9 = a % 9;
        if (a9 != 1 && a9 != 8) continue;
        if (!squares.count(a % 257)) continue;
        H.push_back(a);
    }
    return H;
}

// theta = zeta9 + zeta9^-1 with zeta9 = x^257; sqrt(257) as the quadratic
// Gauss sum over zeta257 = x^9
Poly theta_poly() {
    Poly p(kF, 0);
    p[257] = 1;
    p[kF - 257] = 1;
    return p;
}

Poly gauss_poly() {
    Poly p(kF, 0);
    mpz_class m(257);
    for (long t = 1; t < 257; ++t) {
        mpz_class tt(t);
        p[9 * t % kF] += mpz_kronecker(tt.get_mpz_t(), m.get_mpz_t());
    }
    return p;
}

Poly cyclic_mul(const Poly& a, const Poly& b) {
    Poly c(kF, 0);
    for (long i = 0; i < kF; ++i) {
        if (a[i] == 0) continue;
        for (long j = 0; j < kF; ++j) {
            if (b[j] == 0) continue;
            c[(i + j) % kF] += a[i] * b[j];
        }
    }
    return c;
}

// circular unit: product over H of (1 - x^(a h))
Poly circular_unit_poly(long a, const std::vector<long>& H) {
    Poly P = poly_one();
    P.resize(kF, 0);
    for (long h : H) mul_binomial_cyclic(P, (a * h) % kF, kF);
    return P;
}

// express an element of k1 (given mod x^f - 1) in the basis
// {1, theta, theta^2} x {1, sqrt257}; exact full elimination, verified on
// every coordinate afterwards
std::array<mpq_class, 6> recognize(const Poly& u, const Poly& phi,
                                   const std::vector<Poly>& basis_red) {
    Poly ur = poly_mod(u, phi);
    std::size_t dim = phi.size() - 1;
    std::vector<std::array<mpq_class, 7>> M(dim);
    for (std::size_t row = 0; row < dim; ++row) {
        for (int j = 0; j < 6; ++j) M[row][j] = mpq_class(basis_red[j][row]);
        M[row][6] = mpq_class(ur[row]);
    }
    std::size_t rank = 0;
    std::vector<int> pivcol;
    for (int c = 0; c < 6; ++c) {
        std::size_t piv = dim;
        for (std::size_t i = rank; i < dim; ++i)
            if (M[i][c] != 0) {
                piv = i;
                break;
            }
        if (piv == dim) continue;
        std::swap(M[rank], M[piv]);
        mpq_class pv = M[rank][c];
        for (int j = c; j < 7; ++j) M[rank][j] /= pv;
        for (std::size_t i = 0; i < dim; ++i) {
            if (i == rank || M[i][c] == 0) continue;
            mpq_class f = M[i][c];
            for (int j = c; j < 7; ++j) M[i][j] -= f * M[rank][j];
        }
        pivcol.push_back(c);
        ++rank;
    }
    if (rank != 6) throw std::logic_error("recognize: basis not of full rank");
    for (std::size_t i = rank; i < dim; ++i)
        if (M[i][6] != 0) throw std::logic_error("recognize: element outside the sextic field");
    std::array<mpq_class, 6> c;
    for (std::size_t i = 0; i < rank; ++i) c[pivcol[i]] = M[i][6];
    // belt and braces: verify on the whole coordinate space
    for (std::size_t row = 0; row < dim; ++row) {
        mpq_class s = 0;
        for (int j = 0; j < 6; ++j) s += c[j] * mpq_class(basis_red[j][row]);
        if (s != mpq_class(ur[row])) throw std::logic_error("recognize: verification failed");
    }
    return c;
}

SexticElem elem_from_coords(const std::array<mpq_class, 6>& c) {
    // recognition order is {1, theta, theta^2, g, theta*g, theta^2*g}
    SexticElem e;
    for (int i = 0; i < 3; ++i) {
        e.c[i][0] = c[i];
        e.c[i][1] = c[3 + i];
    }
    return e;
}

// ---------------------------------------------------------- independence

// embeddings of k1 into F_p: a root r3 of x^3-3x+1 and r2 of x^2-257
struct FpEmbedding {
    long p;
    long r3, r2;
};

long powmod_l(long b, long e, long p) {
    long long r = 1, bb = ((b % p) + p) % p;
    while (e) {
        if (e & 1) r = r * bb % p;
        e >>= 1;
        bb = bb * bb % p;
    }
    return static_cast<long>(r);
}

std::vector<FpEmbedding> embeddings_mod_p(long p, long d) {
    std::vector<FpEmbedding> out;
    std::vector<long> roots3, roots2;
    for (long x = 0; x < p; ++x) {
        if (((static_cast<long long>(x) * x % p) * x % p - 3 * x % p + 1 + 3LL * p) % p == 0)
            roots3.push_back(x);
        if ((static_cast<long long>(x) * x - d) % p == 0) roots2.push_back(x);
    }
    if (roots3.size() != 3 || roots2.size() != 2) return out;
    for (long r3 : roots3)
        for (long r2 : roots2) out.push_back({p, r3, r2});
    return out;
}

long eval_mod_p(const SexticElem& u, const FpEmbedding& e) {
    long long acc = 0;
    long long th = 1;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 2; ++j) {
            const mpq_class& q = u.c[i][j];
            mpz_class num = q.get_num(), den = q.get_den();
            mpz_class pden;
            mpz_class pz(e.p);
            if (mpz_invert(pden.get_mpz_t(), den.get_mpz_t(), pz.get_mpz_t()) == 0)
                throw std::runtime_error("eval_mod_p: denominator hits p");
            mpz_class v = num * pden % pz;
            long vv = static_cast<long>(((v.get_si()) % e.p + e.p) % e.p);
            long long term = static_cast<long long>(vv) * th % e.p;
            if (j == 1) term = term * e.r2 % e.p;
            acc = (acc + term) % e.p;
        }
        th = th * e.r3 % e.p;
    }
    return static_cast<long>(acc);
}

// rank over F_q of the q-th power-residue character matrix: a lower bound
// for the Z-rank of the span of the units
long char_rank(const std::vector<SexticElem>& units, long d, long q) {
    // find p = 1 mod q with 6 embeddings
    for (long p = 1000; p < 200000; ++p) {
        bool prime = p > 1;
        for (long t = 2; t * t <= p; ++t)
            if (p % t == 0) {
                prime = false;
                break;
            }
        if (!prime || (p - 1) % q != 0) continue;
        auto embs = embeddings_mod_p(p, d);
        if (embs.size() != 6) continue;
        // characters: chi(u) = u^((p-1)/q) = g^(k), record k in Z/q
        long g = 2;
        for (; g < p; ++g) {
            bool gen = true;
            long e = p - 1;
            for (long t = 2; t * t <= e; ++t) {
                if (e % t) continue;
                long ee = e;
                while (ee % t == 0) ee /= t;
                if (powmod_l(g, e / t, p) == 1) {
                    gen = false;
                    break;
                }
                if (ee > 1 && ee != e && powmod_l(g, e / ee, p) == 1) gen = false;
            }
            long coe = e;
            for (long t = 2; t * t <= coe; ++t)
                while (coe % t == 0) coe /= t;
            if (coe > 1 && powmod_l(g, e / coe, p) == 1) gen = false;
            if (gen) break;
        }
        long ord = (p - 1) / q;
        std::map<long, long> dlog;  // chi-values g^(ord*k) -> k
        for (long k = 0; k < q; ++k) dlog[powmod_l(g, ord * k % (p - 1), p)] = k;
        std::vector<std::vector<long>> M;
        bool bad = false;
        for (const auto& u : units) {
            std::vector<long> row;
            for (const auto& e2 : embs) {
                long v;
                try {
                    v = eval_mod_p(u, e2);
                } catch (...) {
                    bad = true;
                    break;
                }
                if (v == 0) {
                    bad = true;
                    break;
                }
                long cv = powmod_l(v, ord, p);
                auto it = dlog.find(cv);
                if (it == dlog.end()) {
                    bad = true;
                    break;
                }
                row.push_back(it->second);
            }
            if (bad) break;
            M.push_back(row);
        }
        if (bad) continue;
        // rank over F_q
        long rank = 0;
        std::size_t rows = M.size(), cols = M[0].size();
        std::size_t r = 0;
        for (std::size_t c = 0; c < cols && r < rows; ++c) {
            std::size_t piv = rows;
            for (std::size_t i = r; i < rows; ++i)
                if (M[i][c] % q != 0) {
                    piv = i;
                    break;
                }
            if (piv == rows) continue;
            std::swap(M[r], M[piv]);
            long inv = 1;
            for (long t = 1; t < q; ++t)
                if (M[r][c] * t % q == 1) inv = t;
            for (std::size_t i = 0; i < rows; ++i) {
                if (i == r) continue;
                long f = M[i][c] * inv % q;
                for (std::size_t j = 0; j < cols; ++j)
                    M[i][j] = ((M[i][j] - f * M[r][j]) % q + q) % q;
            }
            ++r;
            ++rank;
        }
        return rank;
    }
    throw std::runtime_error("char_rank: no usable prime found");
}

// certify that no nontrivial product of the units modulo cubes is a global
// cube, using cubic residue characters at many split primes
bool certify_3_saturated(const std::vector<SexticElem>& units, long d, int& primes_used) {
    std::size_t n = units.size();
    std::vector<std::vector<long>> classes;  // exponent vectors mod 3, nonzero, up to inverse
    std::vector<long> v(n, 0);
    while (true) {
        std::size_t i = 0;
        while (i < n && v[i] == 2) v[i++] = 0;
        if (i == n) break;
        ++v[i];
        // canonical representative of {v, 2v}
        std::size_t lead = 0;
        while (lead < n && v[lead] == 0) ++lead;
        if (lead < n && v[lead] == 1) classes.push_back(v);
    }
    std::vector<bool> killed(classes.size(), false);
    long remaining = static_cast<long>(classes.size());
    primes_used = 0;
    for (long p = 1000; p < 3000000 && remaining > 0; ++p) {
        bool prime = true;
        for (long t = 2; t * t <= p; ++t)
            if (p % t == 0) {
                prime = false;
                break;
            }
        if (!prime || (p - 1) % 3 != 0) continue;
        auto embs = embeddings_mod_p(p, d);
        if (embs.size() != 6) continue;
        ++primes_used;
        long ord = (p - 1) / 3;
        // cubic character exponents of every unit at every embedding
        std::vector<std::vector<long>> chi(n, std::vector<long>(6));
        bool bad = false;
        long w = 0;  // a primitive cube root of unity mod p: g^ord
        {
            long g = 2;
            while (true) {
                long c = powmod_l(g, ord, p);
                if (c != 1) {
                    w = c;
                    break;
                }
                ++g;
            }
        }
        for (std::size_t i = 0; i < n && !bad; ++i)
            for (std::size_t j = 0; j < 6; ++j) {
                long val;
                try {
                    val = eval_mod_p(units[i], embs[j]);
                } catch (...) {
                    bad = true;
                    break;
                }
                if (val == 0) {
                    bad = true;
                    break;
                }
                long c = powmod_l(val, ord, p);
                if (c == 1)
                    chi[i][j] = 0;
                else if (c == w)
                    chi[i][j] = 1;
                else
                    chi[i][j] = 2;
            }
        if (bad) continue;
        for (std::size_t k = 0; k < classes.size(); ++k) {
            if (killed[k]) continue;
            for (std::size_t j = 0; j < 6; ++j) {
                long s = 0;
                for (std::size_t i = 0; i < n; ++i) s += classes[k][i] * chi[i][j];
                if (s % 3 != 0) {
                    killed[k] = true;
                    --remaining;
                    break;
                }
            }
        }
        if (primes_used > 4000) break;
    }
    return remaining == 0;
}

// ---------------------------------------------------------------- modes

int gen257(const std::string& out_path) {
    const long d = 257;
    Poly phi = cyclotomic_2313();
    auto H = fixing_subgroup();
    std::fprintf(stderr, "fixing subgroup size %zu (expect 256)\n", H.size());
    if (H.size() != 256) return 1;

    // basis polynomials reduced mod phi
    Poly th = theta_poly();
    Poly gs = gauss_poly();
    std::vector<Poly> basis;
    Poly one(kF, 0);
    one[0] = 1;
    Poly th2 = cyclic_mul(th, th);
    basis = {one, th, th2, gs, cyclic_mul(th, gs), cyclic_mul(th2, gs)};
    std::vector<Poly> basis_red;
    for (auto& b : basis) basis_red.push_back(poly_mod(b, phi));
    // sanity: the Gauss sum squares to 257
    {
        Poly g2 = poly_mod(cyclic_mul(gs, gs), phi);
        if (g2[0] != 257) throw std::logic_error("gauss sum: g^2 != 257");
        for (std::size_t i = 1; i < g2.size(); ++i)
            if (g2[i] != 0) throw std::logic_error("gauss sum: g^2 not rational");
    }

    SexticUnitData data;
    data.basis = "1,theta,theta2 x 1,sqrtd";
    QuadField K = QuadField::init(mpz_class(d));
    QuadElem eps = K.fund_unit();
    data.units.push_back(
        SexticElem::from_quad(mpq_class(eps.a, eps.den), mpq_class(eps.b, eps.den)));
    data.units.push_back(SexticElem::theta());  // N(theta) = -1
    {
        SexticElem tm1 = SexticElem::theta();
        tm1.c[0][0] -= 1;
        data.units.push_back(tm1);  // theta - 1
    }
    // two genuinely sextic circular units
    std::vector<long> params = {1, 2, 4, 5, 7, 11};
    std::size_t got = 0;
    for (long a : params) {
        if (got == 2) break;
        Poly up = circular_unit_poly(a, H);
        auto coords = recognize(up, phi, basis_red);
        SexticElem u = elem_from_coords(coords);
        mpq_class an = absolute_norm(u, d);
        if (an != 1 && an != -1) {
            std::fprintf(stderr, "circular a=%ld: |N| = %s, skipped\n", a,
                         an.get_str().c_str());
            continue;
        }
        std::vector<SexticElem> trial = data.units;
        trial.push_back(u);
        long rank = char_rank(trial, d, 5);
        std::fprintf(stderr, "circular a=%ld: rank %ld with %zu units\n", a, rank, trial.size());
        if (rank == static_cast<long>(trial.size())) {
            data.units.push_back(u);
            ++got;
        }
    }
    if (got != 2) {
        std::fprintf(stderr, "could not find two independent circular units\n");
        return 1;
    }
    {
        SexticElem twomt = SexticElem::one();
        twomt.c[0][0] = 2;
        twomt.c[1][0] = -1;
        data.units.push_back(twomt);  // 2 - theta, generator of the prime above 3
    }

    long rank = char_rank(data.units, d, 5);
    std::fprintf(stderr, "final rank certificate: %ld / %zu\n", rank, data.units.size());
    if (rank != 6) return 1;
    int primes_used = 0;
    bool saturated = certify_3_saturated(data.units, d, primes_used);
    std::fprintf(stderr, "3-saturation: %s (%d primes)\n", saturated ? "certified" : "OPEN",
                 primes_used);

    NormIndexReport rep = norm_index(data, d);
    std::fprintf(stderr, "norm lattice index: %llu (divisible by 3: %s)\n", rep.index,
                 rep.divisible_by_3 ? "yes" : "no");

    data.provenance =
        "generated by seo_dataset_tool gen257: epsilon = 16+sqrt(257); theta and theta-1 "
        "(cyclotomic units of Q(zeta_9)+); two circular units N_{Q(zeta_2313)/k1}(1-zeta^a) "
        "computed by exact polynomial arithmetic mod the 2313th cyclotomic polynomial; "
        "2-theta generates the prime above 3. Multiplicative independence certified by "
        "quintic residue characters (rank 6); 3-saturation " +
        std::string(saturated ? "certified" : "not certified") +
        " by cubic residue characters at " + std::to_string(primes_used) +
        " split primes. Validated against the theta-basis norm route on load.";

    std::ofstream out(out_path);
    out << units_to_json(data) << "\n";
    std::fprintf(stderr, "wrote %s\n", out_path.c_str());
    return 0;
}

// negative-control search: a small element of k1 = Q(sqrt d, theta) whose
// relative norm realizes the fundamental unit (up to a 3-power), which can
// only happen when the tower carries no norm obstruction
int control(long d, const std::string& out_path) {
    QuadField K = QuadField::init(mpz_class(d));
    bool half = ((d % 4) + 4) % 4 == 1;
    long L = 3;
    std::vector<SexticElem> found;
    std::vector<std::pair<long, long>> found_ab;
    long den = half ? 2 : 1;
    std::vector<long> range;
    for (long t = -L; t <= L; ++t) range.push_back(t);
    SexticUnitData probe;
    probe.basis = "1,theta,theta2 x 1,sqrtd";
    long count = 0;
    for (long a0 : range)
        for (long b0 : range)
            for (long a1 : range)
                for (long b1 : range)
                    for (long a2 : range)
                        for (long b2 : range) {
                            if (half && (((a0 - b0) | (a1 - b1) | (a2 - b2)) & 1)) continue;
                            SexticElem u;
                            u.c[0][0] = mpq_class(a0, den);
                            u.c[0][1] = mpq_class(b0, den);
                            u.c[1][0] = mpq_class(a1, den);
                            u.c[1][1] = mpq_class(b1, den);
                            u.c[2][0] = mpq_class(a2, den);
                            u.c[2][1] = mpq_class(b2, den);
                            mpq_class an = absolute_norm(u, d);
                            if (an == 0) continue;
                            mpz_class num = abs(an.get_num()), dn = an.get_den();
                            long v3 = 0;
                            while (num % 3 == 0) {
                                num /= 3;
                                ++v3;
                            }
                            while (dn % 3 == 0) {
                                dn /= 3;
                                --v3;
                            }
                            if (num != 1 || dn != 1 || v3 % 2) continue;
                            // decompose the relative norm
                            SexticUnitData one;
                            one.basis = probe.basis;
                            one.units = {u};
                            try {
                                NormIndexReport r = norm_index(one, d);
                                long a = r.entries[0].a, b = r.entries[0].b;
                                if (a % 3 != 0) {
                                    ++count;
                                    if (found.size() < 2 &&
                                        (found_ab.empty() || found_ab[0] != std::make_pair(a, b))) {
                                        found.push_back(u);
                                        found_ab.push_back({a, b});
                                        std::fprintf(stderr,
                                                     "found: N = +-eps^%ld * 3^%ld (entry %zu)\n",
                                                     a, b, found.size());
                                    }
                                }
                            } catch (...) {
                            }
                            if (found.size() >= 1 && count > 4) goto done;
                        }
done:
    if (found.empty()) {
        std::fprintf(stderr, "no control element found for d=%ld in the box\n", d);
        return 1;
    }
    SexticUnitData data;
    data.basis = probe.basis;
    data.units.push_back(found[0]);
    {
        SexticElem twomt;
        twomt.c[0][0] = 2;
        twomt.c[1][0] = -1;
        data.units.push_back(twomt);
    }
    data.provenance =
        "synthetic negative control over Q(sqrt(" + std::to_string(d) +
        ")): the first entry's relative norm realizes the fundamental unit itself (up to a "
        "3-power), so the norm lattice has index prime to 3 and the verifier must flag the "
        "refutation-failure path; found by bounded box search with exact norms.";
    std::ofstream out(out_path);
    out << units_to_json(data) << "\n";
    NormIndexReport rep = norm_index(data, d);
    std::fprintf(stderr, "control dataset: rank %ld index %llu verdict %s\n", rep.rank,
                 rep.index, rep.verdict.c_str());
    std::fprintf(stderr, "wrote %s\n", out_path.c_str());
    return 0;
}

int verify(const std::string& path, long d) {
    SexticUnitData data = load_units_file(path);
    NormIndexReport rep = norm_index(data, d);
    std::printf("%s\n", norm_index_to_json(rep).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: seo_dataset_tool gen257|control|verify ...\n");
        return 2;
    }
    std::string mode = argv[1];
    try {
        if (mode == "gen257" && argc == 3) return gen257(argv[2]);
        if (mode == "control" && argc == 4) return control(std::stol(argv[2]), argv[3]);
        if (mode == "verify" && argc == 4) return verify(argv[2], std::stol(argv[3]));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    std::fprintf(stderr, "usage: seo_dataset_tool gen257 <out> | control <d> <out> | verify "
                         "<file> <d>\n");
    return 2;
}
