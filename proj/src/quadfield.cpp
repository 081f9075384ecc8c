#include "logclass/quadfield.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>
#include <stdexcept>

namespace logclass {

namespace {

mpz_class mod_reduce(const mpz_class& x, const mpz_class& mod) {
    mpz_class r;
    mpz_mod(r.get_mpz_t(), x.get_mpz_t(), mod.get_mpz_t());
    return r;
}

long vp(const mpz_class& n, long p) {
    if (n == 0) throw std::domain_error("vp(0)");
    mpz_class t = n, q, r;
    mpz_class pp(p);
    long v = 0;
    while (true) {
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), t.get_mpz_t(), pp.get_mpz_t());
        if (r != 0) break;
        t = q;
        ++v;
    }
    return v;
}

mpz_class isqrt(const mpz_class& n) {
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

bool perfect_square(const mpz_class& n, mpz_class& root) {
    if (n < 0) return false;
    root = isqrt(n);
    return root * root == n;
}

}  // namespace

// ---------------------------------------------------------------- QuadElem

QuadElem::QuadElem(long d_, mpz_class a_, mpz_class b_, long den_)
    : d(d_), a(std::move(a_)), b(std::move(b_)), den(den_) {
    while (den % 2 == 0 && mpz_even_p(a.get_mpz_t()) && mpz_even_p(b.get_mpz_t())) {
        a /= 2;
        b /= 2;
        den /= 2;
    }
    if (den != 1 && den != 2) throw std::invalid_argument("QuadElem: den must be 1 or 2");
    if (den == 2) {
        bool dmod4 = ((d % 4 + 4) % 4) == 1;
        if (!dmod4 || mod_reduce(a - b, 2) != 0)
            throw std::invalid_argument("QuadElem: half-coordinates need d=1 mod 4, a=b mod 2");
    }
}

QuadElem QuadElem::operator*(const QuadElem& o) const {
    if (d != o.d) throw std::invalid_argument("QuadElem: mixed fields");
    mpz_class A = a * o.a + mpz_class(d) * b * o.b;
    mpz_class B = a * o.b + b * o.a;
    long dd = den * o.den;
    // a product of algebraic integers reduces back to den 1 or 2
    while (dd % 2 == 0 && mpz_even_p(A.get_mpz_t()) && mpz_even_p(B.get_mpz_t())) {
        A /= 2;
        B /= 2;
        dd /= 2;
    }
    return QuadElem(d, A, B, dd);
}

bool QuadElem::operator==(const QuadElem& o) const {
    return d == o.d && a * o.den == o.a * den && b * o.den == o.b * den;
}

mpq_class QuadElem::norm_q() const {
    mpq_class n(a * a - mpz_class(d) * b * b, mpz_class(den) * den);
    n.canonicalize();
    return n;
}

mpz_class QuadElem::norm() const {
    mpq_class n = norm_q();
    if (n.get_den() != 1) throw std::domain_error("QuadElem::norm: not integral");
    return n.get_num();
}

mpq_class QuadElem::trace_q() const {
    mpq_class t(2 * a, den);
    t.canonicalize();
    return t;
}

bool QuadElem::is_unit_pm1() const { return b == 0 && den == 1 && (a == 1 || a == -1); }

QuadElem QuadElem::pow(long e) const {
    if (e < 0) throw std::invalid_argument("QuadElem::pow: negative exponent");
    QuadElem r = QuadElem::integer(d, 1);
    QuadElem base = *this;
    while (e > 0) {
        if (e & 1) r = r * base;
        e >>= 1;
        if (e > 0) base = base * base;
    }
    return r;
}

std::string QuadElem::str() const {
    std::ostringstream os;
    os << "(" << a.get_str() << (b >= 0 ? "+" : "") << b.get_str() << "*sqrt(" << d << "))";
    if (den != 1) os << "/" << den;
    return os.str();
}

QuadRat QuadRat::operator*(const QuadRat& o) const {
    return QuadRat(num * o.num, den_r * o.den_r);
}

mpq_class QuadRat::norm_q() const {
    mpq_class n = num.norm_q() / mpq_class(den_r * den_r);
    n.canonicalize();
    return n;
}

std::string QuadRat::str() const {
    if (den_r == 1) return num.str();
    return num.str() + "/" + den_r.get_str();
}

std::string PlaceTag::str() const {
    std::ostringstream os;
    os << p;
    switch (kind) {
        case SplitKind::SplitFirst: os << "a"; break;
        case SplitKind::SplitSecond: os << "b"; break;
        case SplitKind::Inert: os << "i"; break;
        case SplitKind::Ramified: os << "r"; break;
    }
    return os.str();
}

bool Form::operator<(const Form& o) const {
    if (A != o.A) return A < o.A;
    if (B != o.B) return B < o.B;
    return C < o.C;
}

// ------------------------------------------------------------ form helpers

namespace forms {

// positive definite reduction (D < 0, A > 0)
Form reduce_imag(Form f) {
    while (true) {
        // normalize B into (-A, A]
        mpz_class twoA = 2 * f.A;
        mpz_class r = mod_reduce(f.B + f.A, twoA) - f.A;  // r in (-A, A]
        if (r <= -f.A) r += twoA;
        if (r != f.B) {
            // B -> r via x -> x + k y keeps A, adjusts C
            f.C = f.C + ((r * r - f.B * f.B) / (4 * f.A));
            f.B = r;
        }
        if (f.A > f.C) {
            f = Form{f.C, -f.B, f.A};
            continue;
        }
        break;
    }
    if (f.A == f.C && f.B < 0) f.B = -f.B;
    if (f.B == -f.A) f.B = f.A;
    return f;
}

struct RealCtx {
    mpz_class D;
    mpz_class sq;  // floor(sqrt(D))
};

bool is_reduced_real(const RealCtx& ctx, const Form& f) {
    mpz_class absA = abs(f.A);
    if (f.B <= 0 || f.B > ctx.sq) return false;
    return 2 * absA - f.B <= ctx.sq && 2 * absA + f.B >= ctx.sq + 1;
}

// One rho step; if U is non-null it accumulates the column transformation,
// so that F_old(U * e) = F_new(e).
Form rho_real(const RealCtx& ctx, const Form& f, IntMat* U) {
    mpz_class a2 = f.C;
    mpz_class absa2 = abs(a2);
    // target window for b'
    mpz_class lo, hi;
    if (absa2 > ctx.sq) {
        lo = -absa2 + 1;
        hi = absa2;
    } else {
        lo = ctx.sq - 2 * absa2 + 1;
        hi = ctx.sq;
    }
    mpz_class twoa = 2 * absa2;
    mpz_class b2 = mod_reduce(-f.B - lo, twoa) + lo;  // b2 = -B mod 2|a2| in [lo, lo+2|a2|)
    if (b2 > hi) b2 -= twoa;                          // cannot happen, window has width 2|a2|
    mpz_class c2 = (b2 * b2 - ctx.D) / (4 * a2);
    if ((b2 * b2 - ctx.D) % (4 * a2) != 0) throw std::logic_error("rho_real: inexact step");
    if (U) {
        // form transforms under G = [[0,-1],[1,s]] with s = (B + b2)/(2C)
        mpz_class s = (f.B + b2) / (2 * f.C);
        IntMat G(2, 2);
        G.at(0, 0) = 0;
        G.at(0, 1) = -1;
        G.at(1, 0) = 1;
        G.at(1, 1) = s;
        *U = matmul(*U, G);
    }
    return Form{a2, b2, c2};
}

Form reduce_real(const RealCtx& ctx, Form f, IntMat* U) {
    long guard = 0;
    while (!is_reduced_real(ctx, f)) {
        f = rho_real(ctx, f, U);
        if (++guard > 100000) throw std::logic_error("reduce_real: no convergence");
    }
    return f;
}

std::vector<Form> cycle_real(const RealCtx& ctx, const Form& f0) {
    std::vector<Form> cyc{f0};
    Form f = rho_real(ctx, f0, nullptr);
    long guard = 0;
    while (!(f == f0)) {
        cyc.push_back(f);
        f = rho_real(ctx, f, nullptr);
        if (++guard > 2000000) throw std::logic_error("cycle_real: runaway cycle");
    }
    return cyc;
}

}  // namespace forms

// ---------------------------------------------------------------- init

mpz_class squarefree_part(const mpz_class& n) {
    if (n == 0) return 0;
    mpz_class m = abs(n), core = 1;
    for (mpz_class p = 2; p * p <= m; ++p) {
        if (m % p != 0) continue;
        int e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        if (e % 2) core *= p;
    }
    core *= m;
    return n < 0 ? -core : core;
}

QuadField QuadField::init(const mpz_class& d_raw, const FieldOptions& opt) {
    mpz_class dsf = squarefree_part(d_raw);
    if (dsf == 0 || dsf == 1) throw std::invalid_argument("QuadField: d reduces to 0 or 1");
    if (abs(dsf) > opt.max_abs_d)
        throw std::invalid_argument("QuadField: |d| beyond configured bound " +
                                    std::to_string(opt.max_abs_d));
    QuadField K;
    K.opt_ = opt;
    K.d_ = static_cast<long>(dsf.get_si());
    bool one_mod4 = ((K.d_ % 4) + 4) % 4 == 1;
    K.disc_ = one_mod4 ? mpz_class(K.d_) : mpz_class(4 * mpz_class(K.d_));
    K.w_ = (K.d_ == -1) ? 4 : (K.d_ == -3) ? 6 : 2;

    if (K.d_ > 0) {
        // fundamental unit from the automorph of the principal cycle
        forms::RealCtx ctx{K.disc_, isqrt(K.disc_)};
        mpz_class b0 = mpz_odd_p(K.disc_.get_mpz_t()) ? 1 : 0;
        Form P{1, b0, (b0 * b0 - K.disc_) / 4};
        IntMat U = IntMat::identity(2);
        Form P0 = forms::reduce_real(ctx, P, &U);
        IntMat V = IntMat::identity(2);
        Form f = forms::rho_real(ctx, P0, &V);
        long guard = 0;
        while (!(f == P0)) {
            f = forms::rho_real(ctx, f, &V);
            if (++guard > 2000000) throw std::logic_error("fund_unit: runaway cycle");
        }
        // V is the fundamental automorph of P0: V = [[(t-Bu)/2, -Cu], [Au, (t+Bu)/2]]
        mpz_class t = V.at(0, 0) + V.at(1, 1);
        mpz_class u = V.at(1, 0);  // = A * u_pell with A = P0.A
        if (P0.A == 0 || u % P0.A != 0) throw std::logic_error("fund_unit: automorph shape");
        u /= P0.A;
        if (t < 0) {
            t = -t;
            u = -u;
        }
        if (u < 0) u = -u;  // automorph or its inverse, both solve Pell
        if (t * t - K.disc_ * u * u != 4) throw std::logic_error("fund_unit: Pell check failed");
        mpz_class x;
        bool neg_norm = false;
        mpz_class yy;
        if (perfect_square(t - 2, x) && x != 0 && u % x == 0) {
            yy = u / x;
            if (x * x - K.disc_ * yy * yy == -4) neg_norm = true;
        }
        mpz_class et = neg_norm ? x : t;
        mpz_class eu = neg_norm ? yy : u;
        // (et + eu*sqrt(D))/2 in sqrt(d) coordinates
        if (one_mod4) {
            K.fund_unit_ = QuadElem(K.d_, et, eu, 2);
        } else {
            if (mpz_odd_p(et.get_mpz_t())) throw std::logic_error("fund_unit: parity");
            K.fund_unit_ = QuadElem(K.d_, et / 2, eu, 1);
        }
        K.fund_unit_norm_ = neg_norm ? -1 : 1;
        if (K.fund_unit_->norm() != K.fund_unit_norm_)
            throw std::logic_error("fund_unit: norm check failed");
    }

    // class enumeration
    std::vector<Form> reduced;
    if (K.d_ < 0) {
        mpz_class D = K.disc_;
        for (mpz_class a = 1; 3 * a * a <= -D; ++a) {
            for (mpz_class b = -a + 1; b <= a; ++b) {
                if (mod_reduce(b - D, 2) != 0) continue;
                mpz_class num = b * b - D;
                if (num % (4 * a) != 0) continue;
                mpz_class c = num / (4 * a);
                if (c < a) continue;
                if (a == c && b < 0) continue;
                reduced.push_back(Form{a, b, c});
            }
        }
        K.classes_ = reduced;
        std::sort(K.classes_.begin(), K.classes_.end());
    } else {
        forms::RealCtx ctx{K.disc_, isqrt(K.disc_)};
        std::set<Form> seen;
        std::vector<Form> canon;
        for (mpz_class b = 1; b <= ctx.sq; ++b) {
            if (mod_reduce(b - K.disc_, 2) != 0) continue;
            mpz_class t = (K.disc_ - b * b) / 4;
            for (mpz_class aa = 1; aa * aa <= t; ++aa) {
                if (t % aa != 0) continue;
                const mpz_class cof = t / aa;
                for (const mpz_class& absA : {aa, cof}) {
                    if (2 * absA - b > ctx.sq || 2 * absA + b < ctx.sq + 1) continue;
                    for (int sgn : {1, -1}) {
                        Form f{sgn * absA, b, -(t / absA) * sgn};
                        if (seen.count(f)) continue;
                        auto cyc = forms::cycle_real(ctx, f);
                        Form m = *std::min_element(cyc.begin(), cyc.end());
                        for (auto& g : cyc) seen.insert(g);
                        canon.push_back(m);
                    }
                    if (aa == t / aa) break;
                }
            }
        }
        std::sort(canon.begin(), canon.end());
        canon.erase(std::unique(canon.begin(), canon.end()), canon.end());
        // narrow classes -> wide classes when the fundamental unit has norm +1
        if (K.fund_unit_norm_ == 1) {
            std::set<Form> kept;
            std::vector<Form> wide;
            for (const auto& f : canon) {
                Form nf = forms::reduce_real(ctx, Form{-f.A, f.B, -f.C}, nullptr);
                auto cyc = forms::cycle_real(ctx, nf);
                Form m = *std::min_element(cyc.begin(), cyc.end());
                Form key = std::min(f, m);
                if (!kept.count(key)) {
                    kept.insert(key);
                    wide.push_back(key);
                }
            }
            std::sort(wide.begin(), wide.end());
            K.classes_ = wide;
        } else {
            K.classes_ = canon;
        }
    }
    K.h_ = K.classes_.size();

    // invariant factors: assemble the Sylow types from torsion counts
    std::vector<std::pair<unsigned long, std::vector<unsigned long>>> sylows;
    unsigned long hh = K.h_;
    for (unsigned long p = 2; p * p <= hh; ++p) {
        if (hh % p) continue;
        unsigned long e = 0;
        while (hh % p == 0) {
            hh /= p;
            ++e;
        }
        sylows.push_back({p, {}});
    }
    if (hh > 1) sylows.push_back({hh, {}});
    for (auto& [p, type] : sylows) {
        // N_k = #{x : x^(p^k) = 1} = p^(sum min(lambda_i, k))
        std::vector<unsigned long> logN;
        unsigned long k = 1;
        while (true) {
            unsigned long pk = 1;
            for (unsigned long i = 0; i < k; ++i) pk *= p;
            unsigned long count = 0;
            for (const auto& f : K.classes_) {
                Form x = f;
                // x^(p^k) via repeated p-th powers
                for (unsigned long i = 0; i < k; ++i) {
                    Form acc = K.class_identity();
                    Form base = x;
                    unsigned long e = p;
                    while (e) {
                        if (e & 1) acc = K.class_compose(acc, base);
                        e >>= 1;
                        if (e) base = K.class_compose(base, base);
                    }
                    x = acc;
                }
                if (x == K.class_identity()) ++count;
            }
            unsigned long lg = 0, c = count;
            while (c > 1) {
                c /= p;
                ++lg;
            }
            logN.push_back(lg);
            if (k > 1 && logN[k - 1] == logN[k - 2]) break;
            if (count == K.h_ || k > 40) break;
            ++k;
        }
        // recover the multiset of exponents lambda_i from the profile
        std::vector<unsigned long> prev{0};
        std::vector<unsigned long> diffs;
        unsigned long last = 0;
        for (unsigned long i = 0; i < logN.size(); ++i) {
            diffs.push_back(logN[i] - last);
            last = logN[i];
        }
        // diffs[k-1] = #{i : lambda_i >= k}
        for (unsigned long i = 0; i < diffs.size(); ++i) {
            unsigned long cnt = diffs[i];
            unsigned long next = (i + 1 < diffs.size()) ? diffs[i + 1] : 0;
            for (unsigned long j = 0; j < cnt - next; ++j) type.push_back(i + 1);
        }
        std::sort(type.begin(), type.end());
        (void)prev;
    }
    // combine sylow types into invariant factors d_1 | d_2 | ...
    std::size_t maxlen = 0;
    for (auto& [p, type] : sylows) maxlen = std::max(maxlen, type.size());
    std::vector<unsigned long> invf(maxlen, 1);
    for (auto& [p, type] : sylows) {
        for (std::size_t i = 0; i < type.size(); ++i) {
            unsigned long pe = 1;
            for (unsigned long j = 0; j < type[type.size() - 1 - i]; ++j) pe *= p;
            invf[maxlen - 1 - i] *= pe;
        }
    }
    K.class_structure_ = invf;
    return K;
}

const QuadElem& QuadField::fund_unit() const {
    if (!fund_unit_) throw std::domain_error("fund_unit: imaginary field");
    return *fund_unit_;
}

int QuadField::fund_unit_norm() const {
    if (!fund_unit_) throw std::domain_error("fund_unit_norm: imaginary field");
    return fund_unit_norm_;
}

SplitKind QuadField::splitting_kind(long p) const {
    mpz_class pp(p);
    int k = mpz_kronecker(disc_.get_mpz_t(), pp.get_mpz_t());
    if (k == 0) return SplitKind::Ramified;
    return k == 1 ? SplitKind::SplitFirst : SplitKind::Inert;
}

std::vector<PlaceTag> QuadField::splitting(long p, long ell_context) const {
    SplitKind k = splitting_kind(p);
    bool above = (p == ell_context);
    if (k == SplitKind::Inert) return {PlaceTag{p, SplitKind::Inert, above}};
    if (k == SplitKind::Ramified) return {PlaceTag{p, SplitKind::Ramified, above}};
    return {PlaceTag{p, SplitKind::SplitFirst, above}, PlaceTag{p, SplitKind::SplitSecond, above}};
}

PadicNum QuadField::canonical_root(long p, long m) const {
    std::optional<PadicNum> r;
    if (p == 2)
        r = sqrt_2adic(mpz_class(d_), m);
    else
        r = hensel_sqrt(mpz_class(d_), p, m);
    if (!r) throw std::domain_error("canonical_root: place not split");
    return *r;
}

namespace {

// integral coordinates (u, v) with x*den_r = u + v*omega, where omega is the
// standard integral basis generator; returns the rational denominator too.
struct OmegaCoords {
    mpz_class u, v;
    mpz_class den;  // overall rational denominator
};

OmegaCoords omega_coords(const QuadRat& x) {
    const QuadElem& n = x.num;
    bool one_mod4 = ((n.d % 4) + 4) % 4 == 1;
    OmegaCoords oc;
    oc.den = x.den_r;
    if (one_mod4) {
        if (n.den == 2) {
            oc.u = (n.a - n.b) / 2;
            oc.v = n.b;
        } else {
            oc.u = n.a - n.b;
            oc.v = 2 * n.b;
        }
    } else {
        oc.u = n.a;
        oc.v = n.b;
        if (n.den == 2) throw std::logic_error("omega_coords: den 2 with d != 1 mod 4");
    }
    return oc;
}

}  // namespace

PadicNum QuadField::embed(const QuadRat& x, const PlaceTag& place, long m) const {
    long p = place.p;
    if (place.kind == SplitKind::Inert)
        throw std::invalid_argument("embed: inert place has no Q_p-valued embedding");
    if (place.kind == SplitKind::Ramified) {
        if (x.num.b != 0)
            throw std::invalid_argument("embed: ramified completion is not Q_p");
        mpq_class v(x.num.a, mpz_class(x.num.den) * x.den_r);
        v.canonicalize();
        return PadicNum::from_rational(v, p, m);
    }
    if (x.num.a == 0 && x.num.b == 0) throw std::domain_error("embed: zero element");
    OmegaCoords oc = omega_coords(x);
    long extra = 2 * vp(oc.den, p) + 2;
    long M = m + extra;
    // omega embeds as r (d != 1 mod 4) or (1+r)/2 (d = 1 mod 4)
    bool one_mod4 = ((d_ % 4) + 4) % 4 == 1;
    PadicNum result;
    for (int attempt = 0; attempt < 6; ++attempt) {
        PadicNum r = canonical_root(p, M + 1);
        mpz_class rr = r.unit();
        if (place.kind == SplitKind::SplitSecond) rr = pow_ui(p, M + 1) - rr;
        mpz_class wemb;
        if (one_mod4) {
            mpz_class s = rr + 1;  // even for the pinned 2-adic root; odd p: exact division below
            if (p == 2) {
                wemb = s / 2;  // known mod 2^M
            } else {
                mpz_class inv2;
                mpz_class mod = pow_ui(p, M + 1);
                mpz_class two(2);
                mpz_invert(inv2.get_mpz_t(), two.get_mpz_t(), mod.get_mpz_t());
                wemb = mod_reduce(s * inv2, mod);
            }
        } else {
            wemb = rr;
        }
        PadicNum val = PadicNum::from_integer(oc.u + oc.v * wemb, p, M);
        if (oc.den != 1) {
            mpq_class dq(1, oc.den);
            dq.canonicalize();
            val = val * PadicNum::from_rational(dq, p, M);
        }
        if (!val.is_zero() && val.absprec() >= m) return val.truncated(m);
        M *= 2;
    }
    throw precision_error("embed: precision too small to separate conjugates (raise m)");
}

PadicNum QuadField::embed(const QuadElem& x, const PlaceTag& place, long m) const {
    return embed(QuadRat(x), place, m);
}

long QuadField::valuation(const QuadRat& x, const PlaceTag& place) const {
    long q = place.p;
    if (x.num.a == 0 && x.num.b == 0) throw std::domain_error("valuation: zero element");
    OmegaCoords oc = omega_coords(x);
    long e_ram = (place.kind == SplitKind::Ramified) ? 2 : 1;
    long vden = vp(oc.den, q) * e_ram;
    mpz_class u = oc.u, v = oc.v;
    if (u == 0 && v == 0) throw std::logic_error("valuation: zero coords");
    long t = 0;
    while (mpz_divisible_ui_p(u.get_mpz_t(), q) && mpz_divisible_ui_p(v.get_mpz_t(), q)) {
        u = u / q;
        v = v / q;
        ++t;
    }
    // q-primitive part y = u + v*omega
    bool one_mod4 = ((d_ % 4) + 4) % 4 == 1;
    mpz_class ny;  // N(y)
    if (one_mod4)
        ny = u * u + u * v + v * v * ((1 - mpz_class(d_)) / 4);
    else
        ny = u * u - mpz_class(d_) * v * v;
    long n = (ny == 0) ? 0 : vp(ny, q);
    long vy = 0;
    switch (place.kind) {
        case SplitKind::Inert:
            if (n % 2) throw std::logic_error("valuation: odd norm valuation at inert place");
            vy = n / 2;
            break;
        case SplitKind::Ramified:
            vy = n;
            break;
        case SplitKind::SplitFirst:
        case SplitKind::SplitSecond: {
            if (n == 0) {
                vy = 0;
                break;
            }
            PadicNum r = canonical_root(q, n + 2);
            mpz_class mod = pow_ui(q, n + 1);
            mpz_class rr = mod_reduce(r.unit(), mod);
            if (place.kind == SplitKind::SplitSecond) rr = mod - rr;
            mpz_class wemb;
            if (one_mod4) {
                if (q == 2) {
                    wemb = mod_reduce((r.unit() + 1) / 2, mod);
                    if (place.kind == SplitKind::SplitSecond) {
                        // conjugate of omega is 1 - omega
                        wemb = mod_reduce(1 - wemb, mod);
                    }
                } else {
                    mpz_class inv2;
                    mpz_class two(2);
                    mpz_invert(inv2.get_mpz_t(), two.get_mpz_t(), mod.get_mpz_t());
                    wemb = mod_reduce((1 + rr) * inv2, mod);
                }
            } else {
                wemb = rr;
            }
            mpz_class res = mod_reduce(u + v * wemb, mod);
            long e1 = (res == 0) ? n : std::min<long>(vp(res, q), n);
            vy = e1;
            // after stripping rational content exactly one conjugate has
            // positive valuation
            if (e1 != 0 && e1 != n) throw std::logic_error("valuation: conjugates not separated");
            break;
        }
    }
    return t * e_ram + vy - vden;
}

// --------------------------------------------------------------- ideals

Ideal QuadField::ideal_one() const {
    mpz_class b0 = mpz_odd_p(disc_.get_mpz_t()) ? 1 : 0;
    return Ideal{1, 1, b0};
}

Ideal QuadField::prime_ideal(long q, SplitKind kind) const {
    mpz_class D = disc_;
    mpz_class Q(q);
    if (kind == SplitKind::Inert)
        throw std::invalid_argument("prime_ideal: inert primes are the rational (q)");
    if (kind == SplitKind::Ramified) {
        for (mpz_class b = 0; b < 2 * Q; ++b) {
            if (mod_reduce(b - D, 2) != 0) continue;
            if (mod_reduce(b * b - D, 4 * Q) == 0) return Ideal{1, Q, b};
        }
        throw std::logic_error("prime_ideal: no ramified square root");
    }
    // split: pick the residue of sqrt(D) matching the pinned first embedding
    std::vector<mpz_class> candidates;
    if (q == 2) {
        candidates = {1, 3};  // D = 1 mod 8: both odd residues square to D mod 8
    } else {
        PadicNum r = canonical_root(q, 1);
        mpz_class rho = r.unit();
        if (mpz_even_p(D.get_mpz_t())) rho = mod_reduce(2 * rho, Q);  // sqrt(4d) = 2 sqrt(d)
        for (const mpz_class& base : {rho, mod_reduce(-rho, Q)}) {
            mpz_class b = base;
            if (mod_reduce(b - D, 2) != 0) b += Q;  // Q odd: adjust parity
            b = mod_reduce(b, 2 * Q);
            if (mod_reduce(b * b - D, 4 * Q) != 0)
                throw std::logic_error("prime_ideal: root construction failed");
            candidates.push_back(b);
        }
    }
    for (const mpz_class& b : candidates) {
        // (b + sqrt(D))/2 must vanish mod q under the requested embedding
        Ideal I{1, Q, b};
        QuadElem beta = ((d_ % 4 + 4) % 4 == 1) ? QuadElem(d_, b, 1, 2)
                                                : QuadElem(d_, b / 2, 1, 1);
        PlaceTag tag{q, kind, false};
        if (valuation(QuadRat(beta), tag) >= 1) return I;
    }
    throw std::logic_error("prime_ideal: no candidate matched the pinned root");
}

Ideal QuadField::ideal_mul(const Ideal& I, const Ideal& J) const {
    // work with pairs (p, q) meaning (p + q*sqrt(D))/2
    mpz_class D = disc_;
    IntMat G(4, 2);
    // columns: (sqrt coeff, rational coeff) so the HNF pivots on the sqrt part
    G.at(0, 0) = 0;
    G.at(0, 1) = 2 * I.a * J.a;
    G.at(1, 0) = I.a;
    G.at(1, 1) = I.a * J.b;
    G.at(2, 0) = J.a;
    G.at(2, 1) = J.a * I.b;
    G.at(3, 0) = (I.b + J.b) / 2;
    G.at(3, 1) = (I.b * J.b + D) / 2;
    IntMat H = row_hnf(G);
    if (H.rows != 2) throw std::logic_error("ideal_mul: degenerate product");
    mpz_class r = H.at(0, 0), mcoef = H.at(0, 1), t = H.at(1, 1);
    if (H.at(1, 0) != 0) throw std::logic_error("ideal_mul: HNF shape");
    if (t % (2 * r) != 0 || mcoef % r != 0) throw std::logic_error("ideal_mul: content shape");
    mpz_class c2 = r;
    mpz_class a2 = t / (2 * r);
    mpz_class b2 = mod_reduce(mcoef / r, 2 * a2);
    if (mod_reduce(b2 * b2 - D, 4 * a2) != 0) throw std::logic_error("ideal_mul: b^2 != D");
    Ideal R{I.c * J.c * c2, a2, b2};
    if (R.norm() != I.norm() * J.norm()) throw std::logic_error("ideal_mul: norm mismatch");
    return R;
}

Ideal QuadField::ideal_pow(const Ideal& I, unsigned long e) const {
    Ideal R = ideal_one();
    Ideal base = I;
    while (e) {
        if (e & 1) R = ideal_mul(R, base);
        e >>= 1;
        if (e) base = ideal_mul(base, base);
    }
    return R;
}

Ideal QuadField::ideal_conj(const Ideal& I) const {
    return Ideal{I.c, I.a, mod_reduce(-I.b, 2 * I.a)};
}

QuadElem QuadField::principal_generator(const Ideal& I) const {
    mpz_class D = disc_;
    auto to_elem = [&](const mpz_class& p, const mpz_class& q) {
        // (p + q*sqrt(D))/2 in sqrt(d) coordinates
        if (mpz_odd_p(D.get_mpz_t())) return QuadElem(d_, p, q, 2);
        if (mpz_odd_p(p.get_mpz_t())) throw std::logic_error("generator: parity");
        return QuadElem(d_, p / 2, q, 1);
    };
    if (d_ < 0) {
        // Lagrange-Gauss reduction of the ideal lattice under the norm form
        // Q(p, q) = (p^2 + |D| q^2)/4
        mpz_class u1p = 2 * I.a, u1q = 0, u2p = I.b, u2q = 1;
        auto Q = [&](const mpz_class& p, const mpz_class& q) -> mpz_class {
            return p * p - D * q * q;
        };
        auto B = [&](const mpz_class& p1, const mpz_class& q1, const mpz_class& p2,
                     const mpz_class& q2) -> mpz_class { return p1 * p2 - D * q1 * q2; };
        while (true) {
            if (Q(u1p, u1q) > Q(u2p, u2q)) {
                std::swap(u1p, u2p);
                std::swap(u1q, u2q);
            }
            mpz_class num = B(u1p, u1q, u2p, u2q);
            mpz_class den = Q(u1p, u1q);
            // nearest integer to num/den
            mpz_class twice = 2 * num + den;
            mpz_class den2 = 2 * den;
            mpz_class t;
            mpz_fdiv_q(t.get_mpz_t(), twice.get_mpz_t(), den2.get_mpz_t());
            if (t == 0) break;
            u2p -= t * u1p;
            u2q -= t * u1q;
        }
        mpz_class minnorm = Q(u1p, u1q) / 4;
        if (minnorm != I.a) throw std::domain_error("principal_generator: ideal not principal");
        QuadElem g = to_elem(u1p, u1q);
        return QuadElem(d_, g.a * I.c, g.b * I.c, g.den);
    }
    // real: walk the reduced cycle of the ideal's form with the transform
    // tracked; leading coefficient +-1 exhibits an element of norm +-N(I).
    forms::RealCtx ctx{D, isqrt(D)};
    mpz_class C0 = (I.b * I.b - D) / (4 * I.a);
    Form f{I.a, I.b, C0};
    IntMat U = IntMat::identity(2);
    Form g = forms::reduce_real(ctx, f, &U);
    Form start = g;
    long guard = 0;
    while (true) {
        if (abs(g.A) == 1) {
            // F_I(U e1) = g.A, so gamma = a*U00 + beta*U10 has |N| = N(I)
            mpz_class p = 2 * I.a * U.at(0, 0) + I.b * U.at(1, 0);
            mpz_class q = U.at(1, 0);
            QuadElem gen = to_elem(p, q);
            if (abs(gen.norm()) != I.a)
                throw std::logic_error("principal_generator: norm mismatch");
            return QuadElem(d_, gen.a * I.c, gen.b * I.c, gen.den);
        }
        g = forms::rho_real(ctx, g, &U);
        if (g == start) break;
        if (++guard > 2000000) throw std::logic_error("principal_generator: runaway cycle");
    }
    throw std::domain_error("principal_generator: ideal not principal");
}

// ------------------------------------------------------------ class group

Form QuadField::canonicalize(Form f) const {
    if (d_ < 0) return forms::reduce_imag(f);
    forms::RealCtx ctx{disc_, isqrt(disc_)};
    Form r = forms::reduce_real(ctx, f, nullptr);
    auto cyc = forms::cycle_real(ctx, r);
    Form m = *std::min_element(cyc.begin(), cyc.end());
    if (fund_unit_norm_ == 1) {
        Form nf = forms::reduce_real(ctx, Form{-r.A, r.B, -r.C}, nullptr);
        auto cyc2 = forms::cycle_real(ctx, nf);
        Form m2 = *std::min_element(cyc2.begin(), cyc2.end());
        m = std::min(m, m2);
    }
    return m;
}

Form QuadField::class_identity() const {
    mpz_class b0 = mpz_odd_p(disc_.get_mpz_t()) ? 1 : 0;
    return canonicalize(Form{1, b0, (b0 * b0 - disc_) / 4});
}

Form QuadField::class_of_ideal(const Ideal& I) const {
    mpz_class C = (I.b * I.b - disc_) / (4 * I.a);
    return canonicalize(Form{I.a, I.b, C});
}

Form QuadField::class_compose(const Form& x, const Form& y) const {
    // composition through ideal multiplication of representatives with
    // positive leading coefficient
    auto rep = [&](const Form& f) -> Ideal {
        Form g = f;
        if (g.A < 0) {
            // any cycle contains forms of both signs
            forms::RealCtx ctx{disc_, isqrt(disc_)};
            Form h = forms::reduce_real(ctx, g, nullptr);
            Form s = h;
            long guard = 0;
            while (h.A < 0) {
                h = forms::rho_real(ctx, h, nullptr);
                if (h == s || ++guard > 2000000)
                    throw std::logic_error("class_compose: no positive representative");
            }
            g = h;
        }
        mpz_class b = mod_reduce(g.B, 2 * g.A);
        return Ideal{1, g.A, b};
    };
    Ideal P = ideal_mul(rep(x), rep(y));
    // strip content: classes only see the primitive part
    return class_of_ideal(Ideal{1, P.a, P.b});
}

unsigned long QuadField::class_order(const Form& x) const {
    Form f = canonicalize(x);
    Form id = class_identity();
    auto powc = [&](const Form& g, unsigned long e) {
        Form acc = id, base = g;
        while (e) {
            if (e & 1) acc = class_compose(acc, base);
            e >>= 1;
            if (e) base = class_compose(base, base);
        }
        return acc;
    };
    if (!(powc(f, h_) == id)) throw std::logic_error("class_order: order does not divide h");
    unsigned long o = h_;
    unsigned long rest = h_;
    for (unsigned long p = 2; p * p <= rest; ++p) {
        if (rest % p) continue;
        while (rest % p == 0) rest /= p;
        while (o % p == 0 && powc(f, o / p) == id) o /= p;
    }
    if (rest > 1)
        while (o % rest == 0 && powc(f, o / rest) == id) o /= rest;
    return o;
}

// ------------------------------------------------- prime power generators

namespace {

// descending Euclid step sequence for x^2 + |D| y^2 = 4n given a root
// x0^2 = D mod 4n
std::optional<std::pair<mpz_class, mpz_class>> cornacchia_descend(const mpz_class& absD,
                                                                  const mpz_class& fourn,
                                                                  mpz_class a0, mpz_class b0) {
    mpz_class L = isqrt(fourn);
    mpz_class a = a0, b = b0;
    long guard = 0;
    while (b > 0) {
        if (b <= L) {
            mpz_class rem = fourn - b * b;
            if (rem >= 0 && rem % absD == 0) {
                mpz_class y2 = rem / absD, y;
                if (perfect_square(y2, y)) return std::make_pair(b, y);
            }
        }
        mpz_class r = mod_reduce(a, b);
        a = b;
        b = r;
        if (++guard > 100000) break;
    }
    return std::nullopt;
}

}  // namespace

std::pair<unsigned long, QuadElem> QuadField::prime_power_generator(long ell) const {
    SplitKind kind = splitting_kind(ell);
    if (kind == SplitKind::Inert)
        throw std::invalid_argument("prime_power_generator: ell inert");
    Ideal l = prime_ideal(ell, kind == SplitKind::Ramified ? SplitKind::Ramified
                                                           : SplitKind::SplitFirst);
    unsigned long hp = class_order(class_of_ideal(l));
    mpz_class n = pow_ui(ell, hp);
    mpz_class fourn = 4 * n;
    mpz_class absD = abs(disc_);

    auto finish = [&](const QuadElem& eta) -> std::pair<unsigned long, QuadElem> {
        if (abs(eta.norm()) != n) throw std::logic_error("prime_power_generator: norm");
        return {hp, eta};
    };

    if (d_ < 0) {
        if (kind == SplitKind::Ramified) {
            if (hp == 2) return {2, QuadElem::integer(d_, ell)};  // l^2 = (ell)
            // hp == 1: x = ell*x', ell*x'^2 + (|D|/ell)*y^2 = 4
            mpz_class dl = absD / ell;
            for (mpz_class xp = 0; ell * xp * xp <= 4; ++xp)
                for (mpz_class y = 0; ell * xp * xp + dl * y * y <= 4; ++y) {
                    if (ell * xp * xp + dl * y * y != 4 || (xp == 0 && y == 0)) continue;
                    mpz_class x = ell * xp;
                    if (mpz_odd_p(disc_.get_mpz_t()) && mod_reduce(x - y, 2) != 0) continue;
                    // (x + y*sqrt(D))/2 with D the discriminant
                    QuadElem eta = mpz_odd_p(disc_.get_mpz_t()) ? QuadElem(d_, x, y, 2)
                                                                : QuadElem(d_, x / 2, y, 1);
                    if (abs(eta.norm()) == n) return finish(eta);
                }
            throw std::logic_error("prime_power_generator: ramified search failed");
        }
        // split: modified Cornacchia for x^2 + |D| y^2 = 4 ell^hp
        std::vector<mpz_class> roots;
        {
            mpz_class modn = n;
            mpz_class r;
            if (ell == 2) {
                auto rr = sqrt_2adic(disc_, static_cast<long>(hp) + 2);
                if (!rr) throw std::logic_error("prime_power_generator: 2-adic root");
                r = rr->unit();  // sqrt of D mod 2^(hp+2)
                roots.push_back(mod_reduce(r, 4 * n));
                roots.push_back(mod_reduce(-r, 4 * n));
            } else {
                PadicNum rd = canonical_root(ell, static_cast<long>(hp));
                mpz_class rD = rd.unit();
                if (mpz_even_p(disc_.get_mpz_t())) rD = mod_reduce(2 * rD, modn);  // sqrt(4d)
                // CRT with the right parity: x0 = D mod 2
                for (const mpz_class& base : {rD, mod_reduce(-rD, modn)}) {
                    mpz_class x0 = base;
                    if (mod_reduce(x0 - disc_, 2) != 0) x0 += modn;  // modn odd: flips parity
                    x0 = mod_reduce(x0, 2 * modn);
                    roots.push_back(x0);
                }
            }
        }
        for (const mpz_class& x0 : roots) {
            auto sol = cornacchia_descend(absD, fourn, 2 * n, x0 == 0 ? 2 * n : x0);
            if (!sol) continue;
            auto [x, y] = *sol;
            QuadElem eta = mpz_odd_p(disc_.get_mpz_t())
                               ? QuadElem(d_, x, y, 2)
                               : QuadElem(d_, x / 2, y, 1);
            if (abs(eta.norm()) != n) continue;
            // primitivity: ell must not divide eta
            PlaceTag t1{ell, SplitKind::SplitFirst, true};
            PlaceTag t2{ell, SplitKind::SplitSecond, true};
            long v1 = valuation(QuadRat(eta), t1), v2 = valuation(QuadRat(eta), t2);
            if (v1 != 0 && v2 != 0) continue;
            // orient eta so its valuation sits at the first place
            if (v2 == static_cast<long>(hp)) eta = eta.conj();
            return finish(eta);
        }
        throw std::logic_error("prime_power_generator: Cornacchia found no primitive solution");
    }

    // real case: bounded search over y, continued-fraction fallback
    if (kind == SplitKind::Ramified && hp == 2) return {2, QuadElem::integer(d_, ell)};
    unsigned long ybound = opt_.real_norm_search_bound;
    for (mpz_class y = 0; y <= ybound; ++y) {
        for (int sgn : {1, -1}) {
            mpz_class x2 = disc_ * y * y + sgn * fourn;
            mpz_class x;
            if (!perfect_square(x2, x)) continue;
            if (mod_reduce(x - y * disc_, 2) != 0 && mpz_odd_p(disc_.get_mpz_t())) continue;
            if (mpz_even_p(disc_.get_mpz_t()) && mpz_odd_p(x.get_mpz_t())) continue;
            QuadElem eta = mpz_odd_p(disc_.get_mpz_t()) ? QuadElem(d_, x, y, 2)
                                                        : QuadElem(d_, x / 2, y, 1);
            if (abs(eta.norm()) != n) continue;
            if (kind != SplitKind::Ramified) {
                PlaceTag t1{ell, SplitKind::SplitFirst, true};
                PlaceTag t2{ell, SplitKind::SplitSecond, true};
                long v1 = valuation(QuadRat(eta), t1), v2 = valuation(QuadRat(eta), t2);
                if (v1 != 0 && v2 != 0) continue;
                if (v2 == static_cast<long>(hp)) eta = eta.conj();
            }
            return finish(eta);
        }
    }
    // fallback: extract a generator of l^hp from the reduced cycle
    Ideal I = ideal_pow(l, hp);
    QuadElem g = principal_generator(I);
    if (kind != SplitKind::Ramified) {
        PlaceTag t2{ell, SplitKind::SplitSecond, true};
        if (valuation(QuadRat(g), t2) == static_cast<long>(hp)) g = g.conj();
    }
    return finish(g);
}

}  // namespace logclass
