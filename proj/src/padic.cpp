#include "logclass/padic.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace logclass {

mpz_class pow_ui(long base, long exp) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), static_cast<unsigned long>(exp));
    return r;
}

mpz_class pow_mpz(const mpz_class& base, long exp) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(exp));
    return r;
}

namespace {

mpz_class mod_reduce(const mpz_class& x, const mpz_class& mod) {
    mpz_class r;
    mpz_mod(r.get_mpz_t(), x.get_mpz_t(), mod.get_mpz_t());
    return r;
}

long val_of(const mpz_class& n, long ell, long cap) {
    // valuation of n at ell, capped at `cap` (n nonzero mod ell^cap assumed checked by caller)
    mpz_class t = n;
    long v = 0;
    mpz_class q, r;
    mpz_class el(ell);
    while (v < cap) {
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), t.get_mpz_t(), el.get_mpz_t());
        if (r != 0) break;
        t = q;
        ++v;
    }
    return v;
}

mpz_class invmod(const mpz_class& a, const mpz_class& mod) {
    mpz_class r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), mod.get_mpz_t()) == 0)
        throw std::domain_error("invmod: non-invertible element");
    return r;
}

mpz_class powmod(const mpz_class& b, const mpz_class& e, const mpz_class& mod) {
    mpz_class r;
    mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), mod.get_mpz_t());
    return r;
}

}  // namespace

PadicNum PadicNum::zero(long ell, long absprec) {
    if (absprec < 0) throw std::invalid_argument("PadicNum::zero: negative precision");
    PadicNum z;
    z.ell_ = ell;
    z.zero_ = true;
    z.absprec_ = absprec;
    return z;
}

PadicNum PadicNum::from_integer(const mpz_class& n, long ell, long absprec) {
    if (absprec < 1) throw std::invalid_argument("PadicNum::from_integer: precision < 1");
    mpz_class mod = pow_ui(ell, absprec);
    mpz_class r = mod_reduce(n, mod);
    if (r == 0) return zero(ell, absprec);
    long v = val_of(r, ell, absprec);
    PadicNum x;
    x.ell_ = ell;
    x.zero_ = false;
    x.val_ = v;
    x.relprec_ = absprec - v;
    mpz_class u = r / pow_ui(ell, v);
    x.unit_ = mod_reduce(u, pow_ui(ell, x.relprec_));
    return x;
}

PadicNum PadicNum::from_rational(const mpq_class& q, long ell, long absprec) {
    if (q == 0) return zero(ell, absprec);
    mpz_class num = q.get_num(), den = q.get_den();
    long vn = val_of(num, ell, absprec + 64);
    long vd = val_of(den, ell, absprec + 64);
    long v = vn - vd;
    mpz_class un = num / pow_ui(ell, vn);
    mpz_class ud = den / pow_ui(ell, vd);
    long rp = absprec - v;
    if (rp < 1) return zero(ell, absprec);
    mpz_class mod = pow_ui(ell, rp);
    mpz_class u = mod_reduce(un * invmod(ud, mod), mod);
    return from_unit(ell, v, u, rp);
}

PadicNum PadicNum::from_unit(long ell, long val, const mpz_class& unit, long relprec) {
    if (relprec < 1) throw std::invalid_argument("PadicNum::from_unit: relprec < 1");
    mpz_class mod = pow_ui(ell, relprec);
    mpz_class u = mod_reduce(unit, mod);
    if (mpz_divisible_ui_p(u.get_mpz_t(), static_cast<unsigned long>(ell)))
        throw std::invalid_argument("PadicNum::from_unit: unit part divisible by ell");
    PadicNum x;
    x.ell_ = ell;
    x.zero_ = false;
    x.val_ = val;
    x.relprec_ = relprec;
    x.unit_ = u;
    return x;
}

long PadicNum::val() const {
    if (zero_) throw std::domain_error("PadicNum::val: certified zero has no valuation");
    return val_;
}

long PadicNum::relprec() const {
    if (zero_) throw std::domain_error("PadicNum::relprec: certified zero");
    return relprec_;
}

const mpz_class& PadicNum::unit() const {
    if (zero_) throw std::domain_error("PadicNum::unit: certified zero");
    return unit_;
}

mpz_class PadicNum::residue(long m) const {
    if (m > absprec())
        throw precision_error("PadicNum::residue: requested " + std::to_string(m) +
                              " digits, only " + std::to_string(absprec()) + " certified");
    if (zero_ || val_ >= m) return 0;
    return mod_reduce(pow_ui(ell_, val_) * unit_, pow_ui(ell_, m));
}

PadicNum PadicNum::truncated(long m) const {
    if (m >= absprec()) return *this;
    if (zero_ || val_ >= m) return zero(ell_, m);
    return from_unit(ell_, val_, unit_, m - val_);
}

PadicNum PadicNum::shifted(long k) const {
    PadicNum x = *this;
    if (zero_)
        x.absprec_ += k;
    else
        x.val_ += k;
    return x;
}

PadicNum PadicNum::operator-() const {
    if (zero_) return *this;
    return from_unit(ell_, val_, -unit_, relprec_);
}

PadicNum PadicNum::operator+(const PadicNum& o) const {
    if (ell_ != o.ell_) throw std::invalid_argument("PadicNum: mixed primes");
    long m = std::min(absprec(), o.absprec());
    if (m < 1) {
        // both operands indistinguishable from zero below one digit
        return zero(ell_, std::max<long>(m, 0));
    }
    return from_integer(residue(m) + o.residue(m), ell_, m);
}

PadicNum PadicNum::operator-(const PadicNum& o) const { return *this + (-o); }

PadicNum PadicNum::operator*(const PadicNum& o) const {
    if (ell_ != o.ell_) throw std::invalid_argument("PadicNum: mixed primes");
    if (zero_ || o.zero_) {
        long a = zero_ ? absprec_ : val_;
        long b = o.zero_ ? o.absprec_ : o.val_;
        return zero(ell_, a + b);
    }
    long rp = std::min(relprec_, o.relprec_);
    mpz_class mod = pow_ui(ell_, rp);
    return from_unit(ell_, val_ + o.val_, mod_reduce(unit_ * o.unit_, mod), rp);
}

PadicNum PadicNum::inverse() const {
    if (zero_) throw std::domain_error("PadicNum::inverse: certified zero");
    mpz_class mod = pow_ui(ell_, relprec_);
    return from_unit(ell_, -val_, invmod(unit_, mod), relprec_);
}

PadicNum PadicNum::operator/(const PadicNum& o) const { return *this * o.inverse(); }

PadicNum PadicNum::pow(long e) const {
    if (e == 0) {
        if (zero_) throw std::domain_error("PadicNum::pow: 0^0");
        return from_unit(ell_, 0, 1, relprec_);
    }
    PadicNum base = e < 0 ? inverse() : *this;
    long k = e < 0 ? -e : e;
    PadicNum acc = base;
    --k;
    PadicNum sq = base;
    while (k > 0) {
        if (k & 1) acc = acc * sq;  // NB: first loop squares below
        k >>= 1;
        if (k > 0) sq = sq * sq;
    }
    return acc;
}

bool PadicNum::agrees_with(const PadicNum& o) const {
    if (ell_ != o.ell_) return false;
    long m = std::min(absprec(), o.absprec());
    if (m <= 0) return true;
    return residue(m) == o.residue(m);
}

std::string PadicNum::str() const {
    std::ostringstream os;
    if (zero_) {
        os << "O(" << ell_ << "^" << absprec_ << ")";
    } else {
        os << ell_ << "^" << val_ << "*(" << unit_.get_str() << " + O(" << ell_ << "^"
           << relprec_ << "))";
    }
    return os.str();
}

PadicNum teichmuller(const mpz_class& a, long ell, long m) {
    if (m < 1) throw std::invalid_argument("teichmuller: precision < 1");
    if (mpz_divisible_ui_p(a.get_mpz_t(), static_cast<unsigned long>(ell)))
        throw std::invalid_argument("teichmuller: input not a unit");
    if (ell == 2) {
        mpz_class w = (m == 1 || mod_reduce(a, 4) == 1) ? mpz_class(1)
                                                        : mpz_class(pow_ui(2, m) - 1);
        return PadicNum::from_unit(2, 0, w, m);
    }
    mpz_class mod = pow_ui(ell, m);
    mpz_class x = mod_reduce(a, mod);
    mpz_class el(ell);
    for (long i = 0; i <= m + 1; ++i) {
        mpz_class y = powmod(x, el, mod);
        if (y == x) break;
        x = y;
    }
    return PadicNum::from_unit(ell, 0, x, m);
}

namespace {

// log(1 + t0) mod ell^N for an integer representative t0 of an element of
// valuation >= minval (minval >= 1; >= 2 when ell = 2).  Truncation index:
// term k of the series has valuation >= k*minval - v_ell(k), so we stop as
// soon as that bound clears N; guard digits absorb the divisions by k.
mpz_class log_principal(const mpz_class& t0, long ell, long N, long minval) {
    long kmax = 1;
    while (kmax * minval - static_cast<long>(mpz_sizeinbase(mpz_class(kmax).get_mpz_t(), 2)) < N)
        ++kmax;
    long guard = 1;
    while (pow_ui(ell, guard) < kmax + 1) ++guard;
    ++guard;
    long W = N + guard;
    mpz_class modW = pow_ui(ell, W);
    mpz_class modN = pow_ui(ell, N);
    mpz_class t = mod_reduce(t0, modW);
    mpz_class tk = 1, sum = 0;
    for (long k = 1; k <= kmax; ++k) {
        tk = mod_reduce(tk * t, modW);
        long vk = val_of(mpz_class(k), ell, W);
        mpz_class kunit = mpz_class(k) / pow_ui(ell, vk);
        // tk is divisible by ell^min(k*minval, W) as an integer; the division
        // below is exact and leaves a value correct mod ell^(W - vk) >= ell^N.
        mpz_class term = tk / pow_ui(ell, vk);
        term = mod_reduce(term * invmod(kunit, modN), modN);
        if (k % 2 == 0) term = -term;
        sum = mod_reduce(sum + term, modN);
    }
    return sum;
}

}  // namespace

PadicNum iwasawa_log(const PadicNum& x) {
    if (x.is_zero()) throw std::domain_error("iwasawa_log: zero input");
    long ell = x.ell();
    long N = x.relprec();
    if (ell == 2) {
        if (N < 3)
            throw precision_error("iwasawa_log: relprec < 3 at ell = 2 determines no digit");
        mpz_class modN = pow_ui(2, N);
        mpz_class u = x.unit();
        if (mod_reduce(u, 4) != 1) u = modN - u;  // principal-unit normalization <u> = +-u
        return PadicNum::from_integer(log_principal(u - 1, 2, N, 2), 2, N);
    }
    if (N < 2) throw precision_error("iwasawa_log: relprec < 2 determines no digit");
    mpz_class modN = pow_ui(ell, N);
    mpz_class t = powmod(x.unit(), mpz_class(ell - 1), modN) - 1;
    mpz_class lg = log_principal(t, ell, N, 1);
    lg = mod_reduce(lg * invmod(mpz_class(ell - 1), modN), modN);
    return PadicNum::from_integer(lg, ell, N);
}

PadicNum iwasawa_log_exact(const mpq_class& x, long ell, long m) {
    if (x == 0) throw std::domain_error("iwasawa_log_exact: zero input");
    long extra = (ell == 2) ? 3 : 2;
    // strip the ell-power content exactly; Log never sees it
    mpz_class num = x.get_num(), den = x.get_den();
    long cap = m + extra + 4;
    while (mpz_divisible_ui_p(num.get_mpz_t(), static_cast<unsigned long>(ell))) num /= ell;
    while (mpz_divisible_ui_p(den.get_mpz_t(), static_cast<unsigned long>(ell))) den /= ell;
    mpq_class unitpart(num, den);
    unitpart.canonicalize();
    PadicNum lifted = PadicNum::from_rational(unitpart, ell, m + extra);
    PadicNum lg = iwasawa_log(lifted);
    (void)cap;
    return lg.truncated(m);
}

std::optional<PadicNum> hensel_sqrt(const mpz_class& n, long ell, long m) {
    if (ell == 2) throw std::invalid_argument("hensel_sqrt: use sqrt_2adic for ell = 2");
    if (m < 1) throw std::invalid_argument("hensel_sqrt: precision < 1");
    if (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(ell)))
        throw std::invalid_argument("hensel_sqrt: ell divides n (strip even powers first)");
    mpz_class el(ell);
    int leg = mpz_kronecker(n.get_mpz_t(), el.get_mpz_t());
    if (leg != 1) return std::nullopt;

    // Tonelli-Shanks mod ell
    mpz_class r0;
    {
        mpz_class a = mod_reduce(n, el);
        if (ell % 4 == 3) {
            r0 = powmod(a, (el + 1) / 4, el);
        } else {
            mpz_class q = el - 1;
            long s = 0;
            while (mpz_even_p(q.get_mpz_t())) {
                q /= 2;
                ++s;
            }
            mpz_class z = 2;
            while (mpz_kronecker(z.get_mpz_t(), el.get_mpz_t()) != -1) ++z;
            mpz_class c = powmod(z, q, el);
            mpz_class t = powmod(a, q, el);
            r0 = powmod(a, (q + 1) / 2, el);
            long mm = s;
            while (t != 1) {
                mpz_class tt = t;
                long i = 0;
                while (tt != 1) {
                    tt = mod_reduce(tt * tt, el);
                    ++i;
                }
                mpz_class b = c;
                for (long j = 0; j < mm - i - 1; ++j) b = mod_reduce(b * b, el);
                r0 = mod_reduce(r0 * b, el);
                c = mod_reduce(b * b, el);
                t = mod_reduce(t * c, el);
                mm = i;
            }
        }
    }
    // pin the root whose residue mod ell is the smaller of the two
    if (r0 > el - r0) r0 = el - r0;

    // Newton lift x -> (x + n/x)/2 with doubling precision
    long prec = 1;
    mpz_class x = r0;
    while (prec < m) {
        prec = std::min(2 * prec, m);
        mpz_class mod = pow_ui(ell, prec);
        x = mod_reduce((x + mod_reduce(n, mod) * invmod(x, mod)) * invmod(mpz_class(2), mod), mod);
    }
    mpz_class mod = pow_ui(ell, m);
    if (mod_reduce(x * x - n, mod) != 0) throw std::logic_error("hensel_sqrt: lift failed");
    return PadicNum::from_unit(ell, 0, x, m);
}

std::optional<PadicNum> sqrt_2adic(const mpz_class& n, long m) {
    if (m < 1) throw std::invalid_argument("sqrt_2adic: precision < 1");
    if (mpz_even_p(n.get_mpz_t()))
        throw std::invalid_argument("sqrt_2adic: n even (strip even powers first)");
    if (mod_reduce(n, 8) != 1) return std::nullopt;
    // work a few digits above target so the Newton steps land exactly
    long W = std::max<long>(m + 3, 6);
    mpz_class mod = pow_ui(2, W);
    mpz_class x = (mod_reduce(n, 16) == 1) ? mpz_class(7) : mpz_class(3);  // x*x = n mod 16, x = 3 mod 4
    long prec = 4;
    while (prec < W) {
        // x' = (x + n/x)/2 : if x^2 = n mod 2^k then x'^2 = n mod 2^(2k-2)
        mpz_class inv = invmod(x, mod);
        x = mod_reduce(x + mod_reduce(n, mod) * inv, mod);
        assert(mpz_even_p(x.get_mpz_t()));
        x /= 2;
        x = mod_reduce(x, mod);
        prec = 2 * prec - 2;
    }
    mpz_class modm = pow_ui(2, m);
    x = mod_reduce(x, modm);
    if (m >= 2 && mod_reduce(x, 4) != 3) x = mod_reduce(modm - x, modm);  // pin r = 3 mod 4
    if (mod_reduce(x * x - n, modm) != 0) throw std::logic_error("sqrt_2adic: lift failed");
    return PadicNum::from_unit(2, 0, x, m);
}

ZmodMatrix::ZmodMatrix(long ell_, long m_, std::size_t r, std::size_t c)
    : ell(ell_), m(m_), rows(r), cols(c), a(r * c, mpz_class(0)) {}

long snf_mod_rank(const ZmodMatrix& M) {
    auto f = snf_mod(M);
    long sat = 0;
    for (const auto& x : f)
        if (x.saturated) ++sat;
    return static_cast<long>(M.cols) - sat;
}

std::vector<CyclicFactor> snf_mod(const ZmodMatrix& M) {
    if (M.m < 1) throw std::invalid_argument("snf_mod: working exponent < 1");
    const mpz_class mod = pow_ui(M.ell, M.m);
    std::size_t R = M.rows, C = M.cols;
    std::vector<mpz_class> a(R * C);
    for (std::size_t i = 0; i < R * C; ++i) a[i] = mod_reduce(M.a[i], mod);
    auto at = [&](std::size_t i, std::size_t j) -> mpz_class& { return a[i * C + j]; };

    std::vector<long> diag;
    std::size_t k = 0;  // active corner
    while (k < R && k < C) {
        // locate an entry of minimal valuation in the active block
        long best = M.m;
        std::size_t bi = k, bj = k;
        for (std::size_t i = k; i < R; ++i)
            for (std::size_t j = k; j < C; ++j) {
                if (at(i, j) == 0) continue;
                long v = val_of(at(i, j), M.ell, M.m);
                if (v < best) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        if (best >= M.m) break;  // active block is 0 in the ring
        if (bi != k)
            for (std::size_t j = 0; j < C; ++j) std::swap(at(k, j), at(bi, j));
        if (bj != k)
            for (std::size_t i = 0; i < R; ++i) std::swap(at(i, k), at(i, bj));
        // scale the pivot row so the pivot is exactly ell^best
        mpz_class u = at(k, k) / pow_ui(M.ell, best);
        mpz_class uinv = invmod(u, mod);
        for (std::size_t j = k; j < C; ++j) at(k, j) = mod_reduce(at(k, j) * uinv, mod);
        // clear the pivot column and row: every remaining entry has valuation >= best
        for (std::size_t i = k + 1; i < R; ++i) {
            if (at(i, k) == 0) continue;
            mpz_class f = at(i, k) / pow_ui(M.ell, best);
            for (std::size_t j = k; j < C; ++j)
                at(i, j) = mod_reduce(at(i, j) - f * at(k, j), mod);
        }
        for (std::size_t j = k + 1; j < C; ++j) {
            if (at(k, j) == 0) continue;
            mpz_class f = at(k, j) / pow_ui(M.ell, best);
            for (std::size_t i = k; i < R; ++i)
                at(i, j) = mod_reduce(at(i, j) - f * at(i, k), mod);
        }
        diag.push_back(best);
        ++k;
    }

    std::vector<CyclicFactor> out;
    for (long e : diag)
        if (e > 0) out.push_back({e, e >= M.m});
    // columns never reached by a pivot are undetermined ambient directions
    for (std::size_t j = k; j < C; ++j) out.push_back({M.m, true});
    std::sort(out.begin(), out.end(), [](const CyclicFactor& x, const CyclicFactor& y) {
        return x.e < y.e;
    });
    return out;
}

}  // namespace logclass
