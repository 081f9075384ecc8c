#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace logclass {

// Thrown when an operation cannot certify the requested number of digits.
// Callers are expected to retry at higher working precision.
class precision_error : public std::runtime_error {
public:
    explicit precision_error(const std::string& what) : std::runtime_error(what) {}
};

mpz_class pow_ui(long base, long exp);
mpz_class pow_mpz(const mpz_class& base, long exp);

// An ell-adic number known to finite precision:
//
//     value = ell^val * (unit + O(ell^relprec)),   ell coprime to unit,
//
// so the absolute precision is val + relprec.  The certified zero
// 0 + O(ell^absprec) is a separate state: it carries an absolute precision
// but no valuation.
//
// Arithmetic follows the usual rules: multiplication adds valuations and
// takes the min of relative precisions, addition first converts both
// operands to their common absolute precision.  Values are immutable.
class PadicNum {
public:
    PadicNum() = default;

    static PadicNum zero(long ell, long absprec);
    // Truncation of an exact integer to absolute precision `absprec`.
    static PadicNum from_integer(const mpz_class& n, long ell, long absprec);
    static PadicNum from_rational(const mpq_class& q, long ell, long absprec);
    // Assembles ell^val * (unit + O(ell^relprec)); unit must be an ell-unit.
    static PadicNum from_unit(long ell, long val, const mpz_class& unit, long relprec);

    long ell() const { return ell_; }
    bool is_zero() const { return zero_; }
    long val() const;
    long relprec() const;
    long absprec() const { return zero_ ? absprec_ : val_ + relprec_; }
    const mpz_class& unit() const;

    // Representative of the value modulo ell^m; requires m <= absprec().
    mpz_class residue(long m) const;
    // Lowers the absolute precision to `m` (never raises it).
    PadicNum truncated(long m) const;
    // Multiplication by ell^k (k may be negative; valuation must stay >= the
    // caller's responsibility, no check besides the zero case).
    PadicNum shifted(long k) const;

    PadicNum operator-() const;
    PadicNum operator+(const PadicNum& o) const;
    PadicNum operator-(const PadicNum& o) const;
    PadicNum operator*(const PadicNum& o) const;
    PadicNum inverse() const;
    PadicNum operator/(const PadicNum& o) const;
    PadicNum pow(long e) const;

    // True if the two values agree on all digits certified by both.
    bool agrees_with(const PadicNum& o) const;

    std::string str() const;

private:
    long ell_ = 0;
    bool zero_ = true;
    long val_ = 0;      // valuation (nonzero state)
    long relprec_ = 0;  // relative precision of the unit part
    long absprec_ = 0;  // absolute precision (zero state only)
    mpz_class unit_;    // unit part, reduced mod ell^relprec
};

// Teichmuller lift: the unique (ell-1)-st root of unity congruent to a
// mod ell, computed to m digits.  For ell = 2 the torsion is {+-1} and the
// lift is the sign of a mod 4.
PadicNum teichmuller(const mpz_class& a, long ell, long m);

// Iwasawa logarithm, normalized so Log(ell) = 0 and Log(zeta) = 0 for roots
// of unity.  Computed on the principal-unit part as Log(u^(ell-1))/(ell-1);
// the output's absolute precision equals the input unit part's relative
// precision.  Requires relprec >= 2 (>= 3 for ell = 2, where the principal
// units are 1 + 4 Z_2 and the image has valuation >= 2).
PadicNum iwasawa_log(const PadicNum& x);

// Convenience: Iwasawa log of an exact rational, to absolute precision m.
PadicNum iwasawa_log_exact(const mpq_class& x, long ell, long m);

// Square root of n in Z_ell (ell odd, ell coprime to n) to m digits, or
// nullopt when n is a nonresidue.  The returned root is pinned by the
// convention r mod ell = min(r0, ell - r0), so refining m never flips the
// choice of root.
std::optional<PadicNum> hensel_sqrt(const mpz_class& n, long ell, long m);

// 2-adic branch: square roots of odd n exist iff n = 1 mod 8; the returned
// root is pinned to r = 3 mod 4.
std::optional<PadicNum> sqrt_2adic(const mpz_class& n, long m);

// Dense matrix over Z/ell^m, stored row-major with reduced entries.
struct ZmodMatrix {
    long ell = 0;
    long m = 1;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<mpz_class> a;

    ZmodMatrix() = default;
    ZmodMatrix(long ell_, long m_, std::size_t r, std::size_t c);
    mpz_class& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const mpz_class& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// One cyclic factor Z/ell^e of a cokernel computed at working exponent m.
// e == m only means "at least m": the factor could not be resolved at this
// precision, and `saturated` is set.
struct CyclicFactor {
    long e = 0;
    bool saturated = false;
};

// Structure of coker(row span of M inside (Z/ell^m)^cols): exponents of the
// cyclic factors, sorted ascending, trivial factors dropped.  Exponents
// equal to m are flagged as precision-saturated lower bounds, never exact
// orders; columns not covered by any pivot show up as saturated factors.
std::vector<CyclicFactor> snf_mod(const ZmodMatrix& M);

// Certified rank of M over Z_ell: the number of pivots of valuation < m.
long snf_mod_rank(const ZmodMatrix& M);

}  // namespace logclass
