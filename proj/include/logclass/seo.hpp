#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "logclass/quadfield.hpp"

namespace logclass {

// First layer of the cyclotomic Z_3-tower over a real quadratic base:
// k1 = k(theta) with theta = 2 cos(2 pi/9), minimal polynomial x^3 - 3x + 1,
// and sigma: theta -> theta^2 - 2 generating Gal(k1/k).
struct CyclicCubicLayer {
    long d = 257;
    static const long minpoly_c0 = 1;   // x^3 - 3x + 1
    static const long minpoly_c1 = -3;
};

// Element of k1 as sum over i < 3 of (a_i + b_i sqrt(d)) theta^i, exact
// rational coefficients c[i][0] + c[i][1] sqrt(d).
struct SexticElem {
    mpq_class c[3][2];

    static SexticElem zero();
    static SexticElem one();
    static SexticElem theta();
    static SexticElem from_quad(const mpq_class& a, const mpq_class& b);
    bool operator==(const SexticElem& o) const;
};

// a + b sqrt(d) with rational coordinates
struct QQuad {
    mpq_class a, b;
    bool operator==(const QQuad& o) const { return a == o.a && b == o.b; }
};

SexticElem sextic_add(const SexticElem& x, const SexticElem& y);
SexticElem sextic_mul(const SexticElem& x, const SexticElem& y, long d);
SexticElem sextic_sigma(const SexticElem& x);
// x * sigma(x) * sigma^2(x); throws std::logic_error if the theta-coordinates
// fail to vanish after reduction
QQuad relative_norm(const SexticElem& x, long d);
// norm of x down to Q (through the quadratic field)
mpq_class absolute_norm(const SexticElem& x, long d);

struct SexticUnitData {
    std::string basis;  // "1,theta,theta2 x 1,sqrtd"
    std::vector<SexticElem> units;
    std::string provenance;
};

SexticUnitData load_units(const std::string& json_text);
SexticUnitData load_units_file(const std::string& path);
std::string units_to_json(const SexticUnitData& data);

// Certifies that x (default: the fundamental unit) is a logarithmic unit of
// Q(sqrt d) at ell = 3: zero classical valuations away from 3 and an exact
// ell-power global norm at the inert place above 3.  Requires d = 2 mod 3.
bool verify_log_unit(long d, long ell);
bool verify_log_unit(long d, long ell, const QuadRat& x);

struct NormIndexEntry {
    long a = 0;  // exponent of the fundamental unit
    long b = 0;  // exponent of 3
    bool sign = false;  // true when the norm is -eps^a 3^b
};

struct NormIndexReport {
    std::vector<NormIndexEntry> entries;
    long rank = 0;
    unsigned long long index = 0;  // lattice index in Z^2 (0 when rank < 2)
    bool divisible_by_3 = false;
    std::string verdict;
    std::vector<std::string> warnings;
};

// Writes each relative norm as +-3^b eps^a, then returns the index of the
// lattice spanned by the (a, b) in Z^2.  3 | index reproduces the norm
// obstruction; an index prime to 3 flags the refutation-failure path; rank
// < 2 is reported as an incomplete lattice.
NormIndexReport norm_index(const SexticUnitData& data, long d);

std::string norm_index_to_json(const NormIndexReport& r);

}  // namespace logclass
