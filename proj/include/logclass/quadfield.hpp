#pragma once

#include <gmpxx.h>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "logclass/intlat.hpp"
#include "logclass/padic.hpp"

namespace logclass {

// Element (a + b*sqrt(d))/den of a quadratic field; den = 2 is only legal
// when d = 1 mod 4 and a = b mod 2 (so the element is an algebraic integer
// whenever a, b are integers).
struct QuadElem {
    long d = 0;
    mpz_class a, b;
    long den = 1;

    QuadElem() = default;
    QuadElem(long d_, mpz_class a_, mpz_class b_, long den_ = 1);

    static QuadElem integer(long d, const mpz_class& n) { return QuadElem(d, n, 0, 1); }

    QuadElem conj() const { return QuadElem(d, a, -b, den); }
    QuadElem operator*(const QuadElem& o) const;
    QuadElem operator-() const { return QuadElem(d, -a, -b, den); }
    bool operator==(const QuadElem& o) const;
    mpq_class norm_q() const;   // exact rational norm
    mpz_class norm() const;     // norm, must be integral
    mpq_class trace_q() const;
    bool is_rational() const { return b == 0; }
    bool is_unit_pm1() const;  // +-1
    QuadElem pow(long e) const;  // e >= 0
    std::string str() const;
};

// Fractional element num / den_r with integral numerator.
struct QuadRat {
    QuadElem num;
    mpz_class den_r = 1;

    QuadRat() = default;
    QuadRat(QuadElem n, mpz_class dr = 1) : num(std::move(n)), den_r(std::move(dr)) {}
    static QuadRat one(long d) { return QuadRat(QuadElem::integer(d, 1)); }
    QuadRat operator*(const QuadRat& o) const;
    QuadRat conj() const { return QuadRat(num.conj(), den_r); }
    mpq_class norm_q() const;
    std::string str() const;
};

enum class SplitKind { SplitFirst, SplitSecond, Inert, Ramified };

struct PlaceTag {
    long p = 0;
    SplitKind kind = SplitKind::Inert;
    bool above_ell = false;

    bool operator==(const PlaceTag& o) const {
        return p == o.p && kind == o.kind && above_ell == o.above_ell;
    }
    std::string str() const;
};

// Primitive binary quadratic form A x^2 + B xy + C y^2.
struct Form {
    mpz_class A, B, C;
    mpz_class disc() const { return B * B - 4 * A * C; }
    bool operator==(const Form& o) const { return A == o.A && B == o.B && C == o.C; }
    bool operator<(const Form& o) const;
};

// Integral ideal c * (a Z + (b + sqrt(D))/2 Z) in standard form.
struct Ideal {
    mpz_class c = 1;  // content
    mpz_class a = 1;
    mpz_class b = 0;  // normalized into [0, 2a), b^2 = D mod 4a
    mpz_class norm() const { return c * c * a; }
};

struct FieldOptions {
    long max_abs_d = 100000;
    // bound on the y-search for real norm equations before the continued
    // fraction fallback kicks in
    unsigned long real_norm_search_bound = 200000;
};

class QuadField {
public:
    // Builds the field Q(sqrt(d)) after squarefree reduction of d.
    static QuadField init(const mpz_class& d_raw, const FieldOptions& opt = {});

    long d() const { return d_; }
    const mpz_class& disc() const { return disc_; }
    bool is_real() const { return d_ > 0; }
    int real_places() const { return d_ > 0 ? 2 : 0; }
    int complex_places() const { return d_ > 0 ? 0 : 1; }
    long torsion_order() const { return w_; }
    unsigned long h() const { return h_; }
    // invariant factors of the class group (ascending, each dividing the next)
    const std::vector<unsigned long>& class_structure() const { return class_structure_; }
    const QuadElem& fund_unit() const;
    int fund_unit_norm() const;  // +1 or -1 (real case)

    SplitKind splitting_kind(long p) const;
    // conjugate pair for split p, a single tag otherwise
    std::vector<PlaceTag> splitting(long p, long ell_context) const;

    // Canonical sqrt(d) in Z_p to m digits (p split, i.e. (disc|p) = +1).
    PadicNum canonical_root(long p, long m) const;
    // Image of x in Q_p at a split place (first: +root, second: -root),
    // to absolute precision m.  Ramified places only accept rational x.
    PadicNum embed(const QuadElem& x, const PlaceTag& place, long m) const;
    PadicNum embed(const QuadRat& x, const PlaceTag& place, long m) const;

    // Exact classical valuation of x at the given place.
    long valuation(const QuadRat& x, const PlaceTag& place) const;

    // Order h' of the class of a place above ell (ell not inert) and a
    // generator eta of l^h' with |N(eta)| = ell^h'.  The generator is
    // primitive except in the ramified non-principal case, where eta = ell
    // generates l^2.
    std::pair<unsigned long, QuadElem> prime_power_generator(long ell) const;

    // --- class-group interface (canonical reduced-form keys) ---
    Form class_identity() const;
    Form class_of_ideal(const Ideal& I) const;
    Form class_compose(const Form& x, const Form& y) const;
    unsigned long class_order(const Form& x) const;
    const std::vector<Form>& class_list() const { return classes_; }

    // --- ideals ---
    Ideal ideal_one() const;
    Ideal prime_ideal(long q, SplitKind kind) const;
    Ideal ideal_mul(const Ideal& I, const Ideal& J) const;
    Ideal ideal_pow(const Ideal& I, unsigned long e) const;
    Ideal ideal_conj(const Ideal& I) const;
    // Generator of a principal ideal; throws std::domain_error otherwise.
    QuadElem principal_generator(const Ideal& I) const;

    const FieldOptions& options() const { return opt_; }

private:
    long d_ = 0;
    mpz_class disc_;
    long w_ = 2;
    unsigned long h_ = 1;
    std::vector<unsigned long> class_structure_;
    std::optional<QuadElem> fund_unit_;
    int fund_unit_norm_ = 1;
    FieldOptions opt_;
    std::vector<Form> classes_;  // canonical keys of all classes

    Form canonicalize(Form f) const;
    friend struct QuadFieldTestAccess;
};

// squarefree part of n (sign preserved)
mpz_class squarefree_part(const mpz_class& n);

}  // namespace logclass
