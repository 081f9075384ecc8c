#pragma once

#include <optional>
#include <string>
#include <vector>

#include "logclass/padic.hpp"
#include "logclass/quadfield.hpp"

namespace logclass {

// The base field of a computation: Q or a quadratic field.
struct BaseField {
    std::optional<QuadField> K;

    static BaseField rationals() { return BaseField{}; }
    static BaseField quadratic(QuadField k) { return BaseField{std::move(k)}; }
    bool is_rational() const { return !K.has_value(); }
    long d() const { return K ? K->d() : 0; }
    int real_places() const { return K ? K->real_places() : 1; }
    int complex_places() const { return K ? K->complex_places() : 0; }
};

// Degree normalization: deg p = Log_ell(Np) away from ell and ell^(k_p)
// above ell.  A nonzero unit_seed multiplies each deg q (q not above ell) by
// the unit 1 + ell*prf(q) and rescales the valuation there by its inverse;
// the class-group invariants must not see the difference.
struct Convention {
    std::string id = "v1";
    unsigned long unit_seed = 0;

    std::string label() const {
        return unit_seed == 0 ? id : id + "-perturbed-" + std::to_string(unit_seed);
    }
};

struct LogPlaceData {
    PlaceTag place;
    PadicNum deg;
    bool logarithmic = false;  // true for places above ell
};

struct LogDivisor {
    std::vector<std::pair<PlaceTag, PadicNum>> support;  // nonzero coefficients only
    PadicNum degree;                                     // certified zero for principal divisors
};

struct LogClassGroup {
    long ell = 0;
    std::vector<long> invariants;  // group = sum of Z/ell^e, ascending exponents
    long certified_at = 0;
    bool stable = false;
    std::string convention;

    bool trivial() const { return invariants.empty(); }
    // ell^(sum of exponents); throws on overflow (desk scale keeps this small)
    unsigned long long order() const;
};

struct LogUnitCertificate {
    int rank_logunits = 0;
    bool delta_G_zero_certified = false;
    std::optional<int> naive_rank;  // nullopt = inconclusive
    std::string note;
};

struct PrincipalityReport {
    bool principal = false;
    std::vector<std::string> annotations;
};

struct ClassGroupOptions {
    long start_m = 4;
    long step_m = 2;
    long max_m = 40;
    Convention conv;
    // exercise the general lattice machinery (with one redundant auxiliary
    // prime) even when the split fast path applies
    bool force_full = false;
};

// deg p: Log_ell(Np) for p not above ell; ell^(k_p) above ell where ell^(k_p)
// generates the ideal Log(N(R_Kp)) Z_ell (computed from generating families).
PadicNum place_degree(const BaseField& F, const PlaceTag& place, long ell, long m,
                      const Convention& conv = {});

// k_p alone (p above ell)
long ell_place_exponent(const BaseField& F, const PlaceTag& place, long ell);

// Logarithmic valuation: the classical valuation at p not above ell; above
// ell, -Log(local norm)/deg p where the local norm is the identity at split
// places and the exact global norm at inert and ramified places.
PadicNum log_valuation(const BaseField& F, const QuadRat& x, const PlaceTag& place, long ell,
                       long m, const Convention& conv = {});

// Divisor of an S-unit; the degree is asserted to vanish at the certified
// precision (a failure is an arithmetic bug, not a data condition).
LogDivisor log_divisor(const BaseField& F, const QuadRat& x, const std::vector<PlaceTag>& S,
                       long ell, long m, const Convention& conv = {});

LogClassGroup log_class_group(const BaseField& F, long ell, const ClassGroupOptions& opt = {});

PrincipalityReport is_log_principal(const BaseField& F, long ell,
                                    const ClassGroupOptions& opt = {});

LogUnitCertificate log_unit_certificate(const BaseField& F, long ell,
                                        const ClassGroupOptions& opt = {});

// The finite place set S used by the class-group lattice: all places above
// ell plus conjugate pairs over the smallest split primes whose classes
// generate the ell-part of the class group of the ell-integers.
std::vector<PlaceTag> class_group_support(const BaseField& F, long ell, bool force_extra = false);

// S-unit generators attached to that support (kernel-lattice generators plus
// the fundamental unit in the real case); exposed for tests.
struct SUnitSystem {
    std::vector<PlaceTag> places;
    std::vector<QuadRat> generators;          // valuation-carrying generators
    IntMat valuation_rows;                    // their exact valuations on `places`
    std::optional<QuadElem> fundamental_unit; // real case
};
SUnitSystem s_unit_system(const BaseField& F, long ell, bool force_extra = false);

}  // namespace logclass
