#include "doctest.h"

#include "logclass/logarith.hpp"
#include "support/oracles.hpp"

using namespace logclass;

namespace {

BaseField field(long d) { return BaseField::quadratic(QuadField::init(mpz_class(d))); }

const PadicNum* coeff_at(const LogDivisor& D, const PlaceTag& t) {
    for (const auto& [p, c] : D.support)
        if (p == t) return &c;
    return nullptr;
}

}  // namespace

TEST_CASE("place_degree examples") {
    // over Q, deg 2 at ell = 3 is Log_3(2) = 24 mod 81
    BaseField Q = BaseField::rationals();
    PadicNum d2 = place_degree(Q, PlaceTag{2, SplitKind::SplitFirst, false}, 3, 4);
    CHECK(d2.residue(4) == 24);
    // the ell-place of Q has degree ell
    PadicNum dl = place_degree(Q, PlaceTag{3, SplitKind::SplitFirst, true}, 3, 4);
    CHECK(dl.val() == 1);
    CHECK(dl.unit() == 1);
    // split place above 5 in Q(sqrt(-11)): degree 5, k = 1
    BaseField K = field(-11);
    PadicNum d5 = place_degree(K, PlaceTag{5, SplitKind::SplitFirst, true}, 5, 4);
    CHECK(d5.val() == 1);
    CHECK(d5.unit() == 1);
    // computed exponent k_p = 1 in all three splitting types for odd ell
    CHECK(ell_place_exponent(field(-11), PlaceTag{5, SplitKind::SplitFirst, true}, 5) == 1);
    CHECK(ell_place_exponent(field(-31), PlaceTag{3, SplitKind::Inert, true}, 3) == 1);
    CHECK(ell_place_exponent(field(-3), PlaceTag{3, SplitKind::Ramified, true}, 3) == 1);
    // 2-adic: deg = 4 over Q and at split places
    CHECK(ell_place_exponent(Q, PlaceTag{2, SplitKind::SplitFirst, true}, 2) == 2);
    CHECK(ell_place_exponent(field(-31), PlaceTag{2, SplitKind::SplitFirst, true}, 2) == 2);
}

TEST_CASE("log_valuation examples") {
    // nu of 3 at the inert place above 3 in Q(sqrt(-31)) is 0
    BaseField K31 = field(-31);
    PadicNum nu3 = log_valuation(K31, QuadRat(QuadElem::integer(-31, 3)),
                                 PlaceTag{3, SplitKind::Inert, true}, 3, 4);
    CHECK(nu3.is_zero());
    // nu of eta at split-first above 5 in Q(sqrt(-11)): = 0 mod 5, != 0 mod 25
    BaseField K11 = field(-11);
    QuadElem eta(-11, 3, 1, 2);
    PadicNum nu = log_valuation(K11, QuadRat(eta), PlaceTag{5, SplitKind::SplitFirst, true}, 5, 4);
    CHECK(!nu.is_zero());
    CHECK(nu.val() == 1);
    // tame places give the classical valuation
    PadicNum v2 = log_valuation(K11, QuadRat(QuadElem::integer(-11, 20)),
                                PlaceTag{2, SplitKind::Inert, false}, 5, 4);
    CHECK(v2.residue(3) == 2);
    // and over Q as well
    BaseField Q = BaseField::rationals();
    PadicNum v8 = log_valuation(Q, QuadRat(QuadElem::integer(5, 8)),
                                PlaceTag{2, SplitKind::SplitFirst, false}, 3, 4);
    CHECK(v8.residue(3) == 3);
}

TEST_CASE("log_divisor worked example for d = -31, ell = 3") {
    BaseField K = field(-31);
    std::vector<PlaceTag> S{PlaceTag{3, SplitKind::Inert, true},
                            PlaceTag{2, SplitKind::SplitFirst, false},
                            PlaceTag{2, SplitKind::SplitSecond, false}};
    // ell itself is a logarithmic unit: zero divisor
    LogDivisor Dl = log_divisor(K, QuadRat(QuadElem::integer(-31, 3)), S, 3, 4);
    CHECK(Dl.support.empty());
    CHECK(Dl.degree.is_zero());

    // alpha = (1+sqrt(-31))/2: divisor (-Log(8)/3) l3 + 3 q2, no q2bar term
    QuadElem alpha(-31, 1, 1, 2);
    LogDivisor Da = log_divisor(K, QuadRat(alpha), S, 3, 4);
    CHECK(Da.degree.is_zero());
    const PadicNum* c_l3 = coeff_at(Da, S[0]);
    const PadicNum* c_q2 = coeff_at(Da, S[1]);
    CHECK(coeff_at(Da, S[2]) == nullptr);
    REQUIRE(c_l3 != nullptr);
    REQUIRE(c_q2 != nullptr);
    CHECK(c_q2->residue(3) == 3);
    // -Log_3(8)/3 = -Log_3(2): Log_3(2) = 24 mod 81, so the coefficient is
    // -24 = 3 mod 27
    CHECK(c_l3->residue(3) == 3);

    // x = 2: coefficients (-Log(4)/3, 1, 1); the degree -48 + 24 + 24 = 0
    LogDivisor D2 = log_divisor(K, QuadRat(QuadElem::integer(-31, 2)), S, 3, 4);
    CHECK(D2.degree.is_zero());
    CHECK(coeff_at(D2, S[1])->residue(3) == 1);
    CHECK(coeff_at(D2, S[2])->residue(3) == 1);
    // -16 = 11 mod 27
    CHECK(coeff_at(D2, S[0])->residue(3) == 11);

    // non-S-units are rejected
    CHECK_THROWS_AS(log_divisor(K, QuadRat(QuadElem::integer(-31, 5)), S, 3, 4),
                    std::invalid_argument);
}

TEST_CASE("log_class_group known answers") {
    ClassGroupOptions opt;
    // (d=-11, ell=5): cyclic of order 5
    LogClassGroup g1 = log_class_group(field(-11), 5, opt);
    CHECK(g1.stable);
    CHECK(g1.invariants == std::vector<long>{1});
    CHECK(g1.order() == 5);
    // (d=-3, ell=7): trivial
    LogClassGroup g2 = log_class_group(field(-3), 7, opt);
    CHECK(g2.stable);
    CHECK(g2.trivial());
    // (Q, ell): trivial
    for (long ell : {2L, 3L, 5L, 13L}) {
        LogClassGroup gq = log_class_group(BaseField::rationals(), ell, opt);
        CHECK(gq.stable);
        CHECK(gq.trivial());
    }
    // (d=-31, ell=3): order 3 through the full lattice path (ell | h)
    LogClassGroup g3 = log_class_group(field(-31), 3, opt);
    CHECK(g3.stable);
    CHECK(g3.invariants == std::vector<long>{1});
    // (d=-3, ell=13): nontrivial (first entry of the known list)
    LogClassGroup g4 = log_class_group(field(-3), 13, opt);
    CHECK(g4.stable);
    CHECK(g4.invariants == std::vector<long>{1});
}

TEST_CASE("d=257 at ell=3: order 3, forced by the class group") {
    LogClassGroup g = log_class_group(field(257), 3, {});
    CHECK(g.stable);
    CHECK(g.invariants == std::vector<long>{1});
}

TEST_CASE("fast path agrees with the full lattice path") {
    for (auto [d, ell] : std::vector<std::pair<long, long>>{
             {-11, 5}, {-3, 13}, {-3, 7}, {-1, 5}, {-7, 11}, {13, 3}, {-5, 3}, {-13, 7}}) {
        ClassGroupOptions fast, full;
        full.force_full = true;
        LogClassGroup a = log_class_group(field(d), ell, fast);
        LogClassGroup b = log_class_group(field(d), ell, full);
        CHECK(a.stable);
        CHECK(b.stable);
        CHECK(a.invariants == b.invariants);
    }
}

TEST_CASE("convention-unit invariance") {
    for (auto [d, ell] : std::vector<std::pair<long, long>>{{-31, 3}, {-11, 5}, {-3, 13}}) {
        ClassGroupOptions plain, perturbed;
        perturbed.conv.unit_seed = 12345;
        perturbed.force_full = true;  // make sure auxiliary places participate
        LogClassGroup a = log_class_group(field(d), ell, plain);
        LogClassGroup b = log_class_group(field(d), ell, perturbed);
        CHECK(a.stable);
        CHECK(b.stable);
        CHECK(a.invariants == b.invariants);
    }
}

TEST_CASE("is_log_principal and the CSL annotation") {
    PrincipalityReport r1 = is_log_principal(field(-3), 3, {});
    CHECK(r1.principal);
    REQUIRE(r1.annotations.size() == 1);
    CHECK(r1.annotations[0].find("Gross-Kuz'min and Leopoldt") != std::string::npos);
    PrincipalityReport r2 = is_log_principal(field(-11), 5, {});
    CHECK(!r2.principal);
    PrincipalityReport r3 = is_log_principal(BaseField::rationals(), 5, {});
    CHECK(r3.principal);
    CHECK(r3.annotations.empty());
}

TEST_CASE("log_unit_certificate examples") {
    // (d=-11, ell=5): rank 1 = r + c
    LogUnitCertificate c1 = log_unit_certificate(field(-11), 5, {});
    CHECK(c1.rank_logunits == 1);
    CHECK(c1.delta_G_zero_certified);
    // (d=13, ell=3, split): rank 2, naive rank 1 certified
    LogUnitCertificate c2 = log_unit_certificate(field(13), 3, {});
    CHECK(c2.rank_logunits == 2);
    REQUIRE(c2.naive_rank.has_value());
    CHECK(*c2.naive_rank == 1);
    // (d=257, ell=3, inert): rank 2, logarithmic units = ell-units
    LogUnitCertificate c3 = log_unit_certificate(field(257), 3, {});
    CHECK(c3.rank_logunits == 2);
    REQUIRE(c3.naive_rank.has_value());
    CHECK(*c3.naive_rank == 2);
}

TEST_CASE("scolie rank identity on assorted fields") {
    for (auto [d, ell] : std::vector<std::pair<long, long>>{
             {-11, 5}, {-3, 13}, {-31, 3}, {-5, 3}, {13, 3}, {257, 3}, {-7, 19}}) {
        BaseField F = field(d);
        LogClassGroup g = log_class_group(F, ell, {});
        CHECK(g.stable);
        LogUnitCertificate c = log_unit_certificate(F, ell, {});
        CHECK(c.rank_logunits == F.real_places() + F.complex_places());
    }
}

TEST_CASE("product formula over random S-units") {
    oracles::Rng rng(808);
    int checked = 0;
    for (auto [d, ell] : std::vector<std::pair<long, long>>{{-31, 3}, {-11, 5}, {13, 3}}) {
        BaseField F = field(d);
        SUnitSystem sys = s_unit_system(F, ell, true);
        std::vector<QuadRat> gens = sys.generators;
        if (sys.fundamental_unit) gens.push_back(QuadRat(*sys.fundamental_unit));
        for (int trial = 0; trial < 25; ++trial) {
            QuadRat x = QuadRat::one(d);
            for (const auto& g : gens) {
                long e = rng.uniform(0, 2);
                for (long i = 0; i < e; ++i) x = x * g;
                if (rng.uniform(0, 1)) x = x * g.conj();
            }
            // log_divisor hard-asserts a zero degree internally
            LogDivisor D = log_divisor(F, x, sys.places, ell, 4);
            CHECK(D.degree.is_zero());
            ++checked;
        }
    }
    CHECK(checked == 75);
}

TEST_CASE("ell is a logarithmic unit in every field") {
    for (auto [d, ell] : std::vector<std::pair<long, long>>{
             {-31, 3}, {-11, 5}, {-3, 13}, {13, 3}, {257, 3}, {-5, 2}, {-7, 2}}) {
        BaseField F = field(d);
        std::vector<PlaceTag> S = F.K->splitting(ell, ell);
        LogDivisor D = log_divisor(F, QuadRat(QuadElem::integer(d, ell)), S, ell, 4);
        CHECK(D.support.empty());
    }
}

TEST_CASE("precision stability across the ladder") {
    for (auto [d, ell] : std::vector<std::pair<long, long>>{{-31, 3}, {-11, 5}, {-3, 13}}) {
        ClassGroupOptions lo, hi;
        hi.start_m = 8;
        LogClassGroup a = log_class_group(field(d), ell, lo);
        LogClassGroup b = log_class_group(field(d), ell, hi);
        CHECK(a.invariants == b.invariants);
    }
}

TEST_CASE("conjugation specialization of the product formula") {
    // for split ell and x: nu_1(x) deg + nu_2(x) deg + sum v_q(x) deg q = 0
    BaseField F = field(-11);
    long ell = 5;
    QuadElem x(-11, 7, 3, 1);  // norm 49 + 99 = 148 = 4 * 37
    std::vector<PlaceTag> S{PlaceTag{5, SplitKind::SplitFirst, true},
                            PlaceTag{5, SplitKind::SplitSecond, true},
                            PlaceTag{2, SplitKind::Inert, false},
                            PlaceTag{37, SplitKind::SplitFirst, false},
                            PlaceTag{37, SplitKind::SplitSecond, false}};
    LogDivisor D = log_divisor(F, QuadRat(x), S, ell, 4);
    CHECK(D.degree.is_zero());
}
