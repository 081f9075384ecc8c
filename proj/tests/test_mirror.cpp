#include "doctest.h"

#include "logclass/mirror.hpp"
#include "support/oracles.hpp"

using namespace logclass;

TEST_CASE("mirror reflection involution") {
    CHECK(mirror_reflect(-11) == 33);
    CHECK(mirror_reflect(33) == -11);
    CHECK(mirror_reflect(3) == -1);
    CHECK(mirror_reflect(-1) == 3);
    CHECK_THROWS_AS(mirror_reflect(-3), std::invalid_argument);
    oracles::Rng rng(14);
    int done = 0;
    while (done < 20) {
        long d = rng.uniform(-80, 80);
        mpz_class sf = squarefree_part(mpz_class(d));
        if (sf == 0 || sf == 1 || sf == -3) continue;
        ++done;
        long dd = static_cast<long>(sf.get_si());
        CHECK(mirror_reflect(mirror_reflect(dd)) == dd);
    }
}

TEST_CASE("wild kernel quotients: d = -3 special path is trivial") {
    for (long i : {1L, 2L, 3L, 7L}) {
        WildKernelQuotient w = wild_kernel_quotient(-3, i);
        CHECK(w.special_path);
        CHECK(w.group.empty());
        CHECK(w.source_field == -3);
    }
}

TEST_CASE("wild kernel quotients: even and odd twists") {
    // d = -11, even twist: the 3-group of Q(sqrt -11) itself (trivial here)
    WildKernelQuotient w2 = wild_kernel_quotient(-11, 2);
    CHECK(w2.source_field == -11);
    CHECK(w2.group.empty());
    // odd twist: reflected field 33
    WildKernelQuotient w1 = wild_kernel_quotient(-11, 1);
    CHECK(w1.source_field == 33);
    CHECK_THROWS_AS(wild_kernel_quotient(-11, 0), std::invalid_argument);
    std::string js = wkq_to_json(w1);
    CHECK(js.find("\"source_field\": 33") != std::string::npos);
}

TEST_CASE("parity consistency and involution on random fields") {
    oracles::Rng rng(4096);
    int done = 0;
    while (done < 8) {
        long draw = rng.uniform(-60, 60);
        mpz_class sf = squarefree_part(mpz_class(draw));
        if (sf == 0 || sf == 1 || sf == -3) continue;
        long d = static_cast<long>(sf.get_si());
        ++done;
        WildKernelQuotient a1 = wild_kernel_quotient(d, 1);
        WildKernelQuotient a3 = wild_kernel_quotient(d, 3);
        CHECK(a1.group == a3.group);
        CHECK(a1.source_field == a3.source_field);
        WildKernelQuotient a2 = wild_kernel_quotient(d, 2);
        WildKernelQuotient a4 = wild_kernel_quotient(d, 4);
        CHECK(a2.group == a4.group);
        // the mirror's even twist sees the partner's odd twist
        long dstar = mirror_reflect(d);
        WildKernelQuotient b2 = wild_kernel_quotient(dstar, 2);
        CHECK(a1.group == b2.group);
        CHECK(a1.source_field == b2.source_field);
    }
}
