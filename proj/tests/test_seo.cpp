#include "doctest.h"

#include <cstdlib>
#include <fstream>

#include "logclass/seo.hpp"
#include "support/oracles.hpp"

using namespace logclass;

namespace {

std::string data_dir() {
    if (const char* env = std::getenv("LOGCLASS_DATA_DIR")) return env;
    return std::string(PROJECT_DATA_DIR);
}

SexticElem theta_minus(long c) {
    SexticElem x = SexticElem::theta();
    x.c[0][0] = -c;
    return x;
}

}  // namespace

TEST_CASE("cubic layer structure: sigma has order 3 and N(theta) = -1") {
    SexticElem th = SexticElem::theta();
    SexticElem s1 = sextic_sigma(th);
    SexticElem s3 = sextic_sigma(sextic_sigma(s1));
    CHECK(s3 == th);
    // sigma(theta) = theta^2 - 2
    CHECK(s1.c[2][0] == 1);
    CHECK(s1.c[0][0] == -2);
    CHECK(s1.c[1][0] == 0);
    QQuad n = relative_norm(th, 257);
    CHECK(n.a == -1);
    CHECK(n.b == 0);
}

TEST_CASE("relative norm examples: N(theta - c) = -f(c)") {
    // f(x) = x^3 - 3x + 1; N(theta - 1) = -f(1) = 1, N(theta + 2) = -f(-2) = 1
    QQuad n1 = relative_norm(theta_minus(1), 257);
    CHECK(n1.a == 1);
    CHECK(n1.b == 0);
    SexticElem tp2 = SexticElem::theta();
    tp2.c[0][0] = 2;
    QQuad n2 = relative_norm(tp2, 257);
    CHECK(n2.a == 1);
    CHECK(n2.b == 0);
    // 2 - theta generates the prime above 3: N = f(2) = 3
    QQuad n3 = relative_norm(theta_minus(2), 257);
    // N(2 - theta) = -N(theta - 2) = f(2) = 3
    CHECK((n3.a == 3 || n3.a == -3));
    CHECK(n3.b == 0);
}

TEST_CASE("sigma invariance and multiplicativity of the relative norm") {
    oracles::Rng rng(5150);
    for (int trial = 0; trial < 40; ++trial) {
        SexticElem x, y;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 2; ++j) {
                x.c[i][j] = mpq_class(rng.uniform(-5, 5), 1 + (trial % 2));
                x.c[i][j].canonicalize();
                y.c[i][j] = mpq_class(rng.uniform(-5, 5));
            }
        mpq_class nx = absolute_norm(x, 257);
        if (nx == 0) continue;
        // N(sigma x) = N(x)
        QQuad a = relative_norm(x, 257);
        QQuad b = relative_norm(sextic_sigma(x), 257);
        CHECK(a.a == b.a);
        CHECK(a.b == b.b);
        // N(xy) = N(x) N(y)
        QQuad c = relative_norm(sextic_mul(x, y, 257), 257);
        QQuad prod{a.a * relative_norm(y, 257).a + 257 * a.b * relative_norm(y, 257).b,
                   a.a * relative_norm(y, 257).b + a.b * relative_norm(y, 257).a};
        CHECK(c.a == prod.a);
        CHECK(c.b == prod.b);
    }
}

TEST_CASE("verify_log_unit") {
    // the fundamental unit of Q(sqrt 257) is a logarithmic unit at 3
    CHECK(verify_log_unit(257, 3));
    QuadField K = QuadField::init(257);
    QuadElem eps = K.fund_unit();
    CHECK(verify_log_unit(257, 3, QuadRat(eps * eps)));
    // 2 is not: it has honest valuations away from 3
    CHECK(!verify_log_unit(257, 3, QuadRat(QuadElem::integer(257, 2))));
    // 3 itself is one
    CHECK(verify_log_unit(257, 3, QuadRat(QuadElem::integer(257, 3))));
    CHECK_THROWS_AS(verify_log_unit(257, 5), std::invalid_argument);
    CHECK_THROWS_AS(verify_log_unit(7, 3), std::invalid_argument);  // 7 = 1 mod 3
}

TEST_CASE("shipped dataset: loads, validates, index divisible by 3") {
    SexticUnitData data = load_units_file(data_dir() + "/seo_units_257.json");
    CHECK(data.units.size() >= 6);
    CHECK(!data.provenance.empty());
    // every entry is a 3-unit: |N| is a power of 3 (validated inside
    // norm_index as well)
    for (const auto& u : data.units) {
        mpq_class an = absolute_norm(u, 257);
        mpz_class num = abs(an.get_num()), den = an.get_den();
        while (num % 3 == 0) num /= 3;
        while (den % 3 == 0) den /= 3;
        CHECK(num == 1);
        CHECK(den == 1);
    }
    NormIndexReport rep = norm_index(data, 257);
    CHECK(rep.rank == 2);
    CHECK(rep.index == 3);
    CHECK(rep.divisible_by_3);
    CHECK(rep.verdict.find("threefold-obstruction") == 0);
    // round-trip through the serializer
    SexticUnitData again = load_units(units_to_json(data));
    CHECK(again.units.size() == data.units.size());
    NormIndexReport rep2 = norm_index(again, 257);
    CHECK(rep2.index == rep.index);
}

TEST_CASE("negative control: index 1 flags the refutation-failure path") {
    SexticUnitData data = load_units_file(data_dir() + "/seo_negative_control_5.json");
    NormIndexReport rep = norm_index(data, 5);
    CHECK(rep.rank == 2);
    CHECK(rep.index == 1);
    CHECK(!rep.divisible_by_3);
    CHECK(rep.verdict.find("no-threefold-obstruction") == 0);
}

TEST_CASE("incomplete lattice: a single 3-unit generator") {
    SexticUnitData data;
    data.basis = "1,theta,theta2 x 1,sqrtd";
    data.units.push_back(theta_minus(2));
    NormIndexReport rep = norm_index(data, 257);
    CHECK(rep.rank == 1);
    CHECK(rep.index == 0);
    REQUIRE(!rep.warnings.empty());
    bool found = false;
    for (const auto& w : rep.warnings)
        if (w.find("incomplete lattice") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("index is invariant under unimodular remixing of the generators") {
    SexticUnitData data = load_units_file(data_dir() + "/seo_units_257.json");
    oracles::Rng rng(99321);
    for (int trial = 0; trial < 3; ++trial) {
        SexticUnitData mixed = data;
        // elementary row operations on the multiplicative generating set
        for (int step = 0; step < 4; ++step) {
            std::size_t i = rng.uniform(0, mixed.units.size() - 1);
            std::size_t j = rng.uniform(0, mixed.units.size() - 1);
            if (i == j) continue;
            mixed.units[i] = sextic_mul(mixed.units[i], mixed.units[j], 257);
        }
        NormIndexReport rep = norm_index(mixed, 257);
        CHECK(rep.index == 3);
    }
}

TEST_CASE("invalid data is rejected") {
    SexticUnitData data;
    data.basis = "1,theta,theta2 x 1,sqrtd";
    SexticElem two = SexticElem::one();
    two.c[0][0] = 2;  // |N| = 64, not a 3-unit
    data.units.push_back(two);
    CHECK_THROWS_AS(norm_index(data, 257), std::invalid_argument);
    CHECK_THROWS_AS(load_units("{\"basis\": \"weird\", \"units\": []}"),
                    std::invalid_argument);
}
