#include "doctest.h"

#include "logclass/intlat.hpp"
#include "support/oracles.hpp"

using namespace logclass;

namespace {

IntMat from_rows(const std::vector<std::vector<long>>& rows) {
    IntMat M(0, rows.empty() ? 0 : rows[0].size());
    M.cols = rows.empty() ? 0 : rows[0].size();
    for (const auto& r : rows) {
        std::vector<mpz_class> rr(r.begin(), r.end());
        M.append_row(rr);
    }
    return M;
}

}  // namespace

TEST_CASE("row_hnf basics") {
    IntMat A = from_rows({{2, 4}, {3, 6}, {0, 5}});
    IntMat H = row_hnf(A);
    REQUIRE(H.rows == 2);
    CHECK(H.at(0, 0) == 1);  // gcd(2,3) = 1 in the first column
    // lattice membership is preserved: every original row solves in H
    for (std::size_t i = 0; i < A.rows; ++i) CHECK_NOTHROW(solve_left(H, A.row(i)));
}

TEST_CASE("right_kernel and solve_left") {
    IntMat A = from_rows({{1, 2, 3}, {2, 4, 6}});
    IntMat K = right_kernel(A);
    CHECK(K.rows == 2);
    for (std::size_t i = 0; i < K.rows; ++i) {
        mpz_class s0 = 0;
        for (std::size_t j = 0; j < 3; ++j) s0 += A.at(0, j) * K.at(i, j);
        CHECK(s0 == 0);
    }
    IntMat B = from_rows({{2, 0, 1}, {0, 3, 1}});
    std::vector<mpz_class> v{4, 3, 3};  // 2*(2,0,1) + 1*(0,3,1)
    auto x = solve_left(B, v);
    CHECK(x[0] == 2);
    CHECK(x[1] == 1);
    CHECK_THROWS_AS(solve_left(B, std::vector<mpz_class>{1, 0, 0}), std::domain_error);
}

TEST_CASE("snf_diag and quotient_structure") {
    // Z^2 / <(2,0),(0,8)> = Z/2 + Z/8
    auto d = snf_diag(from_rows({{2, 0}, {0, 8}}));
    REQUIRE(d.size() == 2);
    CHECK(d[0] == 2);
    CHECK(d[1] == 8);
    // divisibility chain: <(2,0),(0,3)> = Z/6 cyclic
    auto e = snf_diag(from_rows({{2, 0}, {0, 3}}));
    REQUIRE(e.size() == 2);
    CHECK(e[0] == 1);
    CHECK(e[1] == 6);
    auto q = quotient_structure(IntMat::identity(2), from_rows({{1, 1}, {3, 0}}));
    REQUIRE(q.size() == 1);
    CHECK(q[0] == 3);
    CHECK_THROWS_AS(quotient_structure(IntMat::identity(2), from_rows({{1, 1}})),
                    std::domain_error);
}

TEST_CASE("matpow_mod") {
    IntMat G(2, 2);
    G.at(0, 0) = 1;
    G.at(0, 1) = 1;
    G.at(1, 0) = 0;
    G.at(1, 1) = 1;
    IntMat P = matpow_mod(G, 10, mpz_class(1000));
    CHECK(P.at(0, 1) == 10);
    CHECK(P.at(0, 0) == 1);
}

TEST_CASE("random quotient structures agree with coset enumeration") {
    oracles::Rng rng(31337);
    for (int trial = 0; trial < 200; ++trial) {
        long ell = (trial % 2) ? 3 : 5;
        long m = 2;
        long M = ell * ell;
        std::vector<std::vector<long>> rows;
        int nr = static_cast<int>(rng.uniform(1, 3));
        for (int r = 0; r < nr; ++r) rows.push_back({rng.uniform(0, M - 1), rng.uniform(0, M - 1)});
        // integer quotient of Z^2 by rows plus ell^m * Z^2
        auto withmod = rows;
        withmod.push_back({M, 0});
        withmod.push_back({0, M});
        auto q = quotient_structure(IntMat::identity(2), from_rows(withmod));
        std::vector<long> exps;
        for (const auto& x : q) {
            mpz_class t = x;
            long e = 0;
            while (t % ell == 0) {
                t /= ell;
                ++e;
            }
            CHECK(t == 1);
            exps.push_back(e);
        }
        std::sort(exps.begin(), exps.end());
        auto ref = oracles::coset_structure(ell, m, rows, 2);
        CHECK(exps == ref);
    }
}
