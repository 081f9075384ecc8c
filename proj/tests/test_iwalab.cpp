#include "doctest.h"

#include "logclass/iwalab.hpp"
#include "support/oracles.hpp"

using namespace logclass;

namespace {

LambdaBlock finite(long ell, long e, long c = 0) {
    LambdaBlock b;
    b.kind = LambdaBlock::Kind::Finite;
    b.ell = ell;
    b.e = e;
    b.c = c;
    return b;
}

LambdaBlock xl(long ell, long c = 1, long depth = 0) {
    LambdaBlock b;
    b.kind = LambdaBlock::Kind::XMinusEllC;
    b.ell = ell;
    b.c = c;
    b.depth = depth;
    return b;
}

LambdaBlock mu(long ell, long e = 1, long depth = 0) {
    LambdaBlock b;
    b.kind = LambdaBlock::Kind::MuProbe;
    b.ell = ell;
    b.e = e;
    b.depth = depth;
    return b;
}

LambdaBlock zt(long ell, long depth = 0) {
    LambdaBlock b;
    b.kind = LambdaBlock::Kind::ZTrivial;
    b.ell = ell;
    b.depth = depth;
    return b;
}

long order_of(const std::vector<long>& exps, long ell) {
    long o = 1;
    for (long e : exps)
        for (long i = 0; i < e; ++i) o *= ell;
    return o;
}

}  // namespace

TEST_CASE("build examples") {
    // F = Z/ell with trivial action: order ell, declared F = [1]
    FiniteLambdaModule T = build_module({finite(3, 1)});
    REQUIRE(T.declared_F.has_value());
    CHECK(*T.declared_F == std::vector<long>{1});
    CHECK(order_of(coinvariants(T, 0), 3) == 3);

    // Lambda/(X - ell) truncated: gamma acts as 1 + ell
    FiniteLambdaModule X = build_module({xl(3, 1, 6)});
    CHECK(X.gamma.at(0, 0) == 4);
    CHECK(!X.declared_F->size());

    // direct sum: declared F is additive over the finite parts
    FiniteLambdaModule S = build_module({finite(3, 1), xl(3, 1, 6)});
    CHECK(*S.declared_F == std::vector<long>{1});

    // gamma - 1 must be topologically nilpotent
    CHECK_THROWS_AS(build_module({xl(3, 3, 5)}), std::invalid_argument);  // c = 3 not a unit
}

TEST_CASE("coinvariants examples") {
    // T = Lambda/(X-ell): T_n = Z/ell^(n+1)
    FiniteLambdaModule T = build_module({xl(3, 1, 6)});
    for (long n = 0; n <= 4; ++n) CHECK(coinvariants(T, n) == std::vector<long>{n + 1});
    CHECK_THROWS_AS(coinvariants(T, 7), std::invalid_argument);  // beyond depth

    // F with trivial action: T_n = F for every n
    FiniteLambdaModule F = build_module({finite(5, 2)});
    for (long n = 0; n <= 3; ++n) CHECK(coinvariants(F, n) == std::vector<long>{2});

    // Lambda/ell at depth ell^n: order ell^(ell^n)
    FiniteLambdaModule M = build_module({mu(3, 1, 9)});
    CHECK(order_of(coinvariants(M, 1), 3) == 27);        // rank of Lambda/(3, omega_1)
    CHECK(order_of(coinvariants(M, 2), 3) == 3 * 3 * 3 * 3 * 3 * 3 * 3 * 3 * 3);
}

TEST_CASE("invariants examples") {
    // Lambda/(X-ell) truncated at m+1: ker(omega_n) = Z/ell^(n+1)
    for (long m = 2; m <= 4; ++m) {
        FiniteLambdaModule T = build_module({xl(3, 1, m + 1)});
        for (long n = 0; n < m; ++n) CHECK(invariants_at(T, n) == std::vector<long>{n + 1});
    }
    FiniteLambdaModule F = build_module({finite(5, 2)});
    CHECK(invariants_at(F, 1) == std::vector<long>{2});
    // Z_ell probe: everything is invariant
    FiniteLambdaModule Z = build_module({zt(3, 5)});
    CHECK(Z.infinite_invariants_probe);
    CHECK(invariants_at(Z, 2) == std::vector<long>{5});
}

TEST_CASE("herbrand: |coinvariants| = |invariants| on finite modules") {
    oracles::Rng rng(606);
    for (int trial = 0; trial < 30; ++trial) {
        long ell = (trial % 2) ? 3 : 5;
        std::vector<LambdaBlock> blocks;
        int nb = static_cast<int>(rng.uniform(1, 3));
        for (int i = 0; i < nb; ++i) {
            if (rng.uniform(0, 1))
                blocks.push_back(finite(ell, rng.uniform(1, 3), rng.uniform(0, 2)));
            else
                blocks.push_back(xl(ell, rng.uniform(1, 2), 6));
        }
        FiniteLambdaModule T = build_module(blocks);
        for (long n = 0; n <= std::min<long>(3, T.max_level); ++n)
            CHECK(order_of(coinvariants(T, n), ell) == order_of(invariants_at(T, n), ell));
    }
}

TEST_CASE("transition functoriality and the omega expansion identity") {
    FiniteLambdaModule T = build_module({finite(3, 2, 1), xl(3, 1, 7), xl(3, 2, 7)});
    mpz_class modW = pow_ui(3, T.W);
    for (long n = 0; n <= 2; ++n)
        for (long m = n + 1; m <= 4; ++m) {
            // (omega_m/omega_n) * omega_n = omega_m as matrices mod ell^W
            IntMat N = transition_matrix(T, n, m);
            IntMat On = matadd(matpow_mod(T.gamma, pow_ui(3, n), modW),
                               matscale(IntMat::identity(T.g), -1));
            IntMat Om = matadd(matpow_mod(T.gamma, pow_ui(3, m), modW),
                               matscale(IntMat::identity(T.g), -1));
            IntMat P = matmul(N, On);
            mat_mod(P, modW);
            mat_mod(Om, modW);
            for (std::size_t i = 0; i < P.a.size(); ++i) CHECK(P.a[i] == Om.a[i]);
            for (long k = m + 1; k <= 5; ++k) {
                IntMat A = transition_matrix(T, n, k);
                IntMat B = matmul(transition_matrix(T, m, k), transition_matrix(T, n, m));
                mat_mod(A, modW);
                mat_mod(B, modW);
                for (std::size_t i = 0; i < A.a.size(); ++i) CHECK(A.a[i] == B.a[i]);
            }
        }
}

TEST_CASE("cap kernel and cokernel per-block formulas") {
    // F + Lambda/(X-ell): kernel = cokernel = F for m - n large
    FiniteLambdaModule T = build_module({finite(3, 2), xl(3, 1, 8)});
    CHECK(cap_kernel(T, 1, 4) == std::vector<long>{2});
    CHECK(cap_cokernel(T, 1, 4) == std::vector<long>{2});
    // kernel grows with m-n until it swallows F
    CHECK(cap_kernel(T, 1, 2) == std::vector<long>{1});
    // Lambda/(X-ell) alone: kernel = cokernel = 0
    FiniteLambdaModule X = build_module({xl(3, 1, 8)});
    CHECK(cap_kernel(X, 1, 4).empty());
    CHECK(cap_cokernel(X, 1, 4).empty());
}

TEST_CASE("check_cap_theorem verdicts") {
    // [F = Z/9, Lambda/(X-3)]: pass with window s = 2
    CapReport r = check_cap_theorem({finite(3, 2), xl(3)}, 1, 3);
    CHECK(r.verdict == "pass");
    CHECK(r.s == 2);
    CHECK(r.n0 >= 0);
    REQUIRE(r.declared_F.has_value());
    CHECK(*r.declared_F == std::vector<long>{2});

    // mu-positive probe: reported, never asserted
    CapReport m = check_cap_theorem({mu(3)}, 1, 2);
    CHECK(m.verdict == "mu-positive-nonstabilizing");
    CHECK(!m.window.empty());
    // kernels grow without stabilizing: compare the first and last entries
    long first = 0, last = 0;
    for (long e : m.window.front().kernel) first += e;
    for (long e : m.window.back().kernel) last += e;
    CHECK(last > first);

    // Z_ell trivial probe: cokernel claim skipped
    CapReport z = check_cap_theorem({zt(3)}, 1, 2);
    CHECK(z.verdict == "invariants-infinite-skipped");

    std::string js = cap_report_to_json(r);
    CHECK(js.find("\"verdict\": \"pass\"") != std::string::npos);
}

TEST_CASE("randomized (a)+(b) mixes satisfy the capitulation theorem") {
    oracles::Rng rng(2468);
    for (int trial = 0; trial < 8; ++trial) {
        long ell = (trial % 2) ? 3 : 5;
        std::vector<LambdaBlock> blocks;
        std::vector<long> F;
        int nf = static_cast<int>(rng.uniform(1, 2));
        for (int i = 0; i < nf; ++i) {
            long e = rng.uniform(1, 2);
            blocks.push_back(finite(ell, e, rng.uniform(0, 1)));
            F.push_back(e);
        }
        int nx = static_cast<int>(rng.uniform(1, 2));
        for (int i = 0; i < nx; ++i) blocks.push_back(xl(ell, rng.uniform(1, 2)));
        std::sort(F.begin(), F.end());
        CapReport r = check_cap_theorem(blocks, 0, 2);
        CHECK(r.verdict == "pass");
        CHECK(*r.declared_F == F);
    }
}

TEST_CASE("nakayama check") {
    CHECK(nakayama_check(build_module({finite(3, 1)})));
    CHECK(nakayama_check(build_module({finite(3, 2, 1)})));  // Z/9 with gamma = 1+3
    CHECK(nakayama_check(build_module({xl(5, 1, 5)})));
}

TEST_CASE("parse_blocks mini-language") {
    auto b = parse_blocks("F:3^2;XL:3");
    REQUIRE(b.size() == 2);
    CHECK(b[0].kind == LambdaBlock::Kind::Finite);
    CHECK(b[0].ell == 3);
    CHECK(b[0].e == 2);
    CHECK(b[1].kind == LambdaBlock::Kind::XMinusEllC);
    CHECK(b[1].c == 1);
    auto c = parse_blocks("XL:5*2@7;MU:3^2@9;ZT:3");
    REQUIRE(c.size() == 3);
    CHECK(c[0].c == 2);
    CHECK(c[0].depth == 7);
    CHECK(c[1].e == 2);
    CHECK(c[1].depth == 9);
    CHECK(c[2].kind == LambdaBlock::Kind::ZTrivial);
    CHECK_THROWS_AS(parse_blocks(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_blocks("Q:3"), std::invalid_argument);
}
