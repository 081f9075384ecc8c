#pragma once

#include <optional>
#include <string>
#include <vector>

#include "logclass/intlat.hpp"

namespace logclass {

// Building blocks for truncated torsion Lambda-modules, Lambda = Z_ell[[X]]
// with gamma = 1 + X:
//   Finite      Z/ell^e with gamma = 1 + ell*c        (finite submodule)
//   XMinusEllC  Lambda/(X - ell*c) cut to Z/ell^depth (elementary divisor)
//   MuProbe     Lambda/ell^e cut at X^depth           (mu-positive probe)
//   ZTrivial    Z_ell with trivial action, cut to Z/ell^depth
struct LambdaBlock {
    enum class Kind { Finite, XMinusEllC, MuProbe, ZTrivial };
    Kind kind = Kind::Finite;
    long ell = 3;
    long e = 1;      // exponent (Finite, MuProbe)
    long c = 1;      // scalar in the gamma action (Finite: gamma = 1 + ell*c)
    long depth = 0;  // truncation depth; 0 = choose automatically

    std::string str() const;
};

struct FiniteLambdaModule {
    long ell = 3;
    long W = 1;          // module exponent bound: entries live mod ell^W
    std::size_t g = 0;   // generators
    IntMat gamma;        // right action of gamma on row vectors
    IntMat relations;    // presentation rows (block-diagonal ell-powers)
    std::optional<std::vector<long>> declared_F;  // exponents of the finite part
    long max_level = 0;  // largest usable level for n and m
    bool infinite_invariants_probe = false;
    bool mu_positive_probe = false;
    std::vector<LambdaBlock> blocks;
};

// Direct sum of blocks; validates gamma invertibility and the topological
// nilpotence of gamma - 1, and rejects inconsistent truncations.
FiniteLambdaModule build_module(const std::vector<LambdaBlock>& blocks);

// T_n = T/omega_n T as an ascending exponent list
std::vector<long> coinvariants(const FiniteLambdaModule& T, long n);
// ker(omega_n) on the built module (the truncated T_m picture)
std::vector<long> invariants_at(const FiniteLambdaModule& T, long n);
// multiplication by omega_m/omega_n = sum of gamma^(i*ell^n), i < ell^(m-n)
IntMat transition_matrix(const FiniteLambdaModule& T, long n, long m);
// kernel of T_n -> T_m and cokernel of T_n -> T_m^{Gamma_n}
std::vector<long> cap_kernel(const FiniteLambdaModule& T, long n, long m);
std::vector<long> cap_cokernel(const FiniteLambdaModule& T, long n, long m);
// checks T/(gamma-1)T = 0  <=>  T = 0 on this instance
bool nakayama_check(const FiniteLambdaModule& T);

struct CapWindowEntry {
    long n = 0, m = 0;
    std::vector<long> kernel;
    std::vector<long> cokernel;
};

struct CapReport {
    std::vector<std::string> blocks;
    long ell = 0;
    long n0 = -1;  // stabilization indices (pass verdicts only)
    long s = -1;
    std::vector<CapWindowEntry> window;
    std::optional<std::vector<long>> declared_F;
    std::string verdict;  // pass | fail | mu-positive-nonstabilizing | invariants-infinite-skipped
    std::vector<std::string> notes;
};

// Verifies kernel = cokernel = declared F across the window for (a)+(b)
// mixes; probe mixes produce non-assertive reports.
CapReport check_cap_theorem(const std::vector<LambdaBlock>& blocks, long n_min, long n_max);

std::string cap_report_to_json(const CapReport& r);

// Mini-language: blocks separated by ';'.
//   F:3^2      finite Z/9, trivial action        F:3^2*1  gamma = 1+3
//   XL:3       Lambda/(X-3)                      XL:3*2   Lambda/(X-6)
//   MU:3       Lambda/3                          MU:3^2   Lambda/9
//   ZT:3       Z_3 with trivial action
// An optional @N pins the truncation depth.
std::vector<LambdaBlock> parse_blocks(const std::string& spec);

}  // namespace logclass
