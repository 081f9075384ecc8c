#include "logclass/iwalab.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "logclass/padic.hpp"

namespace logclass {

using nlohmann::json;

std::string LambdaBlock::str() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Finite: os << "F:" << ell << "^" << e; break;
        case Kind::XMinusEllC: os << "XL:" << ell; break;
        case Kind::MuProbe: os << "MU:" << ell << "^" << e; break;
        case Kind::ZTrivial: os << "ZT:" << ell; break;
    }
    if (kind == Kind::XMinusEllC && c != 1) os << "*" << c;
    if (kind == Kind::Finite && c != 0) os << "*" << c;
    if (depth) os << "@" << depth;
    return os.str();
}

namespace {

long ipow(long b, long e) {
    long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

std::vector<long> exps_of(const std::vector<mpz_class>& divisors, long ell) {
    std::vector<long> out;
    for (const auto& d : divisors) {
        mpz_class t = d;
        long e = 0;
        while (t % ell == 0) {
            t /= ell;
            ++e;
        }
        if (t != 1) throw std::logic_error("iwalab: non ell-power divisor");
        if (e > 0) out.push_back(e);
    }
    std::sort(out.begin(), out.end());
    return out;
}

IntMat stack(const IntMat& A, const IntMat& B) {
    IntMat S(0, A.cols ? A.cols : B.cols);
    S.cols = A.cols ? A.cols : B.cols;
    for (std::size_t i = 0; i < A.rows; ++i) S.append_row(A.row(i));
    for (std::size_t i = 0; i < B.rows; ++i) S.append_row(B.row(i));
    return S;
}

// {x : x * M in (row lattice of L)}, as a row basis
IntMat preimage_lattice(const IntMat& M, const IntMat& L) {
    // x*M = y*L  <=>  (x | -y) * [[M],[L]] = 0
    IntMat S = stack(M, L);
    IntMat K = right_kernel(S.transpose());  // rows (x | -y)
    IntMat X(0, M.rows);
    X.cols = M.rows;
    for (std::size_t i = 0; i < K.rows; ++i) {
        std::vector<mpz_class> row(M.rows);
        for (std::size_t j = 0; j < M.rows; ++j) row[j] = K.at(i, j);
        X.append_row(row);
    }
    return row_hnf(X);
}

IntMat omega_matrix(const FiniteLambdaModule& T, long n) {
    mpz_class modW = pow_ui(T.ell, T.W);
    IntMat P = matpow_mod(T.gamma, pow_ui(T.ell, n), modW);
    IntMat I = IntMat::identity(T.g);
    IntMat O = matadd(P, matscale(I, -1));
    mat_mod(O, modW);
    return O;
}

IntMat level_lattice(const FiniteLambdaModule& T, long n) {
    return row_hnf(stack(T.relations, omega_matrix(T, n)));
}

void check_level(const FiniteLambdaModule& T, long n) {
    if (n < 0 || n > T.max_level)
        throw std::invalid_argument("iwalab: level " + std::to_string(n) +
                                    " beyond declared truncation depth " +
                                    std::to_string(T.max_level));
}

}  // namespace

FiniteLambdaModule build_module(const std::vector<LambdaBlock>& blocks) {
    if (blocks.empty()) throw std::invalid_argument("build_module: no blocks");
    FiniteLambdaModule T;
    T.ell = blocks[0].ell;
    T.blocks = blocks;
    long W = 1;
    long max_level = 1000;
    std::vector<long> declared;
    bool have_infinite_F = false;
    struct Piece {
        std::size_t size;
        std::vector<long> rel_exp;
        IntMat gamma;
    };
    std::vector<Piece> pieces;
    for (const auto& b : blocks) {
        if (b.ell != T.ell) throw std::invalid_argument("build_module: mixed primes");
        if (b.e < 1) throw std::invalid_argument("build_module: exponent < 1");
        switch (b.kind) {
            case LambdaBlock::Kind::Finite: {
                Piece p;
                p.size = 1;
                p.rel_exp = {b.e};
                p.gamma = IntMat(1, 1);
                p.gamma.at(0, 0) = 1 + mpz_class(T.ell) * b.c;
                pieces.push_back(p);
                declared.push_back(b.e);
                W = std::max(W, b.e);
                break;
            }
            case LambdaBlock::Kind::XMinusEllC: {
                long depth = b.depth ? b.depth : 8;
                if (b.c % T.ell == 0)
                    throw std::invalid_argument("build_module: XL block needs a unit c");
                Piece p;
                p.size = 1;
                p.rel_exp = {depth};
                p.gamma = IntMat(1, 1);
                p.gamma.at(0, 0) = 1 + mpz_class(T.ell) * b.c;
                pieces.push_back(p);
                W = std::max(W, depth);
                max_level = std::min(max_level, depth - 1);
                break;
            }
            case LambdaBlock::Kind::MuProbe: {
                long depth = b.depth ? b.depth : T.ell * T.ell;
                Piece p;
                p.size = depth;
                p.rel_exp.assign(depth, b.e);
                // gamma = 1 + X acting on (Z/ell^e)[X]/X^depth.  The model is
                // a finite Lambda-module in its own right, so every level is
                // well-defined on it; its capitulation kernels end up
                // swallowing the whole depth-dependent module, which is the
                // observed signature of positive mu.
                p.gamma = IntMat::identity(depth);
                for (long i = 0; i + 1 < depth; ++i) p.gamma.at(i, i + 1) = 1;
                pieces.push_back(p);
                W = std::max(W, b.e);
                T.mu_positive_probe = true;
                declared.clear();
                break;
            }
            case LambdaBlock::Kind::ZTrivial: {
                long depth = b.depth ? b.depth : 6;
                Piece p;
                p.size = 1;
                p.rel_exp = {depth};
                p.gamma = IntMat::identity(1);
                pieces.push_back(p);
                W = std::max(W, depth);
                T.infinite_invariants_probe = true;
                have_infinite_F = true;
                break;
            }
        }
    }
    std::size_t g = 0;
    for (const auto& p : pieces) g += p.size;
    T.g = g;
    T.W = W;
    T.max_level = max_level;
    T.gamma = IntMat(g, g);
    T.relations = IntMat(g, g);
    std::size_t off = 0;
    for (const auto& p : pieces) {
        for (std::size_t i = 0; i < p.size; ++i) {
            T.relations.at(off + i, off + i) = pow_ui(T.ell, p.rel_exp[i]);
            for (std::size_t j = 0; j < p.size; ++j)
                T.gamma.at(off + i, off + j) = p.gamma.at(i, j);
        }
        off += p.size;
    }
    if (!T.mu_positive_probe && !have_infinite_F) {
        std::sort(declared.begin(), declared.end());
        T.declared_F = declared;
    }

    // gamma must act invertibly and with gamma - 1 nilpotent mod ell
    mpz_class modW = pow_ui(T.ell, T.W);
    IntMat Gm = T.gamma;
    mat_mod(Gm, modW);
    IntMat nil = matadd(T.gamma, matscale(IntMat::identity(g), -1));
    IntMat acc = nil;
    mat_mod(acc, mpz_class(T.ell));
    for (std::size_t i = 0; i < g + 1; ++i) {
        acc = matmul(acc, nil);
        mat_mod(acc, mpz_class(T.ell));
    }
    for (const auto& x : acc.a)
        if (x != 0) throw std::invalid_argument("build_module: gamma - 1 not nilpotent mod ell");
    return T;
}

std::vector<long> coinvariants(const FiniteLambdaModule& T, long n) {
    check_level(T, n);
    return exps_of(quotient_structure(IntMat::identity(T.g), level_lattice(T, n)), T.ell);
}

std::vector<long> invariants_at(const FiniteLambdaModule& T, long n) {
    check_level(T, n);
    IntMat O = omega_matrix(T, n);
    IntMat P = preimage_lattice(O, T.relations);
    return exps_of(quotient_structure(P, T.relations), T.ell);
}

IntMat transition_matrix(const FiniteLambdaModule& T, long n, long m) {
    check_level(T, n);
    check_level(T, m);
    if (m <= n) throw std::invalid_argument("transition_matrix: need m > n");
    mpz_class modW = pow_ui(T.ell, T.W);
    IntMat G = matpow_mod(T.gamma, pow_ui(T.ell, n), modW);
    IntMat acc = IntMat::identity(T.g);
    IntMat sum(T.g, T.g);
    long terms = ipow(T.ell, m - n);
    for (long i = 0; i < terms; ++i) {
        sum = matadd(sum, acc);
        if (i + 1 < terms) {
            acc = matmul(acc, G);
            mat_mod(acc, modW);
        }
    }
    mat_mod(sum, modW);
    return sum;
}

std::vector<long> cap_kernel(const FiniteLambdaModule& T, long n, long m) {
    IntMat N = transition_matrix(T, n, m);
    IntMat Lm = level_lattice(T, m);
    IntMat Ln = level_lattice(T, n);
    IntMat P = preimage_lattice(N, Lm);
    return exps_of(quotient_structure(P, Ln), T.ell);
}

std::vector<long> cap_cokernel(const FiniteLambdaModule& T, long n, long m) {
    IntMat N = transition_matrix(T, n, m);
    IntMat Lm = level_lattice(T, m);
    IntMat On = omega_matrix(T, n);
    IntMat Inv = preimage_lattice(On, Lm);  // T_m^{Gamma_n} upstairs
    IntMat img = row_hnf(stack(N, Lm));
    return exps_of(quotient_structure(Inv, img), T.ell);
}

bool nakayama_check(const FiniteLambdaModule& T) {
    IntMat nil = matadd(T.gamma, matscale(IntMat::identity(T.g), -1));
    auto co = exps_of(quotient_structure(IntMat::identity(T.g),
                                         row_hnf(stack(T.relations, nil))),
                      T.ell);
    auto whole =
        exps_of(quotient_structure(IntMat::identity(T.g), row_hnf(T.relations)), T.ell);
    return co.empty() == whole.empty();
}

CapReport check_cap_theorem(const std::vector<LambdaBlock>& blocks, long n_min, long n_max) {
    if (n_min < 0 || n_max < n_min) throw std::invalid_argument("check_cap_theorem: bad range");
    // pin the automatic depths to the requested window
    std::vector<LambdaBlock> pinned = blocks;
    for (auto& b : pinned) {
        if (b.depth) continue;
        switch (b.kind) {
            case LambdaBlock::Kind::XMinusEllC: b.depth = n_max + 3; break;
            case LambdaBlock::Kind::MuProbe: b.depth = ipow(b.ell, n_max + 1); break;
            case LambdaBlock::Kind::ZTrivial: b.depth = n_max + 4; break;
            default: break;
        }
    }
    FiniteLambdaModule T = build_module(pinned);
    CapReport rep;
    rep.ell = T.ell;
    for (const auto& b : pinned) rep.blocks.push_back(b.str());
    rep.declared_F = T.declared_F;

    long m_max = std::min<long>(T.max_level, n_max + 2);
    for (long n = n_min; n <= n_max; ++n)
        for (long m = n + 1; m <= m_max; ++m) {
            if (m > T.max_level) continue;
            CapWindowEntry e;
            e.n = n;
            e.m = m;
            e.kernel = cap_kernel(T, n, m);
            if (!T.infinite_invariants_probe) e.cokernel = cap_cokernel(T, n, m);
            rep.window.push_back(e);
        }

    if (T.infinite_invariants_probe) {
        rep.verdict = "invariants-infinite-skipped";
        rep.notes.push_back(
            "a Z_ell block with trivial action has infinite invariants at every level; the "
            "cokernel statement does not apply and is reported non-assertively");
        return rep;
    }
    if (T.mu_positive_probe) {
        rep.verdict = "mu-positive-nonstabilizing";
        std::ostringstream os;
        os << "kernel orders across the window:";
        for (const auto& e : rep.window) {
            long sum = 0;
            for (long x : e.kernel) sum += x;
            os << " (" << e.n << "," << e.m << "):" << T.ell << "^" << sum;
        }
        rep.notes.push_back(os.str());
        std::ostringstream os2;
        os2 << "coinvariant orders grow exponentially with the level:";
        for (long n = n_min; n <= std::min(n_max, T.max_level); ++n) {
            long sum = 0;
            for (long x : coinvariants(T, n)) sum += x;
            os2 << " n=" << n << ":" << T.ell << "^" << sum;
        }
        rep.notes.push_back(os2.str());
        rep.notes.push_back(
            "the terminal kernels equal the whole truncated module, so their size tracks the "
            "truncation depth instead of a depth-independent finite submodule");
        return rep;
    }

    // (a)+(b) mix: find (n0, s) with kernel = cokernel = declared F beyond
    std::vector<long> F = *T.declared_F;
    std::sort(F.begin(), F.end());
    auto matches = [&](const CapWindowEntry& e) {
        return e.kernel == F && e.cokernel == F;
    };
    long n0 = -1, s = -1;
    for (long cand_n0 = n_min; cand_n0 <= n_max && n0 < 0; ++cand_n0)
        for (long cand_s = 1; cand_s <= m_max - cand_n0 && n0 < 0; ++cand_s) {
            bool ok = true, any = false;
            for (const auto& e : rep.window) {
                if (e.n < cand_n0 || e.m - e.n < cand_s) continue;
                any = true;
                if (!matches(e)) ok = false;
            }
            if (ok && any) {
                n0 = cand_n0;
                s = cand_s;
            }
        }
    rep.n0 = n0;
    rep.s = s;
    rep.verdict = (n0 >= 0) ? "pass" : "fail";
    if (n0 < 0)
        rep.notes.push_back("no stabilization window matched the declared finite submodule");
    return rep;
}

std::string cap_report_to_json(const CapReport& r) {
    json j;
    j["blocks"] = r.blocks;
    j["ell"] = r.ell;
    j["n0"] = r.n0;
    j["s"] = r.s;
    if (r.declared_F)
        j["declared_F"] = *r.declared_F;
    else
        j["declared_F"] = nullptr;
    j["kernel_structures"] = json::array();
    j["cokernel_structures"] = json::array();
    for (const auto& e : r.window) {
        j["kernel_structures"].push_back({{"n", e.n}, {"m", e.m}, {"exponents", e.kernel}});
        if (!e.cokernel.empty() || r.verdict != "invariants-infinite-skipped")
            j["cokernel_structures"].push_back(
                {{"n", e.n}, {"m", e.m}, {"exponents", e.cokernel}});
    }
    j["verdict"] = r.verdict;
    j["notes"] = r.notes;
    return j.dump(2);
}

std::vector<LambdaBlock> parse_blocks(const std::string& spec) {
    std::vector<LambdaBlock> out;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ';')) {
        if (tok.empty()) continue;
        LambdaBlock b;
        auto colon = tok.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("parse_blocks: " + tok);
        std::string kind = tok.substr(0, colon);
        std::string rest = tok.substr(colon + 1);
        if (kind == "F") {
            b.kind = LambdaBlock::Kind::Finite;
            b.c = 0;
        } else if (kind == "XL") {
            b.kind = LambdaBlock::Kind::XMinusEllC;
            b.c = 1;
        } else if (kind == "MU") {
            b.kind = LambdaBlock::Kind::MuProbe;
        } else if (kind == "ZT") {
            b.kind = LambdaBlock::Kind::ZTrivial;
        } else {
            throw std::invalid_argument("parse_blocks: unknown kind " + kind);
        }
        // rest = ell [^e] [*c] [@depth]
        auto at = rest.find('@');
        if (at != std::string::npos) {
            b.depth = std::stol(rest.substr(at + 1));
            rest = rest.substr(0, at);
        }
        auto star = rest.find('*');
        if (star != std::string::npos) {
            b.c = std::stol(rest.substr(star + 1));
            rest = rest.substr(0, star);
        }
        auto hat = rest.find('^');
        if (hat != std::string::npos) {
            b.e = std::stol(rest.substr(hat + 1));
            rest = rest.substr(0, hat);
        }
        b.ell = std::stol(rest);
        if (b.ell < 2) throw std::invalid_argument("parse_blocks: bad prime");
        out.push_back(b);
    }
    if (out.empty()) throw std::invalid_argument("parse_blocks: empty spec");
    return out;
}

}  // namespace logclass
