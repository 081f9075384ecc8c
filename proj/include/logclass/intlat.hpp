#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <vector>

namespace logclass {

// Small dense integer matrices, exact arithmetic throughout.  Row vectors
// are the working convention: lattices are given by basis rows.
struct IntMat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<mpz_class> a;

    IntMat() = default;
    IntMat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, mpz_class(0)) {}
    mpz_class& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const mpz_class& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static IntMat identity(std::size_t n);
    IntMat transpose() const;
    std::vector<mpz_class> row(std::size_t i) const;
    void append_row(const std::vector<mpz_class>& r);
};

IntMat matmul(const IntMat& A, const IntMat& B);
IntMat matadd(const IntMat& A, const IntMat& B);
IntMat matscale(const IntMat& A, const mpz_class& c);
void mat_mod(IntMat& A, const mpz_class& mod);
// A^e reduced mod `mod` (e >= 0)
IntMat matpow_mod(IntMat A, const mpz_class& e, const mpz_class& mod);

// Hermite basis of the row lattice of A: full-row-rank matrix whose rows
// generate the same lattice (zero rows dropped, echelon shape).
IntMat row_hnf(const IntMat& A);

// Basis, as rows, of the right kernel {v : A v = 0}.
IntMat right_kernel(const IntMat& A);

// Solves x * B = v exactly over Q and verifies integrality; B must have
// full row rank.  Throws std::domain_error when v is not in the row space
// or the solution is not integral.
std::vector<mpz_class> solve_left(const IntMat& B, const std::vector<mpz_class>& v);

// Nonzero elementary divisors of A over Z, sorted ascending.
std::vector<mpz_class> snf_diag(IntMat A);

// Structure of the quotient (row lattice of K) / (row lattice of L) where
// L is contained in K and the quotient is finite: returns the nontrivial
// cyclic orders sorted ascending.  Throws if L is not inside K or the
// quotient is infinite.
std::vector<mpz_class> quotient_structure(const IntMat& K, const IntMat& L);

}  // namespace logclass
