#include "logclass/intlat.hpp"

#include <algorithm>
#include <stdexcept>

namespace logclass {

IntMat IntMat::identity(std::size_t n) {
    IntMat I(n, n);
    for (std::size_t i = 0; i < n; ++i) I.at(i, i) = 1;
    return I;
}

IntMat IntMat::transpose() const {
    IntMat T(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) T.at(j, i) = at(i, j);
    return T;
}

std::vector<mpz_class> IntMat::row(std::size_t i) const {
    return std::vector<mpz_class>(a.begin() + i * cols, a.begin() + (i + 1) * cols);
}

void IntMat::append_row(const std::vector<mpz_class>& r) {
    if (r.size() != cols && rows > 0) throw std::invalid_argument("append_row: size mismatch");
    if (rows == 0 && cols == 0) cols = r.size();
    a.insert(a.end(), r.begin(), r.end());
    ++rows;
}

IntMat matmul(const IntMat& A, const IntMat& B) {
    if (A.cols != B.rows) throw std::invalid_argument("matmul: shape mismatch");
    IntMat C(A.rows, B.cols);
    for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t k = 0; k < A.cols; ++k) {
            if (A.at(i, k) == 0) continue;
            for (std::size_t j = 0; j < B.cols; ++j) C.at(i, j) += A.at(i, k) * B.at(k, j);
        }
    return C;
}

IntMat matadd(const IntMat& A, const IntMat& B) {
    if (A.rows != B.rows || A.cols != B.cols) throw std::invalid_argument("matadd: shape");
    IntMat C(A.rows, A.cols);
    for (std::size_t i = 0; i < A.a.size(); ++i) C.a[i] = A.a[i] + B.a[i];
    return C;
}

IntMat matscale(const IntMat& A, const mpz_class& c) {
    IntMat C = A;
    for (auto& x : C.a) x *= c;
    return C;
}

void mat_mod(IntMat& A, const mpz_class& mod) {
    for (auto& x : A.a) {
        mpz_mod(x.get_mpz_t(), x.get_mpz_t(), mod.get_mpz_t());
    }
}

IntMat matpow_mod(IntMat A, const mpz_class& e, const mpz_class& mod) {
    if (A.rows != A.cols) throw std::invalid_argument("matpow_mod: square required");
    IntMat R = IntMat::identity(A.rows);
    mpz_class k = e;
    mat_mod(A, mod);
    while (k > 0) {
        if (mpz_odd_p(k.get_mpz_t())) {
            R = matmul(R, A);
            mat_mod(R, mod);
        }
        k /= 2;
        if (k > 0) {
            A = matmul(A, A);
            mat_mod(A, mod);
        }
    }
    return R;
}

IntMat row_hnf(const IntMat& A) {
    IntMat H = A;
    std::size_t r = 0;
    for (std::size_t c = 0; c < H.cols && r < H.rows; ++c) {
        // euclidean elimination within column c, rows >= r
        while (true) {
            std::size_t piv = H.rows;
            for (std::size_t i = r; i < H.rows; ++i)
                if (H.at(i, c) != 0 &&
                    (piv == H.rows || cmp(abs(H.at(i, c)), abs(H.at(piv, c))) < 0))
                    piv = i;
            if (piv == H.rows) break;  // column clear
            if (piv != r)
                for (std::size_t j = 0; j < H.cols; ++j) std::swap(H.at(r, j), H.at(piv, j));
            bool clear = true;
            for (std::size_t i = r + 1; i < H.rows; ++i) {
                if (H.at(i, c) == 0) continue;
                mpz_class q = H.at(i, c) / H.at(r, c);  // truncated division is fine here
                if (q != 0)
                    for (std::size_t j = 0; j < H.cols; ++j) H.at(i, j) -= q * H.at(r, j);
                if (H.at(i, c) != 0) clear = false;
            }
            if (clear) break;
        }
        if (H.at(r, c) == 0) continue;
        if (H.at(r, c) < 0)
            for (std::size_t j = 0; j < H.cols; ++j) H.at(r, j) = -H.at(r, j);
        // reduce the rows above
        for (std::size_t i = 0; i < r; ++i) {
            mpz_class q;
            mpz_fdiv_q(q.get_mpz_t(), H.at(i, c).get_mpz_t(), H.at(r, c).get_mpz_t());
            if (q != 0)
                for (std::size_t j = 0; j < H.cols; ++j) H.at(i, j) -= q * H.at(r, j);
        }
        ++r;
    }
    IntMat out(r, H.cols);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < H.cols; ++j) out.at(i, j) = H.at(i, j);
    return out;
}

IntMat right_kernel(const IntMat& A) {
    // column-HNF with transform: A U = H; kernel basis = columns of U over
    // the zero columns of H.  Implemented on the transpose with row ops.
    IntMat T = A.transpose();              // cols x rows
    IntMat U = IntMat::identity(T.rows);   // tracks row ops on T
    std::size_t r = 0;
    for (std::size_t c = 0; c < T.cols && r < T.rows; ++c) {
        while (true) {
            std::size_t piv = T.rows;
            for (std::size_t i = r; i < T.rows; ++i)
                if (T.at(i, c) != 0 &&
                    (piv == T.rows || cmp(abs(T.at(i, c)), abs(T.at(piv, c))) < 0))
                    piv = i;
            if (piv == T.rows) break;
            if (piv != r) {
                for (std::size_t j = 0; j < T.cols; ++j) std::swap(T.at(r, j), T.at(piv, j));
                for (std::size_t j = 0; j < U.cols; ++j) std::swap(U.at(r, j), U.at(piv, j));
            }
            bool clear = true;
            for (std::size_t i = r + 1; i < T.rows; ++i) {
                if (T.at(i, c) == 0) continue;
                mpz_class q = T.at(i, c) / T.at(r, c);
                if (q != 0) {
                    for (std::size_t j = 0; j < T.cols; ++j) T.at(i, j) -= q * T.at(r, j);
                    for (std::size_t j = 0; j < U.cols; ++j) U.at(i, j) -= q * U.at(r, j);
                }
                if (T.at(i, c) != 0) clear = false;
            }
            if (clear) break;
        }
        if (T.at(r, c) != 0) ++r;
    }
    IntMat K(T.rows - r, A.cols);
    for (std::size_t i = r; i < T.rows; ++i)
        for (std::size_t j = 0; j < U.cols; ++j) K.at(i - r, j) = U.at(i, j);
    return K;
}

std::vector<mpz_class> solve_left(const IntMat& B, const std::vector<mpz_class>& v) {
    // Solve x B = v by exact rational elimination on B^T x^T = v^T.
    if (v.size() != B.cols) throw std::invalid_argument("solve_left: size mismatch");
    std::size_t n = B.rows, m = B.cols;
    std::vector<std::vector<mpq_class>> M(m, std::vector<mpq_class>(n + 1));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) M[i][j] = mpq_class(B.at(j, i));
        M[i][n] = mpq_class(v[i]);
    }
    std::size_t r = 0;
    std::vector<std::size_t> pivcol;
    for (std::size_t c = 0; c < n && r < m; ++c) {
        std::size_t piv = m;
        for (std::size_t i = r; i < m; ++i)
            if (M[i][c] != 0) {
                piv = i;
                break;
            }
        if (piv == m) continue;
        std::swap(M[r], M[piv]);
        mpq_class p = M[r][c];
        for (std::size_t j = c; j <= n; ++j) M[r][j] /= p;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == r || M[i][c] == 0) continue;
            mpq_class f = M[i][c];
            for (std::size_t j = c; j <= n; ++j) M[i][j] -= f * M[r][j];
        }
        pivcol.push_back(c);
        ++r;
    }
    for (std::size_t i = r; i < m; ++i)
        if (M[i][n] != 0) throw std::domain_error("solve_left: not in row space");
    std::vector<mpz_class> x(n, mpz_class(0));
    for (std::size_t i = 0; i < r; ++i) {
        mpq_class val = M[i][n];
        if (val.get_den() != 1) throw std::domain_error("solve_left: non-integral solution");
        x[pivcol[i]] = val.get_num();
    }
    return x;
}

std::vector<mpz_class> snf_diag(IntMat A) {
    std::size_t R = A.rows, C = A.cols;
    std::vector<mpz_class> diag;
    std::size_t k = 0;
    while (k < R && k < C) {
        // find minimal nonzero entry in the active block
        std::size_t bi = R, bj = C;
        for (std::size_t i = k; i < R; ++i)
            for (std::size_t j = k; j < C; ++j)
                if (A.at(i, j) != 0 &&
                    (bi == R || cmp(abs(A.at(i, j)), abs(A.at(bi, bj))) < 0)) {
                    bi = i;
                    bj = j;
                }
        if (bi == R) break;
        for (std::size_t j = 0; j < C; ++j) std::swap(A.at(k, j), A.at(bi, j));
        for (std::size_t i = 0; i < R; ++i) std::swap(A.at(i, k), A.at(i, bj));
        bool again = false;
        for (std::size_t i = k + 1; i < R; ++i) {
            if (A.at(i, k) == 0) continue;
            mpz_class q;
            mpz_fdiv_q(q.get_mpz_t(), A.at(i, k).get_mpz_t(), A.at(k, k).get_mpz_t());
            for (std::size_t j = k; j < C; ++j) A.at(i, j) -= q * A.at(k, j);
            if (A.at(i, k) != 0) again = true;
        }
        for (std::size_t j = k + 1; j < C; ++j) {
            if (A.at(k, j) == 0) continue;
            mpz_class q;
            mpz_fdiv_q(q.get_mpz_t(), A.at(k, j).get_mpz_t(), A.at(k, k).get_mpz_t());
            for (std::size_t i = k; i < R; ++i) A.at(i, j) -= q * A.at(i, k);
            if (A.at(k, j) != 0) again = true;
        }
        if (again) continue;
        // ensure divisibility of the remaining block by the pivot
        bool fixed = true;
        for (std::size_t i = k + 1; i < R && fixed; ++i)
            for (std::size_t j = k + 1; j < C && fixed; ++j)
                if (A.at(i, j) % A.at(k, k) != 0) {
                    for (std::size_t jj = k; jj < C; ++jj) A.at(k, jj) += A.at(i, jj);
                    fixed = false;
                }
        if (!fixed) continue;
        diag.push_back(abs(A.at(k, k)));
        ++k;
    }
    std::sort(diag.begin(), diag.end());
    return diag;
}

std::vector<mpz_class> quotient_structure(const IntMat& K, const IntMat& L) {
    IntMat KB = row_hnf(K);
    IntMat X(0, KB.rows);
    X.cols = KB.rows;
    for (std::size_t i = 0; i < L.rows; ++i) X.append_row(solve_left(KB, L.row(i)));
    std::vector<mpz_class> d = snf_diag(X);
    if (d.size() < KB.rows) throw std::domain_error("quotient_structure: infinite quotient");
    std::vector<mpz_class> out;
    for (auto& x : d)
        if (x != 1) out.push_back(x);
    return out;
}

}  // namespace logclass
