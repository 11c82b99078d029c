#pragma once

#include <Eigen/Dense>
#include <complex>

#include "ttrace/symbol.hpp"

namespace ttrace {

using Matrix = Eigen::MatrixXcd;

// N x N section of the Toeplitz operator of f: T[j][k] = f_hat(j - k).
Matrix toeplitz_section(const FourierSymbol& f, int N);

// N x N section of the Hankel operator of f: H[m][k] = f_hat(-(m+1) - k).
// Identically zero for analytic f; supported on m + k <= degree - 1.
Matrix hankel_section(const FourierSymbol& f, int N);

// Exact N x N sections of the operator pair
//   A = T_f^* T_f = T_{|f|^2} - H_f^* H_f,
//   B = T_f T_f^* = T_{|f|^2} - H_{conj f}^* H_{conj f}.
// The Hankel grams are finite corner sums supported on the top-left
// (degree x degree) block, so both matrices are entrywise exact sections of
// the infinite operators for every N >= degree (smaller N is refused: the
// corner would be contaminated).  Both are Hermitian by construction.
struct SectionPair {
    Matrix A, B;
    int N = 0;
    // Tr(A - B) = sum_{n>0} n (|f_hat(n)|^2 - |f_hat(-n)|^2); independent of N.
    double trace_difference = 0.0;
};
SectionPair product_sections(const FourierSymbol& f, int N);

// N x N section of [T_f, T_g] = H_{conj g}^* H_f - H_{conj f}^* H_g,
// supported on the top-left corner; exact for N >= max(deg f, deg g).
Matrix commutator(const FourierSymbol& f, const FourierSymbol& g, int N);

// Tr [T_f, T_g] from the exact corner sums, with the trace-norm bound
// ||[T_f, T_g]||_1 <= ||f||_{W^{1/2}} ||g||_{W^{1/2}}.
struct TraceWithBound {
    cd value;
    double bound = 0.0;
};
TraceWithBound commutator_trace(const FourierSymbol& f, const FourierSymbol& g);

// N x N section of [T_f^*, T_f] = H_{conj f}^* H_{conj f} - H_f^* H_f
// (equals A - B above); positive semidefinite when f is analytic.
Matrix self_commutator(const FourierSymbol& f, int N);

// Singular values in decreasing order.
Eigen::VectorXd singular_values(const Matrix& M);

// Schatten (quasi-)norm (sum of s_i^p)^{1/p}, p > 0.
double schatten_norm(const Matrix& M, double p);

}  // namespace ttrace
