#include "ttrace/operators.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace ttrace {

namespace {

// G[j][k] = sum_{m>=0} c(m+1+j) * conj(c(m+1+k)) for a coefficient accessor c;
// this is the gram matrix of Hankel columns.  Supported on j,k <= d-1.
template <typename Coeff>
Matrix corner_gram(Coeff c, int d, int N) {
    Matrix G = Matrix::Zero(N, N);
    int side = std::min(N, d);
    for (int j = 0; j < side; ++j) {
        for (int k = j; k < side; ++k) {
            cd s(0.0, 0.0);
            for (int m = 0; m + 1 + std::max(j, k) <= d; ++m)
                s += c(m + 1 + j) * std::conj(c(m + 1 + k));
            G(j, k) = s;
            G(k, j) = std::conj(s);
        }
    }
    return G;
}

}  // namespace

Matrix toeplitz_section(const FourierSymbol& f, int N) {
    if (N < 1) throw std::invalid_argument("toeplitz_section: N must be positive");
    Matrix T(N, N);
    for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) T(j, k) = f.coeff(j - k);
    return T;
}

Matrix hankel_section(const FourierSymbol& f, int N) {
    if (N < 1) throw std::invalid_argument("hankel_section: N must be positive");
    Matrix H = Matrix::Zero(N, N);
    int d = f.degree();
    for (int m = 0; m < N; ++m)
        for (int k = 0; k < N; ++k)
            if (m + 1 + k <= d) H(m, k) = f.coeff(-(m + 1) - k);
    return H;
}

SectionPair product_sections(const FourierSymbol& f, int N) {
    int d = f.degree();
    if (N < std::max(1, d))
        throw std::invalid_argument(
            "product_sections: N below the symbol degree would contaminate the "
            "Hankel corner; increase N to at least the degree");
    SectionPair out;
    out.N = N;
    auto q = f.multiply(f.conjugate());  // |f|^2, exact convolution
    Matrix T = Matrix(N, N);
    for (int j = 0; j < N; ++j) {
        T(j, j) = q.coeff(0);
        for (int k = j + 1; k < N; ++k) {
            cd v = q.coeff(j - k);
            T(j, k) = v;
            T(k, j) = std::conj(v);
        }
    }
    // A = T_{|f|^2} - gram of H_f columns; H_f rows use f_hat(-(m+1)-k), so the
    // gram entry is sum_m conj(f_hat(-(m+1)-j)) f_hat(-(m+1)-k).
    Matrix Gf = corner_gram([&](int n) { return std::conj(f.coeff(-n)); }, d, N);
    Matrix Gfbar = corner_gram([&](int n) { return f.coeff(n); }, d, N);
    out.A = T - Gf;
    out.B = T - Gfbar;
    double td = 0.0;
    for (int n = 1; n <= d; ++n)
        td += n * (std::norm(f.coeff(n)) - std::norm(f.coeff(-n)));
    out.trace_difference = td;
    return out;
}

Matrix commutator(const FourierSymbol& f, const FourierSymbol& g, int N) {
    int d = std::max(f.degree(), g.degree());
    if (N < std::max(1, d))
        throw std::invalid_argument("commutator: N must be at least max(deg f, deg g)");
    Matrix C = Matrix::Zero(N, N);
    int side = std::min(N, d);
    for (int j = 0; j < side; ++j) {
        for (int k = 0; k < side; ++k) {
            cd s(0.0, 0.0);
            for (int m = 0; m + 1 + j <= g.degree() && m + 1 + k <= f.degree(); ++m)
                s += g.coeff(m + 1 + j) * f.coeff(-(m + 1) - k);
            for (int m = 0; m + 1 + j <= f.degree() && m + 1 + k <= g.degree(); ++m)
                s -= f.coeff(m + 1 + j) * g.coeff(-(m + 1) - k);
            C(j, k) = s;
        }
    }
    return C;
}

TraceWithBound commutator_trace(const FourierSymbol& f, const FourierSymbol& g) {
    int d = std::max({1, f.degree(), g.degree()});
    Matrix C = commutator(f, g, d);
    TraceWithBound out;
    out.value = C.trace();
    out.bound = f.sobolev_half_norm() * g.sobolev_half_norm();
    return out;
}

Matrix self_commutator(const FourierSymbol& f, int N) {
    int d = f.degree();
    if (N < std::max(1, d))
        throw std::invalid_argument("self_commutator: N must be at least the degree");
    Matrix Gf = corner_gram([&](int n) { return std::conj(f.coeff(-n)); }, d, N);
    Matrix Gfbar = corner_gram([&](int n) { return f.coeff(n); }, d, N);
    return Gfbar - Gf;
}

Eigen::VectorXd singular_values(const Matrix& M) {
    if (M.rows() <= 32) {
        Eigen::JacobiSVD<Matrix> svd(M);
        return svd.singularValues();
    }
    Eigen::BDCSVD<Matrix> svd(M);
    return svd.singularValues();
}

double schatten_norm(const Matrix& M, double p) {
    if (!(p > 0.0)) throw std::invalid_argument("schatten_norm: p must be positive");
    Eigen::VectorXd s = singular_values(M);
    double acc = 0.0;
    for (Eigen::Index i = s.size() - 1; i >= 0; --i) acc += std::pow(s[i], p);
    return std::pow(acc, 1.0 / p);
}

}  // namespace ttrace
