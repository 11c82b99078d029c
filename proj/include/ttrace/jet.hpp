#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace ttrace {

using cd = std::complex<double>;

// Truncated Taylor expansion about a fixed point: c[k] is the coefficient of
// h^k.  Enough power-series arithmetic to differentiate the closed-form
// symbol families to arbitrary (small) order without numerical quadrature.
struct Jet {
    std::vector<cd> c;

    explicit Jet(std::size_t order = 0) : c(order + 1, cd(0.0, 0.0)) {}
    std::size_t order() const { return c.size() - 1; }

    static Jet constant(cd v, std::size_t order) {
        Jet j(order);
        j.c[0] = v;
        return j;
    }
    // the local coordinate itself: value + h
    static Jet variable(cd v, std::size_t order) {
        Jet j(order);
        j.c[0] = v;
        if (order >= 1) j.c[1] = cd(1.0, 0.0);
        return j;
    }
};

inline Jet operator+(const Jet& a, const Jet& b) {
    Jet r(a.order());
    for (std::size_t k = 0; k <= a.order(); ++k) r.c[k] = a.c[k] + b.c[k];
    return r;
}

inline Jet operator-(const Jet& a, const Jet& b) {
    Jet r(a.order());
    for (std::size_t k = 0; k <= a.order(); ++k) r.c[k] = a.c[k] - b.c[k];
    return r;
}

inline Jet operator*(const Jet& a, const Jet& b) {
    Jet r(a.order());
    for (std::size_t k = 0; k <= a.order(); ++k) {
        cd s(0.0, 0.0);
        for (std::size_t j = 0; j <= k; ++j) s += a.c[j] * b.c[k - j];
        r.c[k] = s;
    }
    return r;
}

inline Jet operator*(cd s, const Jet& a) {
    Jet r(a.order());
    for (std::size_t k = 0; k <= a.order(); ++k) r.c[k] = s * a.c[k];
    return r;
}

// a / b with b.c[0] != 0
inline Jet jet_div(const Jet& a, const Jet& b) {
    if (std::abs(b.c[0]) == 0.0) throw std::domain_error("jet_div: division by zero jet");
    Jet r(a.order());
    for (std::size_t k = 0; k <= a.order(); ++k) {
        cd s = a.c[k];
        for (std::size_t j = 1; j <= k; ++j) s -= b.c[j] * r.c[k - j];
        r.c[k] = s / b.c[0];
    }
    return r;
}

// log(a); a.c[0] must be nonzero.  log' = a'/a, integrated termwise.
inline Jet jet_log(const Jet& a) {
    if (std::abs(a.c[0]) == 0.0) throw std::domain_error("jet_log: log of zero jet");
    const std::size_t n = a.order();
    Jet r(n);
    r.c[0] = std::log(a.c[0]);
    // l_k = (a_k - (1/k) * sum_{j=1}^{k-1} j * l_j * a_{k-j}) / a_0
    for (std::size_t k = 1; k <= n; ++k) {
        cd s = a.c[k];
        for (std::size_t j = 1; j < k; ++j)
            s -= (static_cast<double>(j) / static_cast<double>(k)) * r.c[j] * a.c[k - j];
        r.c[k] = s / a.c[0];
    }
    return r;
}

// exp(a).  e_k = (1/k) sum_{j=1}^{k} j * a_j * e_{k-j}
inline Jet jet_exp(const Jet& a) {
    const std::size_t n = a.order();
    Jet r(n);
    r.c[0] = std::exp(a.c[0]);
    for (std::size_t k = 1; k <= n; ++k) {
        cd s(0.0, 0.0);
        for (std::size_t j = 1; j <= k; ++j)
            s += (static_cast<double>(j) / static_cast<double>(k)) * a.c[j] * r.c[k - j];
        r.c[k] = s;
    }
    return r;
}

inline Jet jet_pow(const Jet& a, double alpha) {
    return jet_exp(alpha * jet_log(a));
}

inline Jet jet_recip(const Jet& a) {
    return jet_div(Jet::constant(cd(1.0, 0.0), a.order()), a);
}

// Jet of log(1+z) at the point z = -1 + w, from the exact derivatives
// d^k/dz^k log(1+z) = (-1)^{k-1} (k-1)! / (1+z)^k.  The caller supplies w
// computed in a cancellation-free way, so this stays accurate arbitrarily
// close to the branch point.
inline Jet jet_log1p_from_w(cd w, std::size_t order) {
    Jet r(order);
    r.c[0] = std::log(w);
    cd wk = w;
    double sign = 1.0;
    for (std::size_t k = 1; k <= order; ++k) {
        r.c[k] = sign / (static_cast<double>(k) * wk);
        wk *= w;
        sign = -sign;
    }
    return r;
}

}  // namespace ttrace
