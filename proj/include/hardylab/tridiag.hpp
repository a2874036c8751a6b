#pragma once

#include <cmath>
#include <vector>

#include "hardylab/errors.hpp"

namespace hardylab {

// Symmetric tridiagonal matrix: diag[0..n-1], off[0..n-2].
struct TriDiag {
    std::vector<double> diag;
    std::vector<double> off;

    int size() const { return int(diag.size()); }

    std::vector<double> apply(const std::vector<double>& x) const {
        const int n = size();
        std::vector<double> y(n);
        for (int i = 0; i < n; ++i) {
            double v = diag[i] * x[i];
            if (i > 0) v += off[i - 1] * x[i - 1];
            if (i + 1 < n) v += off[i] * x[i + 1];
            y[i] = v;
        }
        return y;
    }
};

// Thomas solve (no pivoting; adequate for the diagonally-structured systems here).
inline std::vector<double> solve_tridiag(const TriDiag& A, std::vector<double> b) {
    const int n = A.size();
    std::vector<double> d(A.diag);
    for (int i = 1; i < n; ++i) {
        const double w = A.off[i - 1] / d[i - 1];
        d[i] -= w * A.off[i - 1];
        b[i] -= w * b[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = b[n - 1] / d[n - 1];
    for (int i = n - 2; i >= 0; --i)
        x[i] = (b[i] - A.off[i] * x[i + 1]) / d[i];
    return x;
}

// Number of negative pivots of A - sigma*B (B symmetric tridiagonal as well):
// the count of pencil eigenvalues below sigma, by LDL^T inertia with the
// standard safeguarded recurrence.
inline int eigenvalues_below(const TriDiag& A, const TriDiag& B, double sigma) {
    const int n = A.size();
    int count = 0;
    double d = A.diag[0] - sigma * B.diag[0];
    if (d == 0.0) d = -1e-300;
    if (d < 0.0) ++count;
    for (int i = 1; i < n; ++i) {
        const double e = A.off[i - 1] - sigma * B.off[i - 1];
        double di = A.diag[i] - sigma * B.diag[i] - e * e / d;
        if (!std::isfinite(di)) di = A.diag[i] - sigma * B.diag[i];
        if (di == 0.0) di = -1e-300;
        if (di < 0.0) ++count;
        d = di;
    }
    return count;
}

namespace detail {
inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
} // namespace detail

struct PencilEigenResult {
    double value = 0.0;
    std::vector<double> vector;
    int iterations = 0;
    bool converged = false;
    bool certified_smallest = false;  // inertia count check at value -/+ margin
};

// Smallest eigenvalue of the symmetric pencil A x = lambda B x (B positive
// definite) by inverse iteration with Rayleigh-quotient shifts, with an LDL^T
// inertia certificate and bisection fallback. Callers should pre-scale the
// pencil so B has unit diagonal; extreme dynamic range otherwise spoils the
// factorizations.
inline PencilEigenResult smallest_pencil_eigen(const TriDiag& A, const TriDiag& B,
                                               double tol = 1e-12, int max_iter = 200) {
    const int n = A.size();
    PencilEigenResult res;
    std::vector<double> v(n, 1.0);
    auto b_norm = [&](const std::vector<double>& x) {
        return std::sqrt(std::max(detail::dot(x, B.apply(x)), 0.0));
    };
    {
        const double nb = b_norm(v);
        for (auto& x : v) x /= nb;
    }
    double lambda = detail::dot(v, A.apply(v)) / detail::dot(v, B.apply(v));
    double sigma = 0.0;
    const int fixed_shift_steps = 3;
    for (int it = 0; it < max_iter; ++it) {
        TriDiag M;
        M.diag.resize(n);
        M.off.resize(n - 1);
        for (int i = 0; i < n; ++i) M.diag[i] = A.diag[i] - sigma * B.diag[i];
        for (int i = 0; i + 1 < n; ++i) M.off[i] = A.off[i] - sigma * B.off[i];
        std::vector<double> w;
        try {
            w = solve_tridiag(M, B.apply(v));
        } catch (...) {
            break;
        }
        bool ok = true;
        for (double x : w) if (!std::isfinite(x)) { ok = false; break; }
        if (!ok) { sigma = std::nextafter(sigma, -1e300); continue; }
        const double nb = b_norm(w);
        if (!(nb > 0.0) || !std::isfinite(nb)) break;
        for (auto& x : w) x /= nb;
        const double lam_new = detail::dot(w, A.apply(w)) / detail::dot(w, B.apply(w));
        v = std::move(w);
        res.iterations = it + 1;
        if (std::abs(lam_new - lambda) <= tol * std::max(1.0, std::abs(lam_new))) {
            lambda = lam_new;
            res.converged = true;
            break;
        }
        lambda = lam_new;
        if (it + 1 >= fixed_shift_steps) sigma = lambda;
    }
    // certificate: no pencil eigenvalue strictly below lambda - margin
    const double margin = 1e-8 * std::max(1.0, std::abs(lambda));
    bool certified = res.converged &&
                     eigenvalues_below(A, B, lambda - margin) == 0 &&
                     eigenvalues_below(A, B, lambda + margin) >= 1;
    if (!certified) {
        // bisection fallback on the inertia count
        double hi = lambda + margin;
        while (eigenvalues_below(A, B, hi) < 1) hi = hi * 2.0 + 1.0;
        double lo = std::min(lambda, hi) - 1.0;
        while (eigenvalues_below(A, B, lo) > 0) lo = lo * 2.0 - 1.0;
        for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (eigenvalues_below(A, B, mid) >= 1) hi = mid; else lo = mid;
        }
        lambda = 0.5 * (lo + hi);
        // one inverse-iteration pass near the certified value for the vector
        TriDiag M;
        M.diag.resize(n);
        M.off.resize(n - 1);
        const double sh = lo - 1e-10 * std::max(1.0, std::abs(lo));
        for (int i = 0; i < n; ++i) M.diag[i] = A.diag[i] - sh * B.diag[i];
        for (int i = 0; i + 1 < n; ++i) M.off[i] = A.off[i] - sh * B.off[i];
        for (int pass = 0; pass < 3; ++pass) {
            v = solve_tridiag(M, B.apply(v));
            const double nb = b_norm(v);
            if (!(nb > 0.0) || !std::isfinite(nb)) break;
            for (auto& x : v) x /= nb;
        }
        res.converged = true;
        certified = eigenvalues_below(A, B, lambda - margin) == 0 &&
                    eigenvalues_below(A, B, lambda + margin) >= 1;
    }
    res.certified_smallest = certified;
    res.value = lambda;
    res.vector = std::move(v);
    return res;
}

} // namespace hardylab
