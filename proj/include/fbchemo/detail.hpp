#pragma once

// Small numerical helpers shared by the solver headers: Thomas solve,
// uniform-grid interpolation, trapezoid weights, composite Simpson.

#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace fbchemo::detail {

// Thomas algorithm for a tridiagonal system. lower[0] and upper[n-1] are
// ignored. Overwrites nothing; returns the solution.
inline std::vector<double> tridiag_solve(const std::vector<double>& lower,
                                         const std::vector<double>& diag,
                                         const std::vector<double>& upper,
                                         const std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n), d(n), x(n);
    double piv = diag[0];
    if (piv == 0.0) throw SingularSystem();
    c[0] = upper[0] / piv;
    d[0] = rhs[0] / piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = diag[i] - lower[i] * c[i - 1];
        if (piv == 0.0) throw SingularSystem();
        c[i] = (i + 1 < n) ? upper[i] / piv : 0.0;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / piv;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

// Linear interpolation of nodal values f_j at x_j = j*dx, clamped to the ends.
inline double interp_uniform(const std::vector<double>& f, double dx, double x) {
    const std::size_t n = f.size();
    if (x <= 0.0) return f.front();
    const double s = x / dx;
    const auto j = static_cast<std::size_t>(s);
    if (j + 1 >= n) return f.back();
    const double w = s - static_cast<double>(j);
    return f[j] + w * (f[j + 1] - f[j]);
}

// Piecewise-linear table lookup with ascending abscissae, clamped outside.
inline double interp_table(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    std::size_t lo = 0, hi = xs.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (xs[mid] <= x ? lo : hi) = mid;
    }
    const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + w * (ys[hi] - ys[lo]);
}

// Trapezoid weight for node j of m+1 uniformly spaced nodes with spacing dx.
inline double trap_weight(std::size_t j, std::size_t m, double dx) {
    return (j == 0 || j == m) ? 0.5 * dx : dx;
}

// Composite Simpson on [a,b] with an even panel count.
template <class F>
double simpson(F&& f, double a, double b, int panels) {
    if (panels % 2 != 0) ++panels;
    const double dx = (b - a) / panels;
    double odd = 0.0, even = 0.0;
    for (int i = 1; i < panels; i += 2) odd += f(a + i * dx);
    for (int i = 2; i < panels; i += 2) even += f(a + i * dx);
    return dx / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

} // namespace fbchemo::detail
