#pragma once

// Closed-form oracles for the linear boundary law k = a|x|: regime
// classification against the critical mass, the exact boundary trajectory,
// fill/collapse times, and the concentration weight of the collapse limit.
//
// Everything here follows from the substitution s = h^n, which turns
// h' = (a+M)h - M h^{1-n} into the linear ODE s' = n(a+M)s - nM.

#include <cmath>
#include <numbers>
#include <optional>
#include <variant>

#include "errors.hpp"

namespace fbchemo {

struct Growing {
    double fill_time = 0.0;
};
struct Shrinking {
    double collapse_time = 0.0;
};
struct Stationary {};
using Regime = std::variant<Growing, Shrinking, Stationary>;

inline const char* regime_name(const Regime& r) {
    if (std::holds_alternative<Growing>(r)) return "Growing";
    if (std::holds_alternative<Shrinking>(r)) return "Shrinking";
    return "Stationary";
}

inline std::optional<double> regime_event_time(const Regime& r) {
    if (const auto* g = std::get_if<Growing>(&r)) return g->fill_time;
    if (const auto* s = std::get_if<Shrinking>(&r)) return s->collapse_time;
    return std::nullopt;
}

// Mass threshold separating growth from collapse: M_c = a*b^n/(1-b^n).
inline double critical_mass(double a, double b, int n) {
    const double bn = std::pow(b, n);
    return a * bn / (1.0 - bn);
}

inline Regime classify(double a, double b, int n, double M) {
    const double mc = critical_mass(a, b, n);
    const double bn = std::pow(b, n);
    if (std::abs(M - mc) <= 1e-12 * mc) return Stationary{};
    if (M < mc) {
        // time at which h reaches 1: bracket (b^n - M/(a+M))e^{n(a+M)t} + M/(a+M) = 1
        const double fill = std::log(a / ((a + M) * bn - M)) / (n * (a + M));
        return Growing{fill};
    }
    const double tstar = std::log(M / ((1.0 - bn) * M - a * bn)) / (n * (a + M));
    return Shrinking{tstar};
}

// h(t) = [(b^n - M/(a+M)) e^{n(a+M)t} + M/(a+M)]^{1/n}, continued with h = 1
// after a fill event; undefined past collapse.
inline double h_exact(double t, double a, double b, int n, double M) {
    const Regime reg = classify(a, b, n, M);
    if (std::holds_alternative<Stationary>(reg)) return b; // bracket is constant b^n
    if (const auto* g = std::get_if<Growing>(&reg)) {
        if (t >= g->fill_time) return 1.0;
    }
    if (const auto* s = std::get_if<Shrinking>(&reg)) {
        if (t > s->collapse_time * (1.0 + 1e-12)) throw PastCollapse();
    }
    const double bn = std::pow(b, n);
    const double q = M / (a + M);
    const double bracket = (bn - q) * std::exp(n * (a + M) * t) + q;
    if (bracket <= 0.0) return 0.0; // roundoff at t = T*: the limit value
    return std::pow(bracket, 1.0 / n);
}

// Dirac weight of the collapse limit: the conserved ambient-space integral
// (2 pi^{n/2} / Gamma(n/2)) * M, i.e. unit-sphere area times M.
inline double collapse_profile_weight(int n, double M) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n) * M;
}

} // namespace fbchemo
