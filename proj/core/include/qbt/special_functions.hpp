// special_functions.hpp: complex digamma, exponential integrals, Euler Gamma
//
// All functions are pure: no caching, no global state, safe to call from any thread.

#pragma once

#include <complex>

namespace qbt {

using Complex = std::complex<double>;

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// ψ(z) = d/dz ln Γ(z). Throws PoleError within 1e-12 of a non-positive integer.
Complex digamma(Complex z);

enum class EiKind {
    NegativeArg,     // Ei(x) for x < 0, equal to -E1(-x)
    PrincipalValue,  // Ēi(x) for x > 0, Cauchy principal value of the defining integral
};

// Ei(x) := -∫_{-x}^∞ e^{-t}/t dt. Throws DomainError at x = 0, for an argument whose
// sign does not match `kind`, and when Ēi(x) overflows a double (x ≳ 709).
double exp_integral(double x, EiKind kind);

// e^{-x} Ei(x) for any x ≠ 0 (principal value for x > 0). Finite for all finite x,
// which is what the dissipation-kernel closed forms need at large |ω|/ω_c.
double scaled_exp_integral(double x);

// Γ(s) for s > 0.
double gamma_fn(double s);

}  // namespace qbt
