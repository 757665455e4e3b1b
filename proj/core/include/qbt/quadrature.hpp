// quadrature.hpp: adaptive Gauss-Kronrod over explicit panels, with an error estimate

#pragma once

#include <functional>
#include <span>
#include <string>

namespace qbt::quad {

struct Estimate {
    double value = 0.0;
    double error = 0.0;  // absolute error estimate
};

struct Options {
    double abs_tol = 0.0;
    double rel_tol = 1e-10;
    unsigned max_depth = 30;
};

using Integrand = std::function<double(double)>;

// Adaptive 31-point Kronrod on [a, b] (finite). Throws QuadratureError when the
// estimate misses max(abs_tol, rel_tol·|∫|f||).
Estimate integrate(const Integrand& f, double a, double b, const Options& opts = {});

// ∫_a^∞ f for a > 0, through the map x = a/t on t ∈ (0, 1].
Estimate integrate_tail(const Integrand& f, double a, const Options& opts = {});

// Sum over consecutive panels [p_i, p_{i+1}], optionally followed by the tail to ∞
// from the last breakpoint. The tolerance applies to the total.
Estimate integrate_panels(const Integrand& f, std::span<const double> breakpoints,
                          bool tail_to_infinity, const Options& opts = {});

}  // namespace qbt::quad
