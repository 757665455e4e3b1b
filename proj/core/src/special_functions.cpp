// special_functions.cpp: digamma, Ei/Ēi and Γ implementations

#include "qbt/special_functions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "qbt/errors.hpp"

namespace qbt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Switch from recurrence to the asymptotic series once Re z reaches this value.
constexpr double kDigammaAsymptoticStart = 12.0;

// B_{2k} / (2k), k = 1..8
constexpr std::array<double, 8> kDigammaAsymptoticCoeffs = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 4.0,
    1.0 / 42.0 / 6.0,
    -1.0 / 30.0 / 8.0,
    5.0 / 66.0 / 10.0,
    -691.0 / 2730.0 / 12.0,
    7.0 / 6.0 / 14.0,
    -3617.0 / 510.0 / 16.0,
};

Complex digamma_asymptotic(Complex w) {
    const Complex inv = 1.0 / w;
    const Complex inv2 = inv * inv;
    // Horner in 1/w² over the Bernoulli tail.
    Complex tail = 0.0;
    for (auto it = kDigammaAsymptoticCoeffs.rbegin(); it != kDigammaAsymptoticCoeffs.rend(); ++it) {
        tail = tail * inv2 + *it;
    }
    tail *= inv2;
    return std::log(w) - 0.5 * inv - tail;
}

// Σ_{n≥1} xⁿ/(n·n!), summed until terms stop contributing.
double ei_power_tail(double x) {
    double term = 1.0;
    double sum = 0.0;
    for (int n = 1; n < 500; ++n) {
        term *= x / n;
        const double contrib = term / n;
        sum += contrib;
        if (n > std::abs(x) && std::abs(contrib) <= kEps * std::abs(sum)) break;
    }
    return sum;
}

double ei_series(double x) {
    return kEulerGamma + std::log(std::abs(x)) + ei_power_tail(x);
}

// e^{x} E1(x) for x > 1 by modified Lentz evaluation of the continued fraction.
double scaled_e1_continued_fraction(double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) <= kEps) return h;
    }
    throw ConvergenceError("E1 continued fraction did not converge", h, std::abs(h) * 1e-10);
}

// e^{-x} Ēi(x) for large positive x: (1/x) Σ k!/x^k, truncated at the smallest term.
double scaled_ei_asymptotic(double x) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double next = term * k / x;
        if (next > term) break;
        term = next;
        sum += term;
        if (term <= kEps * sum) break;
    }
    return sum / x;
}

constexpr double kEiSeriesLimit = 40.0;
constexpr double kE1SeriesLimit = 1.0;

void check_finite(double x, const char* who) {
    if (!std::isfinite(x)) throw DomainError(std::string(who) + ": non-finite argument");
}

}  // namespace

Complex digamma(Complex z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw DomainError("digamma: non-finite argument");
    }
    if (z.real() <= 0.5) {
        const double n = std::round(z.real());
        if (n <= 0.0 && std::abs(z - Complex(n, 0.0)) < 1e-12) {
            throw PoleError("digamma: argument at a non-positive integer pole");
        }
    }
    if (z.real() < 0.0) {
        // ψ(z) = ψ(1 - z) - π cot(πz)
        return digamma(1.0 - z) - kPi / std::tan(kPi * z);
    }
    Complex shift = 0.0;
    while (z.real() < kDigammaAsymptoticStart) {
        shift += 1.0 / z;
        z += 1.0;
    }
    return digamma_asymptotic(z) - shift;
}

double scaled_exp_integral(double x) {
    check_finite(x, "scaled_exp_integral");
    if (x == 0.0) throw DomainError("scaled_exp_integral: logarithmic singularity at x = 0");
    if (x < 0.0) {
        const double ax = -x;
        if (ax <= kE1SeriesLimit) return std::exp(ax) * ei_series(x);
        return -scaled_e1_continued_fraction(ax);
    }
    if (x <= kEiSeriesLimit) return std::exp(-x) * ei_series(x);
    return scaled_ei_asymptotic(x);
}

double exp_integral(double x, EiKind kind) {
    check_finite(x, "exp_integral");
    if (x == 0.0) throw DomainError("exp_integral: logarithmic singularity at x = 0");
    switch (kind) {
        case EiKind::NegativeArg: {
            if (x > 0.0) throw DomainError("exp_integral: Ei(x) of kind NegativeArg needs x < 0");
            const double ax = -x;
            if (ax <= kE1SeriesLimit) return ei_series(x);
            return -scaled_e1_continued_fraction(ax) * std::exp(-ax);
        }
        case EiKind::PrincipalValue: {
            if (x < 0.0) throw DomainError("exp_integral: Ēi(x) of kind PrincipalValue needs x > 0");
            if (x <= kEiSeriesLimit) return ei_series(x);
            const double value = scaled_ei_asymptotic(x) * std::exp(x);
            if (!std::isfinite(value)) throw DomainError("exp_integral: Ēi(x) overflows a double");
            return value;
        }
    }
    throw DomainError("exp_integral: unknown kind");
}

double gamma_fn(double s) {
    check_finite(s, "gamma_fn");
    if (s <= 0.0) throw DomainError("gamma_fn: argument must be positive");
    if (s < 0.5) {
        // Γ(s) Γ(1 - s) = π / sin(πs)
        return kPi / (std::sin(kPi * s) * gamma_fn(1.0 - s));
    }
    if (s > 171.6) throw DomainError("gamma_fn: Γ(s) overflows a double");

    // Lanczos, g = 7, n = 9
    static constexpr std::array<double, 9> c = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
    };
    constexpr double g = 7.0;
    const double z = s - 1.0;
    double a = c[0];
    for (std::size_t i = 1; i < c.size(); ++i) a += c[i] / (z + static_cast<double>(i));
    const double t = z + g + 0.5;
    // Split t^{z+1/2} to keep the intermediate finite near the upper limit.
    const double half_power = std::pow(t, 0.5 * (z + 0.5));
    return std::sqrt(2.0 * kPi) * half_power * (half_power * std::exp(-t)) * a;
}

}  // namespace qbt
