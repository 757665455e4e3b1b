#include "qbt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "qbt/errors.hpp"
#include "qbt/quadrature.hpp"

namespace qbt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Beyond this |ω|/ω_c the Ei closed forms cancel to γω_c − γω_c(1 + …).
constexpr double kAsymptoticSwitch = 40.0;

bool is_integer_s(const SpectralModel& m, double value) {
    return m.variant == SpectralVariant::ExpCutoff && m.s == value;
}

bool closed_form_available(const SpectralModel& m) {
    if (m.numeric_only) return false;
    return m.variant == SpectralVariant::LorentzDrude || is_integer_s(m, 1.0) ||
           is_integer_s(m, 2.0);
}

// Σ_{k ∈ first, first+2, …} k!/x^(k − shift), stopped at the smallest term.
double factorial_series(double x, int first, int shift) {
    double term = 1.0;
    for (int j = 1; j <= first; ++j) term *= j;
    term /= std::pow(x, first - shift);
    double sum = 0.0;
    for (int k = first; k < 400; k += 2) {
        sum += term;
        const double next = term * (k + 1.0) * (k + 2.0) / (x * x);
        if (next >= term || next <= kEps * std::abs(sum)) break;
        term = next;
    }
    return sum;
}

double re_chi_exp_s1(double gamma, double wc, double omega) {
    const double x = std::abs(omega) / wc;
    if (x > kAsymptoticSwitch) return -gamma * wc * factorial_series(x, 2, 0);
    return gamma * wc -
           0.5 * gamma * std::abs(omega) * (scaled_exp_integral(x) - scaled_exp_integral(-x));
}

double re_chi_exp_s2(double gamma, double wc, double omega) {
    const double x = std::abs(omega) / wc;
    if (x > kAsymptoticSwitch) return -gamma * wc * factorial_series(x, 3, 1);
    return gamma * wc -
           0.5 * gamma / wc * omega * omega * (scaled_exp_integral(x) + scaled_exp_integral(-x));
}

}  // namespace

SpectralModel SpectralModel::lorentz_drude(double gamma, double omega_c) {
    SpectralModel m{SpectralVariant::LorentzDrude, gamma, omega_c, 1.0, false};
    validate(m);
    return m;
}

SpectralModel SpectralModel::exp_cutoff(double gamma, double omega_c, double s, bool numeric_only) {
    SpectralModel m{SpectralVariant::ExpCutoff, gamma, omega_c, s, numeric_only};
    validate(m);
    return m;
}

std::string SpectralModel::id() const {
    if (variant == SpectralVariant::LorentzDrude) return "lorentz-drude";
    std::ostringstream os;
    os << "exp-cutoff-s" << s;
    return os.str();
}

void validate(const SpectralModel& m) {
    if (!(m.gamma > 0.0) || !std::isfinite(m.gamma)) {
        throw DomainError("spectral model: gamma must be positive and finite");
    }
    if (!(m.omega_c > 0.0) || !std::isfinite(m.omega_c)) {
        throw DomainError("spectral model: omega_c must be positive and finite");
    }
    if (m.variant == SpectralVariant::ExpCutoff) {
        if (!(m.s >= 1.0) || !std::isfinite(m.s)) {
            throw DomainError("spectral model: Ohmicity s must be >= 1");
        }
        if (!m.numeric_only && m.s != 1.0 && m.s != 2.0) {
            throw DomainError("spectral model: closed forms exist for s = 1, 2 only; "
                              "enable numeric-only mode for other s");
        }
    }
}

double spectral_density(const SpectralModel& m, double omega) {
    if (omega < 0.0) throw DomainError("spectral_density: negative frequency");
    const double wc = m.omega_c;
    switch (m.variant) {
        case SpectralVariant::LorentzDrude:
            return 2.0 * m.gamma * omega * wc * wc / (omega * omega + wc * wc);
        case SpectralVariant::ExpCutoff:
            if (omega == 0.0) return 0.0;
            {
                const double x = omega / wc;
                return 0.5 * kPi * m.gamma * wc * std::exp(m.s * std::log(x) - x);
            }
    }
    return 0.0;
}

double chi_imag(const SpectralModel& m, double omega) {
    if (omega == 0.0) return 0.0;
    return omega > 0.0 ? spectral_density(m, omega) : -spectral_density(m, -omega);
}

double chi_imag_derivative(const SpectralModel& m, double omega) {
    const double w = std::abs(omega);
    const double wc = m.omega_c;
    switch (m.variant) {
        case SpectralVariant::LorentzDrude: {
            const double den = w * w + wc * wc;
            return 2.0 * m.gamma * wc * wc * (wc * wc - w * w) / (den * den);
        }
        case SpectralVariant::ExpCutoff: {
            if (w == 0.0) return m.s == 1.0 ? 0.5 * kPi * m.gamma : 0.0;
            const double x = w / wc;
            return 0.5 * kPi * m.gamma * std::pow(x, m.s - 1.0) * std::exp(-x) * (m.s - x);
        }
    }
    return 0.0;
}

double renormalization_freq_sq(const SpectralModel& m) {
    switch (m.variant) {
        case SpectralVariant::LorentzDrude: return 2.0 * m.gamma * m.omega_c;
        case SpectralVariant::ExpCutoff: return m.gamma * m.omega_c * gamma_fn(m.s);
    }
    return 0.0;
}

double chi_real(const SpectralModel& m, double omega) {
    if (!std::isfinite(omega)) throw DomainError("chi_real: non-finite frequency");
    if (!closed_form_available(m)) return kramers_kronig_numeric(m, omega);
    const double wc = m.omega_c;
    if (m.variant == SpectralVariant::LorentzDrude) {
        return 2.0 * m.gamma * wc * wc * wc / (wc * wc + omega * omega);
    }
    if (omega == 0.0) return renormalization_freq_sq(m);
    return m.s == 1.0 ? re_chi_exp_s1(m.gamma, wc, omega) : re_chi_exp_s2(m.gamma, wc, omega);
}

Complex chi_fourier(const SpectralModel& m, double omega) {
    return {chi_real(m, omega), chi_imag(m, omega)};
}

double kramers_kronig_numeric(const SpectralModel& m, double omega) {
    if (!std::isfinite(omega)) throw DomainError("kramers_kronig_numeric: non-finite frequency");
    const double w = std::abs(omega);  // Re χ̃ is even
    // ε stays below ω so the excised window never straddles the kink of Im χ̃ at 0.
    // At ω = 0 the integrand 2J(u)/u is regular and nothing is excised.
    const double eps = w == 0.0 ? 0.0 : std::min(1e-4 * std::max(1.0, w), 0.5 * w);

    // (1/π)∫_0^∞ [Im χ̃(ω+u) − Im χ̃(ω−u)]/u du, with [0, ε] replaced by its linear term.
    auto g = [&](double u) { return (chi_imag(m, w + u) - chi_imag(m, w - u)) / u; };
    const double excised = 2.0 * chi_imag_derivative(m, w) * eps;

    std::vector<double> pts{eps};
    for (double p : {w, m.omega_c, 2.0 * m.omega_c, 5.0 * m.omega_c, 10.0 * m.omega_c,
                     20.0 * m.omega_c, 50.0 * m.omega_c, w + m.omega_c, w + 10.0 * m.omega_c}) {
        if (p > eps) pts.push_back(p);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    quad::Options opts;
    opts.rel_tol = 1e-11;
    opts.abs_tol = 1e-14 * m.gamma * m.omega_c;
    const auto est = quad::integrate_panels(g, pts, true, opts);
    return (est.value + excised) / kPi;
}

}  // namespace qbt
