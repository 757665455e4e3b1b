#include "qbt/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "qbt/errors.hpp"

namespace qbt {

namespace {

constexpr double kPi = std::numbers::pi;

void check_temperature(double T, const char* who) {
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw DomainError(std::string(who) + ": temperature must be positive and finite");
    }
}

// Root of Re α on (0, ∞). Re α(0) = ω₀² > 0 and Re α → −∞, so a sign change exists.
double find_resonance(const SpectralModel& model, const ProbeSpec& probe) {
    auto re_alpha = [&](double w) { return alpha(model, probe, w).real(); };
    double lo = 0.0;
    double hi = probe.omega0;
    double fhi = re_alpha(hi);
    for (int i = 0; fhi > 0.0; ++i) {
        if (i > 200) throw ConvergenceError("resonance: no sign change of Re alpha", hi, hi);
        lo = hi;
        hi *= 2.0;
        fhi = re_alpha(hi);
    }
    if (fhi == 0.0) return hi;
    const double flo = re_alpha(lo);
    std::uintmax_t iters = 200;
    boost::math::tools::eps_tolerance<double> tol(50);
    auto [a, b] = boost::math::tools::toms748_solve(re_alpha, lo, hi, flo, fhi, tol, iters);
    return 0.5 * (a + b);
}

// ω²·f without inf·0 far out in the mapped tail
double moment2(double w, double f) { return f == 0.0 ? 0.0 : w * w * f; }

// y³ + a y² + b y + c
Complex cubic(double a, double b, double c, Complex y) { return ((y + a) * y + b) * y + c; }
Complex cubic_prime(double a, double b, Complex y) { return (3.0 * y + 2.0 * a) * y + b; }

std::array<Complex, 3> cubic_roots(double a, double b, double c) {
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double disc = 0.25 * q * q + p * p * p / 27.0;
    std::array<Complex, 3> y;
    if (disc > 0.0) {
        const double u = std::cbrt(-0.5 * q - std::copysign(std::sqrt(disc), q));
        const double y1 = u - p / (3.0 * u) - a / 3.0;
        // Deflate: (y − y1)(y² + B y + C)
        const double B = a + y1;
        const double C = b + y1 * B;
        const Complex root = std::sqrt(Complex(B * B - 4.0 * C, 0.0));
        y = {Complex(y1, 0.0), 0.5 * (-B + root), 0.5 * (-B - root)};
    } else {
        const double r = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
        const double phi = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) {
            y[k] = Complex(r * std::cos(phi - 2.0 * kPi * k / 3.0) - a / 3.0, 0.0);
        }
    }
    for (auto& root : y) {
        const Complex d = cubic_prime(a, b, root);
        if (std::abs(d) > 0.0) root -= cubic(a, b, c, root) / d;
    }
    return y;
}

}  // namespace

void validate(const ProbeSpec& probe) {
    if (!(probe.omega0 > 0.0) || !std::isfinite(probe.omega0)) {
        throw DomainError("probe: omega0 must be positive and finite");
    }
}

CovarianceMatrix operator+(const CovarianceMatrix& a, const CovarianceMatrix& b) {
    return {a.sigma_xx + b.sigma_xx, a.sigma_pp + b.sigma_pp, a.sigma_xp + b.sigma_xp};
}

CovarianceMatrix operator-(const CovarianceMatrix& a, const CovarianceMatrix& b) {
    return {a.sigma_xx - b.sigma_xx, a.sigma_pp - b.sigma_pp, a.sigma_xp - b.sigma_xp};
}

void check_physical(const CovarianceMatrix& s) {
    if (!std::isfinite(s.sigma_xx) || !std::isfinite(s.sigma_pp) || !std::isfinite(s.sigma_xp)) {
        throw PhysicalityError("covariance: non-finite entry");
    }
    if (!(s.sigma_xx > 0.0) || !(s.sigma_pp > 0.0)) {
        throw PhysicalityError("covariance: diagonal entries must be positive");
    }
    if (s.det() < 0.25 - 1e-9) {
        throw PhysicalityError("covariance: det sigma below 1/4 violates the uncertainty relation");
    }
}

double bose_occupation(double omega, double T) { return 1.0 / std::expm1(omega / T); }

double bose_difference(double omega, double T1, double T2) {
    const double a1 = omega / T1;
    const double a2 = omega / T2;
    if (a2 > a1) return -bose_difference(omega, T2, T1);
    // (e^{−a2} − e^{−a1}) / ((1 − e^{−a1})(1 − e^{−a2})), no overflow for large a
    return -std::exp(-a2) * std::expm1(a2 - a1) / (std::expm1(-a1) * std::expm1(-a2));
}

Complex alpha(const SpectralModel& model, const ProbeSpec& probe, double omega) {
    const double w0sq = probe.omega0 * probe.omega0;
    return Complex(w0sq + renormalization_freq_sq(model) - omega * omega, 0.0) -
           chi_fourier(model, omega);
}

quad::Options SteadyStateSolver::default_options() {
    quad::Options o;
    o.abs_tol = 0.0;
    o.rel_tol = 1e-10;
    o.max_depth = 40;
    return o;
}

SteadyStateSolver::SteadyStateSolver(const SpectralModel& model, const ProbeSpec& probe,
                                     const quad::Options& opts)
    : model_(model), probe_(probe), opts_(opts) {
    validate(model_);
    validate(probe_);
    resonance_ = find_resonance(model_, probe_);
    width_ = spectral_density(model_, resonance_) / (2.0 * resonance_);

    const auto pts = breakpoints(0.0, 0.0);
    auto fx = [&](double w) { return weight(w); };
    auto fp = [&](double w) { return moment2(w, weight(w)); };
    const auto ex = quad::integrate_panels(fx, pts, true, opts_);
    const auto ep = quad::integrate_panels(fp, pts, true, opts_);
    ground_ = {{ex.value, ep.value, 0.0}, ex.error, ep.error};
}

double SteadyStateSolver::weight(double omega) const {
    const double j = spectral_density(model_, omega);
    if (j == 0.0) return 0.0;
    return j / (kPi * std::norm(alpha(model_, probe_, omega)));
}

std::vector<double> SteadyStateSolver::breakpoints(double T1, double T2) const {
    const double top = 20.0 * model_.omega_c;
    std::vector<double> pts{0.0, probe_.omega0, resonance_, model_.omega_c, top};
    for (double step = width_; step < std::max(resonance_, top); step *= 4.0) {
        pts.push_back(resonance_ + step);
        if (resonance_ - step > 0.0) pts.push_back(resonance_ - step);
    }
    for (double T : {T1, T2}) {
        if (T <= 0.0) continue;
        for (double k : {1.0, 10.0, 50.0}) pts.push_back(k * T);
    }
    std::erase_if(pts, [&](double p) { return p < 0.0 || p > top; });
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

CovarianceEstimate SteadyStateSolver::estimate(double T) const {
    check_temperature(T, "covariance_numeric");
    const auto pts = breakpoints(T, T);
    auto fx = [&](double w) { return 2.0 * weight(w) * bose_occupation(w, T); };
    auto fp = [&](double w) { return 2.0 * moment2(w, weight(w) * bose_occupation(w, T)); };
    const auto ex = quad::integrate_panels(fx, pts, true, opts_);
    const auto ep = quad::integrate_panels(fp, pts, true, opts_);
    CovarianceEstimate out{ground_.cov + CovarianceMatrix{ex.value, ep.value, 0.0},
                           ground_.error_xx + ex.error, ground_.error_pp + ep.error};
    check_physical(out.cov);
    return out;
}

CovarianceEstimate SteadyStateSolver::increment_estimate(double T1, double T2) const {
    check_temperature(T1, "increment");
    check_temperature(T2, "increment");
    if (T1 == T2) return {{0.0, 0.0, 0.0}, 0.0, 0.0};
    const auto pts = breakpoints(T1, T2);
    auto fx = [&](double w) { return 2.0 * weight(w) * bose_difference(w, T1, T2); };
    auto fp = [&](double w) { return 2.0 * moment2(w, weight(w) * bose_difference(w, T1, T2)); };
    const auto ex = quad::integrate_panels(fx, pts, true, opts_);
    const auto ep = quad::integrate_panels(fp, pts, true, opts_);
    return {{ex.value, ep.value, 0.0}, ex.error, ep.error};
}

CovarianceEstimate covariance_numeric(const SpectralModel& model, const ProbeSpec& probe,
                                      double T) {
    check_temperature(T, "covariance_numeric");
    return SteadyStateSolver(model, probe).estimate(T);
}

CovarianceEstimate covariance_numeric_ground(const SpectralModel& model, const ProbeSpec& probe) {
    auto g = SteadyStateSolver(model, probe).ground_state();
    check_physical(g.cov);
    return g;
}

AnalyticLDResult covariance_analytic_ld(double gamma, double omega_c, const ProbeSpec& probe,
                                        double T) {
    check_temperature(T, "covariance_analytic_ld");
    validate(probe);
    validate(SpectralModel{SpectralVariant::LorentzDrude, gamma, omega_c});

    const double w0sq = probe.omega0 * probe.omega0;
    const double a = omega_c;
    const double b = w0sq + 2.0 * gamma * omega_c;
    const double c = w0sq * omega_c;
    const auto y = cubic_roots(a, b, c);

    double scale = 1.0;
    double min_gap = std::numeric_limits<double>::infinity();
    for (const auto& r : y) scale = std::max(scale, std::abs(r));
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            min_gap = std::min(min_gap, std::abs(y[i] - y[j]));
            if (std::abs(y[i] - y[j]) < 1e-10 * scale) {
                throw UnsupportedParameterError(
                    "covariance_analytic_ld: repeated roots of the Matsubara cubic");
            }
        }
        const double mag = std::pow(std::abs(y[i]), 3) + a * std::pow(std::abs(y[i]), 2) +
                           b * std::abs(y[i]) + c;
        if (std::abs(cubic(a, b, c, y[i])) > 1e-9 * mag) {
            throw ConvergenceError("covariance_analytic_ld: cubic root residual too large",
                                   std::abs(cubic(a, b, c, y[i])), mag);
        }
    }

    AnalyticLDSolution sol;
    sol.matsubara_nu1 = 2.0 * kPi * T;
    Complex sum_x = 0.0;
    Complex sum_p = 0.0;
    Complex sum_c = 0.0;
    double abs_c = 0.0;
    for (int m = 0; m < 3; ++m) {
        const Complex denom = 2.0 * kPi * cubic_prime(a, b, y[m]);
        sol.roots[m] = y[m] / sol.matsubara_nu1 - 1.0;
        sol.coeffs_x[m] = (y[m] + omega_c) / denom;
        sol.coeffs_p[m] = (c + y[m] * b) / denom;
        const Complex psi = digamma(-sol.roots[m]);
        sum_x += sol.coeffs_x[m] * psi;
        sum_p += sol.coeffs_p[m] * psi;
        sum_c += sol.coeffs_x[m];
        abs_c += std::abs(sol.coeffs_x[m]);
    }
    if (std::abs(sum_c) > 1e-10 * std::max(1.0, abs_c)) {
        // rounding splits an exact multiple root by up to ~ε^{1/3}
        if (min_gap < 1e-4 * scale) {
            throw UnsupportedParameterError(
                "covariance_analytic_ld: nearly repeated roots of the Matsubara cubic");
        }
        throw ConvergenceError("covariance_analytic_ld: partial-fraction weights do not sum to zero",
                               std::abs(sum_c), abs_c);
    }

    const Complex sxx = T / w0sq - 2.0 * sum_x;
    const Complex spp = T - 2.0 * sum_p;
    sol.imag_residue = std::max(std::abs(sxx.imag()), std::abs(spp.imag()));
    if (sol.imag_residue > 1e-9 * std::max({1.0, std::abs(sxx.real()), std::abs(spp.real())})) {
        throw ConvergenceError("covariance_analytic_ld: digamma sums are not real",
                               sxx.real(), sol.imag_residue);
    }
    AnalyticLDResult out{{sxx.real(), spp.real(), 0.0}, sol};
    check_physical(out.cov);
    return out;
}

CovarianceMatrix covariance_lowT_approx(double gamma, double omega_c, const ProbeSpec& probe,
                                        double T) {
    const double w0 = probe.omega0;
    const double log_ratio = std::log(omega_c / w0);
    const double xx = 1.0 / (2.0 * w0) -
                      1.0 / (2.0 * w0) *
                          (2.0 * gamma / (kPi * w0) + 2.0 * T / w0 +
                           4.0 * gamma * w0 / (kPi * omega_c * omega_c) * log_ratio);
    const double pp = w0 / 2.0 + w0 / 2.0 *
                                     (4.0 * gamma / (kPi * w0) * log_ratio + 3.0 * gamma / omega_c -
                                      (2.0 * T / w0 + 2.0 * gamma / (kPi * w0)));
    return {xx, pp, 0.0};
}

CovarianceMatrix thermal_covariance(const ProbeSpec& probe, double T) {
    check_temperature(T, "thermal_covariance");
    validate(probe);
    const double w0 = probe.omega0;
    const double coth = 1.0 + 2.0 * bose_occupation(w0, T);
    return {coth / (2.0 * w0), 0.5 * w0 * coth, 0.0};
}

ThermalFamily::ThermalFamily(const ProbeSpec& probe) : probe_(probe) { validate(probe_); }

CovarianceMatrix ThermalFamily::covariance(double T) const { return thermal_covariance(probe_, T); }

CovarianceMatrix ThermalFamily::increment(double T1, double T2) const {
    check_temperature(T1, "increment");
    check_temperature(T2, "increment");
    const double w0 = probe_.omega0;
    const double dn = T1 == T2 ? 0.0 : bose_difference(w0, T1, T2);
    return {dn / w0, dn * w0, 0.0};
}

}  // namespace qbt
