#include "qbt/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qbt/errors.hpp"

namespace qbt {

namespace {

constexpr double kStepAgreement = 1e-3;
constexpr double kBoundSlack = 1e-3;

void check_temperature(double T, const char* who) {
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw DomainError(std::string(who) + ": temperature must be positive and finite");
    }
}

double default_step(const TemperatureFamily& family, double T) {
    const double step = std::max(1e-3 * T, 1e-7 * family.frequency_scale());
    if (step >= 0.5 * T) {
        throw DomainError("finite-difference step underflow: T too small for the covariance "
                          "precision (delta >= T/2)");
    }
    return step;
}

double symmetric_qfi(const TemperatureFamily& family, const CovarianceMatrix& s, double T,
                     double d) {
    const double up = gaussian_infidelity(s, family.increment(T, T + d));
    const double down = gaussian_infidelity(s, family.increment(T, T - d));
    return 2.0 * (up + down) / (d * d);
}

template <typename F>
double richardson(F&& at, double h) {
    return (4.0 * at(0.5 * h) - at(h)) / 3.0;
}

double relative_gap(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

double observable_mean_increment(Observable obs, const CovarianceMatrix& d, double omega0) {
    if (obs == Observable::XSquared) return d.sigma_xx;
    return 0.5 * (omega0 * omega0 * d.sigma_xx + d.sigma_pp);
}

}  // namespace

double gaussian_infidelity(const CovarianceMatrix& s, const CovarianceMatrix& delta) {
    const CovarianceMatrix s2 = s + delta;
    check_physical(s);
    check_physical(s2);
    const double det_d = delta.det();
    const double a = std::max(0.0, 4.0 * s.det() - 1.0);
    const double b = std::max(0.0, 4.0 * s2.det() - 1.0);
    // a − b without subtracting the two determinants
    const double cross = s.sigma_pp * delta.sigma_xx + s.sigma_xx * delta.sigma_pp -
                         2.0 * s.sigma_xp * delta.sigma_xp;
    const double a_minus_b = -4.0 * (cross + det_d);

    const double big_delta = 4.0 * (s + s2).det();
    const double lambda = a * b;
    const double root_sum = std::sqrt(a) + std::sqrt(b);
    const double sq_gap = root_sum > 0.0 ? a_minus_b * a_minus_b / (root_sum * root_sum) : 0.0;
    const double numerator = (-4.0 * det_d + 2.0 * sq_gap) /
                             (std::sqrt(big_delta + lambda) + std::sqrt(lambda) + 2.0);
    return numerator / (std::sqrt(big_delta + lambda) - std::sqrt(lambda));
}

double gaussian_fidelity(const CovarianceMatrix& s1, const CovarianceMatrix& s2) {
    return 1.0 - gaussian_infidelity(s1, s2 - s1);
}

double qfi_equilibrium(double omega, double T) {
    if (!(omega > 0.0) || !(T > 0.0)) {
        throw DomainError("qfi_equilibrium: omega and T must be positive");
    }
    const double x = omega / (2.0 * T);
    const double inv = -std::expm1(-2.0 * x);
    // csch²x = 4e^{−2x}/(1 − e^{−2x})²
    const double csch2 = 4.0 * std::exp(-2.0 * x) / (inv * inv);
    return omega * omega / (4.0 * T * T * T * T) * csch2;
}

double log_qfi_equilibrium(double omega, double T) {
    if (!(omega > 0.0) || !(T > 0.0)) {
        throw DomainError("log_qfi_equilibrium: omega and T must be positive");
    }
    const double x = omega / (2.0 * T);
    return 2.0 * std::log(omega) - 4.0 * std::log(T) - 2.0 * x -
           2.0 * std::log(-std::expm1(-2.0 * x));
}

QfiEstimate qfi_estimate(const TemperatureFamily& family, double T) {
    check_temperature(T, "qfi_from_fidelity");
    const double d = default_step(family, T);
    const CovarianceMatrix s = family.covariance(T);
    auto q = [&](double h) { return symmetric_qfi(family, s, T, h); };
    const double coarse = richardson(q, d);
    const double fine = richardson(q, 0.5 * d);
    QfiEstimate out{fine, d, relative_gap(coarse, fine)};
    if (out.discrepancy > kStepAgreement) {
        throw ConvergenceError("qfi_from_fidelity: step-halving estimates disagree", fine,
                               std::abs(fine - coarse));
    }
    out.value = std::max(0.0, out.value);
    return out;
}

double qfi_from_fidelity(const TemperatureFamily& family, double T) {
    return qfi_estimate(family, T).value;
}

double qfi_from_fidelity(const SpectralModel& model, const ProbeSpec& probe, double T) {
    return qfi_from_fidelity(SteadyStateSolver(model, probe), T);
}

double mean_energy(const CovarianceMatrix& s, double omega0) {
    return 0.5 * (omega0 * omega0 * s.sigma_xx + s.sigma_pp);
}

double variance_energy(const CovarianceMatrix& s, double omega0) {
    const double w2 = omega0 * omega0;
    return 0.5 * (w2 * w2 * s.sigma_xx * s.sigma_xx + s.sigma_pp * s.sigma_pp) - 0.25 * w2;
}

double variance_x_squared(const CovarianceMatrix& s) { return 2.0 * s.sigma_xx * s.sigma_xx; }

double sensitivity(Observable obs, const TemperatureFamily& family, double T) {
    check_temperature(T, "sensitivity");
    const double w0 = family.frequency_scale();
    const double h = 1e-3 * T;
    auto slope = [&](double step) {
        const auto d = family.increment(T - step, T + step);
        return observable_mean_increment(obs, d, w0) / (2.0 * step);
    };
    const double coarse = richardson(slope, h);
    const double fine = richardson(slope, 0.5 * h);
    if (relative_gap(coarse, fine) > kStepAgreement) {
        throw ConvergenceError("sensitivity: step-halving derivatives disagree", fine,
                               std::abs(fine - coarse));
    }
    const CovarianceMatrix s = family.covariance(T);
    const double var = obs == Observable::XSquared ? variance_x_squared(s) : variance_energy(s, w0);
    if (!(var > 0.0)) throw DomainError("sensitivity: vanishing observable variance");
    return fine * fine / var;
}

double sensitivity(Observable obs, const SpectralModel& model, const ProbeSpec& probe, double T) {
    return sensitivity(obs, SteadyStateSolver(model, probe), T);
}

double relative_error(double qfi, double T) {
    if (!(qfi >= 0.0)) throw DomainError("relative_error: negative or NaN QFI");
    if (!(T > 0.0)) throw DomainError("relative_error: temperature must be positive");
    if (qfi == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / (T * std::sqrt(qfi));
}

SensitivityReport sensitivity_report(const SteadyStateSolver& solver, double T) {
    SensitivityReport r;
    const auto& m = solver.model();
    r.model_id = m.id();
    r.gamma = m.gamma;
    r.omega_c = m.omega_c;
    r.s = m.s;
    r.omega0 = solver.probe().omega0;
    r.T = T;
    r.cov = solver.covariance(T);
    r.qfi = qfi_from_fidelity(solver, T);
    r.f_energy = sensitivity(Observable::Energy, solver, T);
    r.f_xsq = sensitivity(Observable::XSquared, solver, T);
    r.rel_error = relative_error(r.qfi, T);
    return r;
}

void check_bound_chain(const SensitivityReport& r) {
    const double cap = r.qfi * (1.0 + kBoundSlack);
    if (r.f_energy > cap) throw Error("bound chain violated: F_T(H_p) exceeds the QFI");
    if (r.f_xsq > cap) throw Error("bound chain violated: F_T(x^2) exceeds the QFI");
}

}  // namespace qbt
