// metrology.hpp: Gaussian fidelity, temperature QFI, observable sensitivities

#pragma once

#include <string>

#include "qbt/steady_state.hpp"

namespace qbt {

// Uhlmann fidelity of two undisplaced single-mode Gaussian states.
double gaussian_fidelity(const CovarianceMatrix& s1, const CovarianceMatrix& s2);

// 1 − 𝔽(σ, σ + Δ), computed from Δ directly so that O(δ²) infidelities survive.
double gaussian_infidelity(const CovarianceMatrix& s, const CovarianceMatrix& delta);

double qfi_equilibrium(double omega, double T);

// ln 𝓕^{eq}; finite where qfi_equilibrium underflows.
double log_qfi_equilibrium(double omega, double T);

struct QfiEstimate {
    double value = 0.0;
    double step = 0.0;          // δ
    double discrepancy = 0.0;   // relative gap between the {δ, δ/2} and {δ/2, δ/4} extrapolations
};

// 4(1 − 𝔽(σ(T), σ(T ± δ)))/δ², symmetrized, Richardson-extrapolated.
// Throws ConvergenceError when the two extrapolations differ by more than 0.1%.
QfiEstimate qfi_estimate(const TemperatureFamily& family, double T);
double qfi_from_fidelity(const TemperatureFamily& family, double T);
double qfi_from_fidelity(const SpectralModel& model, const ProbeSpec& probe, double T);

enum class Observable { Energy, XSquared };

double mean_energy(const CovarianceMatrix& s, double omega0);
double variance_energy(const CovarianceMatrix& s, double omega0);
double variance_x_squared(const CovarianceMatrix& s);

// F_T(O) = (∂_T⟨O⟩)²/Var(O), derivative by Richardson central differences.
double sensitivity(Observable obs, const TemperatureFamily& family, double T);
double sensitivity(Observable obs, const SpectralModel& model, const ProbeSpec& probe, double T);

// 1/(T√qfi); +∞ for qfi = 0. Throws DomainError for qfi < 0 or T ≤ 0.
double relative_error(double qfi, double T);

struct SensitivityReport {
    std::string model_id;
    double gamma = 0.0;
    double omega_c = 0.0;
    double s = 1.0;
    double omega0 = 1.0;
    double T = 0.0;
    CovarianceMatrix cov;
    double qfi = 0.0;
    double f_energy = 0.0;
    double f_xsq = 0.0;
    double rel_error = 0.0;
};

SensitivityReport sensitivity_report(const SteadyStateSolver& solver, double T);

// f_energy, f_xsq ≤ qfi·(1 + 1e-3). Throws Error naming the violated bound.
void check_bound_chain(const SensitivityReport& r);

}  // namespace qbt
