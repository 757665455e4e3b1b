// spectral.hpp: bath spectral densities and their dissipation kernels

#pragma once

#include <string>

#include "qbt/special_functions.hpp"

namespace qbt {

enum class SpectralVariant { LorentzDrude, ExpCutoff };

struct SpectralModel {
    SpectralVariant variant = SpectralVariant::LorentzDrude;
    double gamma = 1.0;
    double omega_c = 100.0;
    double s = 1.0;             // Ohmicity, ExpCutoff only
    bool numeric_only = false;  // Re χ̃ through the principal-value integral

    static SpectralModel lorentz_drude(double gamma, double omega_c);
    static SpectralModel exp_cutoff(double gamma, double omega_c, double s,
                                    bool numeric_only = false);

    // "lorentz-drude", "exp-cutoff-s1", "exp-cutoff-s2", "exp-cutoff-s1.5"
    std::string id() const;
};

// Throws DomainError for γ ≤ 0, ω_c ≤ 0, s < 1, or s ∉ {1, 2} without numeric_only.
void validate(const SpectralModel& model);

double spectral_density(const SpectralModel& model, double omega);

// Odd extension of J.
double chi_imag(const SpectralModel& model, double omega);

// dIm χ̃/dω, even in ω.
double chi_imag_derivative(const SpectralModel& model, double omega);

double chi_real(const SpectralModel& model, double omega);

Complex chi_fourier(const SpectralModel& model, double omega);

double renormalization_freq_sq(const SpectralModel& model);

// (1/π) P∫ Im χ̃(ω′)/(ω′ − ω) dω′ with the pole excised symmetrically.
// Throws QuadratureError (carrying the partial estimate) if it does not converge.
double kramers_kronig_numeric(const SpectralModel& model, double omega);

}  // namespace qbt
