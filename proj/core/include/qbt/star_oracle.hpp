// star_oracle.hpp: finite star-system surrogate of the probe + bath

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "qbt/spectral.hpp"
#include "qbt/steady_state.hpp"

namespace qbt {

struct StarSystem {
    double omega0 = 1.0;
    std::vector<double> bath_freqs;  // ω_μ
    std::vector<double> couplings;   // g_μ
    double scale = 1.0;              // G
};

void validate(const StarSystem& star);

struct NormalModes {
    Eigen::VectorXd eigenvalues;  // ascending
    Eigen::MatrixXd mode_matrix;  // columns are modes; row 0 holds probe weights
};

// Midpoint grid ω_μ = (μ − ½)Δω, Δω = ω_max/n, g_μ² = (2/π) ω_μ J(ω_μ) Δω, G = 1.
StarSystem discretize_bath(const SpectralModel& model, int n_modes, double omega_max,
                           double omega0 = 1.0);

// Ω₀² = ω₀² + G² Σ g_μ²/ω_μ²
double shifted_frequency_sq(const StarSystem& star);

Eigen::MatrixXd interaction_matrix(const StarSystem& star);
// Same, with V₀₀ pinned to a given value instead of Ω₀²(G).
Eigen::MatrixXd interaction_matrix(const StarSystem& star, double v00);

// Bath frequencies closer than 1e-12 relative are split by 1e-9 relative before use.
StarSystem with_split_degeneracies(const StarSystem& star);

NormalModes normal_modes(const StarSystem& star);

// ∂_G λ_i at fixed V₀₀. Throws PoleError when λ_i is within 1e-8 of some ω_k²
// (or within the eigen-solver's resolution, 1e3·ε·max λ, if that is larger).
std::vector<double> eigenvalue_coupling_derivatives(const StarSystem& star);
std::vector<double> eigenvalue_coupling_derivatives(const StarSystem& star,
                                                    const NormalModes& modes);

// max_i |Ω₀² − λ_i − Σ G²g_k²/(ω_k² − λ_i)| / max(1, λ_i)
double secular_residual(const StarSystem& star, const NormalModes& modes);

CovarianceMatrix reduced_probe_covariance(const StarSystem& star, double T);

double star_qfi(const StarSystem& star, double T);

// Probe marginal of the global Gibbs state, diagonalized once.
class StarFamily final : public TemperatureFamily {
public:
    explicit StarFamily(const StarSystem& star);
    CovarianceMatrix covariance(double T) const override;
    CovarianceMatrix increment(double T1, double T2) const override;
    double frequency_scale() const override { return star_.omega0; }

    const NormalModes& modes() const { return modes_; }
    double star_qfi(double T) const;

private:
    StarSystem star_;
    NormalModes modes_;
};

}  // namespace qbt
