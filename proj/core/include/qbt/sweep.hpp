// sweep.hpp: parameter sweeps behind the figure data and the CLI tables

#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qbt/metrology.hpp"
#include "qbt/spectral.hpp"
#include "qbt/star_oracle.hpp"
#include "qbt/steady_state.hpp"

namespace qbt {

struct Grid {
    double from = 0.0;
    double to = 1.0;
    int points = 2;
    bool log = false;

    void validate() const;
    std::vector<double> values() const;
};

using Cell = std::variant<double, std::string>;

struct Table {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    std::size_t column(const std::string& name) const;  // throws std::out_of_range
    double number(std::size_t row, const std::string& name) const;
};

struct SweepOptions {
    unsigned threads = 0;  // 0 = hardware concurrency
};

// One row per temperature: covariance, QFI, both sensitivities, δT/T.
Table sweep_sensitivity(const SpectralModel& model, const ProbeSpec& probe, const Grid& temps,
                        const SweepOptions& opts = {});

// Covariance and QFI only.
Table sweep_qfi(const SpectralModel& model, const ProbeSpec& probe, const Grid& temps,
                const SweepOptions& opts = {});

// δT/T against T for each γ, with the equilibrium reference in log10 form.
Table fig1a(const std::vector<double>& gammas, double omega_c, const Grid& temps,
            const SweepOptions& opts = {});

// QFI against γ for each T.
Table fig1b(const std::vector<double>& temps, double omega_c, const Grid& gammas,
            const SweepOptions& opts = {});

// QFI and sensitivities against T for each γ.
Table fig2(const std::vector<double>& gammas, double omega_c, const Grid& temps,
           const SweepOptions& opts = {});

// Ohmic vs super-Ohmic exponential-cutoff QFI against T, plus J_s on a frequency grid.
Table fig3(double gamma, double omega_c, const Grid& temps, const Grid& freqs,
           const SweepOptions& opts = {});

struct StarSweepSpec {
    SpectralModel model;
    ProbeSpec probe;
    double T = 0.1;
    int n_modes = 2000;
    double omega_max = 2000.0;
    std::vector<double> scales{1.0};  // G values
};

// Reduced covariance, star QFI, marginal QFI and continuum reference per G.
Table star_sweep(const StarSweepSpec& spec, const SweepOptions& opts = {});

// Number of eigenvalues whose ∂_Gλ sign disagrees with sign(λ − Ω₀²).
int derivative_sign_violations(const StarSystem& star, const NormalModes& modes,
                               const std::vector<double>& derivatives);

}  // namespace qbt
