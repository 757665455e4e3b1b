// steady_state.hpp: stationary probe covariances: quadrature, digamma closed form,
// low-temperature expansion and the Gibbs reference

#pragma once

#include <array>
#include <vector>

#include "qbt/quadrature.hpp"
#include "qbt/spectral.hpp"

namespace qbt {

struct ProbeSpec {
    double omega0 = 1.0;
};

void validate(const ProbeSpec& probe);

struct CovarianceMatrix {
    double sigma_xx = 0.5;
    double sigma_pp = 0.5;
    double sigma_xp = 0.0;

    double det() const { return sigma_xx * sigma_pp - sigma_xp * sigma_xp; }
};

CovarianceMatrix operator+(const CovarianceMatrix& a, const CovarianceMatrix& b);
CovarianceMatrix operator-(const CovarianceMatrix& a, const CovarianceMatrix& b);

// Heisenberg check, det σ ≥ 1/4 − 1e-9 and positive diagonals. Throws PhysicalityError.
void check_physical(const CovarianceMatrix& s);

struct CovarianceEstimate {
    CovarianceMatrix cov;
    double error_xx = 0.0;  // absolute quadrature error estimates
    double error_pp = 0.0;
};

// A probe state parametrized by temperature. increment() must return σ(T2) − σ(T1)
// without forming the two covariances separately.
class TemperatureFamily {
public:
    virtual ~TemperatureFamily() = default;
    virtual CovarianceMatrix covariance(double T) const = 0;
    virtual CovarianceMatrix increment(double T1, double T2) const = 0;
    virtual double frequency_scale() const = 0;
};

// n(ω, T2) − n(ω, T1) for the Bose occupation, free of cancellation.
double bose_difference(double omega, double T1, double T2);
double bose_occupation(double omega, double T);

// α(ω) = ω₀² + ω_R² − ω² − χ̃(ω)
Complex alpha(const SpectralModel& model, const ProbeSpec& probe, double omega);

// Quadrature route. The T-independent vacuum part is integrated once on construction;
// covariance(T) adds the thermal excess (2/π)∫ J n(ω,T)/|α|².
class SteadyStateSolver final : public TemperatureFamily {
public:
    SteadyStateSolver(const SpectralModel& model, const ProbeSpec& probe,
                      const quad::Options& opts = default_options());

    static quad::Options default_options();

    CovarianceEstimate estimate(double T) const;
    CovarianceEstimate ground_state() const { return ground_; }
    CovarianceEstimate increment_estimate(double T1, double T2) const;

    CovarianceMatrix covariance(double T) const override { return estimate(T).cov; }
    CovarianceMatrix increment(double T1, double T2) const override {
        return increment_estimate(T1, T2).cov;
    }
    double frequency_scale() const override { return probe_.omega0; }

    const SpectralModel& model() const { return model_; }
    const ProbeSpec& probe() const { return probe_; }
    double resonance() const { return resonance_; }
    double resonance_width() const { return width_; }

private:
    std::vector<double> breakpoints(double T1, double T2) const;
    double weight(double omega) const;  // J(ω)/(π|α(ω)|²)

    SpectralModel model_;
    ProbeSpec probe_;
    quad::Options opts_;
    double resonance_ = 0.0;
    double width_ = 0.0;
    CovarianceEstimate ground_;
};

CovarianceEstimate covariance_numeric(const SpectralModel& model, const ProbeSpec& probe, double T);

// T → 0 limit (coth → 1), the only way to reach zero temperature.
CovarianceEstimate covariance_numeric_ground(const SpectralModel& model, const ProbeSpec& probe);

struct AnalyticLDSolution {
    std::array<Complex, 3> roots;     // d_m
    std::array<Complex, 3> coeffs_x;  // c_m
    std::array<Complex, 3> coeffs_p;  // c′_m
    double matsubara_nu1 = 0.0;
    double imag_residue = 0.0;        // largest |Im| discarded from the digamma sums
};

struct AnalyticLDResult {
    CovarianceMatrix cov;
    AnalyticLDSolution solution;
};

// Throws UnsupportedParameterError for repeated cubic roots.
AnalyticLDResult covariance_analytic_ld(double gamma, double omega_c, const ProbeSpec& probe,
                                        double T);

// First-order expansion for γ ≪ ω_c, T ≪ ω₀ ≪ ω_c. Not range-checked.
CovarianceMatrix covariance_lowT_approx(double gamma, double omega_c, const ProbeSpec& probe,
                                        double T);

CovarianceMatrix thermal_covariance(const ProbeSpec& probe, double T);

class ThermalFamily final : public TemperatureFamily {
public:
    explicit ThermalFamily(const ProbeSpec& probe);
    CovarianceMatrix covariance(double T) const override;
    CovarianceMatrix increment(double T1, double T2) const override;
    double frequency_scale() const override { return probe_.omega0; }

private:
    ProbeSpec probe_;
};

}  // namespace qbt
