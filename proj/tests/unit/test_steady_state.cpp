#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "qbt/errors.hpp"
#include "qbt/steady_state.hpp"

using qbt::CovarianceMatrix;
using qbt::ProbeSpec;
using qbt::SpectralModel;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double coth(double x) { return 1.0 / std::tanh(x); }

}  // namespace

TEST(Alpha, Examples) {
    const ProbeSpec probe{1.0};
    const auto weak = SpectralModel::lorentz_drude(1e-12, 100.0);
    EXPECT_NEAR(qbt::alpha(weak, probe, 0.0).real(), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(qbt::alpha(weak, probe, 1.0)), 0.0, 1e-9);

    const auto ld = SpectralModel::lorentz_drude(1.0, 100.0);
    const std::complex<double> chi = 2.0 * 100.0 * 100.0 / std::complex<double>(100.0, -1.0);
    const auto expect = 1.0 + 200.0 - 1.0 - chi;
    const auto got = qbt::alpha(ld, probe, 1.0);
    EXPECT_NEAR(got.real(), expect.real(), 1e-12);
    EXPECT_NEAR(got.imag(), expect.imag(), 1e-12);
    const auto minus = qbt::alpha(ld, probe, -1.0);
    EXPECT_NEAR(minus.real(), got.real(), 1e-12);
    EXPECT_NEAR(minus.imag(), -got.imag(), 1e-12);
}

TEST(ThermalCovariance, Examples) {
    const auto vac = qbt::thermal_covariance({1.0}, 1e-6);
    EXPECT_NEAR(vac.sigma_xx, 0.5, 1e-12);
    EXPECT_NEAR(vac.sigma_pp, 0.5, 1e-12);
    const auto t1 = qbt::thermal_covariance({1.0}, 1.0);
    EXPECT_NEAR(t1.sigma_xx, 1.0819767068693265, 1e-13);
    EXPECT_NEAR(t1.sigma_pp, 1.0819767068693265, 1e-13);
    EXPECT_EQ(t1.sigma_xp, 0.0);
    const auto t2 = qbt::thermal_covariance({2.0}, 0.7);
    EXPECT_NEAR(t2.det(), 0.25 * coth(1.0 / 0.7) * coth(1.0 / 0.7), 1e-13);
    EXPECT_THROW(qbt::thermal_covariance({1.0}, 0.0), qbt::DomainError);
}

TEST(CovarianceNumeric, ThermalLimitAtVanishingCoupling) {
    const auto est = qbt::covariance_numeric(SpectralModel::lorentz_drude(1e-8, 100.0), {1.0}, 1.0);
    EXPECT_LT(rel(est.cov.sigma_xx, 0.5 * coth(0.5)), 1e-4);
    EXPECT_LT(rel(est.cov.sigma_pp, 0.5 * coth(0.5)), 1e-4);
    EXPECT_EQ(est.cov.sigma_xp, 0.0);
}

TEST(CovarianceNumeric, PositionSqueezingAtStrongCoupling) {
    const auto est = qbt::covariance_numeric(SpectralModel::lorentz_drude(5.0, 100.0), {1.0}, 0.01);
    EXPECT_LT(est.cov.sigma_xx, qbt::thermal_covariance({1.0}, 0.01).sigma_xx);
    EXPECT_GE(est.cov.det(), 0.25);
}

TEST(CovarianceNumeric, ReferenceValues) {
    // adaptive quadrature reference (scipy, 1e-12), ω₀ = 1, ω_c = 100
    struct Ref {
        double gamma, T, xx, pp;
    };
    const Ref refs[] = {
        {0.1, 0.01, 0.4709136031857241, 0.7565176031212786},
        {0.1, 1.0, 1.0803042102898595, 1.2909999434250545},
        {1.0, 0.1, 0.3398581562319319, 2.6952113727810465},
        {5.0, 0.01, 0.15251387359178767, 8.512661528087579},
        {5.0, 1.0, 1.0438350781434518, 8.607193933034244},
    };
    for (const auto& r : refs) {
        const auto est = qbt::covariance_numeric(SpectralModel::lorentz_drude(r.gamma, 100.0), {1.0}, r.T);
        EXPECT_LT(rel(est.cov.sigma_xx, r.xx), 1e-9) << r.gamma << " " << r.T;
        EXPECT_LT(rel(est.cov.sigma_pp, r.pp), 1e-9) << r.gamma << " " << r.T;
        EXPECT_LT(est.error_xx, 1e-8 * r.xx);
        EXPECT_LT(est.error_pp, 1e-8 * r.pp);
    }
}

TEST(CovarianceNumeric, IncrementMatchesDifferenceOfCovariances) {
    const qbt::SteadyStateSolver solver(SpectralModel::lorentz_drude(1.0, 100.0), {1.0});
    const auto d = solver.increment(0.2, 0.5);
    const auto direct = solver.covariance(0.5) - solver.covariance(0.2);
    EXPECT_LT(rel(d.sigma_xx, direct.sigma_xx), 1e-9);
    EXPECT_LT(rel(d.sigma_pp, direct.sigma_pp), 1e-9);
    const auto back = solver.increment(0.5, 0.2);
    EXPECT_NEAR(back.sigma_xx, -d.sigma_xx, 1e-12 * std::abs(d.sigma_xx));
}

TEST(CovarianceNumeric, GroundStateIsTheZeroTemperatureLimit) {
    const auto model = SpectralModel::lorentz_drude(1.0, 100.0);
    const auto g = qbt::covariance_numeric_ground(model, {1.0});
    const auto cold = qbt::covariance_numeric(model, {1.0}, 1e-3);
    EXPECT_LT(g.cov.sigma_xx, cold.cov.sigma_xx);
    EXPECT_LT(rel(g.cov.sigma_xx, cold.cov.sigma_xx), 1e-4);
    EXPECT_GE(g.cov.det(), 0.25);
}

TEST(CovarianceNumeric, ExpCutoffModelsArePhysical) {
    for (double s : {1.0, 2.0}) {
        for (double T : {1e-3, 0.1, 1.0}) {
            const auto est = qbt::covariance_numeric(SpectralModel::exp_cutoff(0.1, 100.0, s), {1.0}, T);
            EXPECT_NO_THROW(qbt::check_physical(est.cov));
        }
    }
}

TEST(CovarianceNumeric, CutoffInsensitivity) {
    const double ref = qbt::covariance_numeric(SpectralModel::lorentz_drude(1.0, 100.0), {1.0}, 0.1).cov.sigma_xx;
    for (double wc : {50.0, 200.0}) {
        const double v = qbt::covariance_numeric(SpectralModel::lorentz_drude(1.0, wc), {1.0}, 0.1).cov.sigma_xx;
        EXPECT_LT(rel(v, ref), 0.05) << wc;
    }
}

TEST(CovarianceNumeric, RejectsNonPositiveTemperature) {
    EXPECT_THROW(qbt::covariance_numeric(SpectralModel::lorentz_drude(1.0, 100.0), {1.0}, 0.0), qbt::DomainError);
    EXPECT_THROW(qbt::covariance_numeric(SpectralModel::lorentz_drude(1.0, 100.0), {1.0}, -1.0), qbt::DomainError);
}

TEST(CovarianceAnalytic, RouteEquivalenceGrid) {
    for (double gamma : {0.1, 1.0, 5.0}) {
        const qbt::SteadyStateSolver solver(SpectralModel::lorentz_drude(gamma, 100.0), {1.0});
        for (double T : {0.01, 0.1, 1.0}) {
            const auto n = solver.covariance(T);
            const auto a = qbt::covariance_analytic_ld(gamma, 100.0, {1.0}, T);
            EXPECT_LT(rel(a.cov.sigma_xx, n.sigma_xx), 1e-6) << gamma << " " << T;
            EXPECT_LT(rel(a.cov.sigma_pp, n.sigma_pp), 1e-6) << gamma << " " << T;
            EXPECT_LT(a.solution.imag_residue, 1e-9);
        }
    }
}

TEST(CovarianceAnalytic, WeakCouplingRoot) {
    const double gamma = 1e-4;
    const double wc = 100.0;
    const double T = 0.1;
    const auto r = qbt::covariance_analytic_ld(gamma, wc, {1.0}, T);
    const double nu1 = 2.0 * std::numbers::pi * T;
    EXPECT_NEAR(r.solution.matsubara_nu1, nu1, 1e-15);
    const double d3 = -(1.0 + wc / nu1) + 2.0 * gamma * wc * wc / (nu1 * (1.0 + wc * wc));
    double best = 1e300;
    for (const auto& d : r.solution.roots) best = std::min(best, std::abs(d - d3));
    EXPECT_LT(best, 1e-6 * std::abs(d3));
}

TEST(CovarianceAnalytic, WeightsSumToZeroAndRootsPair) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> lg(-2.0, 1.0), lwc(1.0, 3.0), lt(-3.0, 0.5), lw0(-0.5, 0.5);
    for (int i = 0; i < 50; ++i) {
        const double gamma = std::pow(10.0, lg(rng));
        const double wc = std::pow(10.0, lwc(rng));
        const double T = std::pow(10.0, lt(rng));
        const double w0 = std::pow(10.0, lw0(rng));
        const auto r = qbt::covariance_analytic_ld(gamma, wc, {w0}, T);
        std::complex<double> sum = 0.0;
        double mag = 0.0;
        for (const auto& c : r.solution.coeffs_x) {
            sum += c;
            mag += std::abs(c);
        }
        EXPECT_LT(std::abs(sum), 1e-10 * std::max(1.0, mag));
        int real_roots = 0;
        for (const auto& d : r.solution.roots) {
            if (d.imag() == 0.0) {
                ++real_roots;
                continue;
            }
            double best = 1e300;
            for (const auto& e : r.solution.roots) best = std::min(best, std::abs(e - std::conj(d)));
            EXPECT_LT(best, 1e-9 * std::abs(d));
        }
        EXPECT_TRUE(real_roots == 1 || real_roots == 3);
        EXPECT_GE(r.cov.det(), 0.25 - 1e-9);
    }
}

TEST(CovarianceAnalytic, RepeatedRootsAreUnsupported) {
    // y³ + a y² + b y + c = (y + 1)³ needs a = 3, b = 3, c = 1:
    // ω_c = 3, ω₀² = 1/3, ω₀² + 2γω_c = 3 → γ = 4/9.
    EXPECT_THROW(qbt::covariance_analytic_ld(4.0 / 9.0, 3.0, {1.0 / std::sqrt(3.0)}, 0.1),
                 qbt::UnsupportedParameterError);
    EXPECT_THROW(qbt::covariance_analytic_ld(1.0, 100.0, {1.0}, 0.0), qbt::DomainError);
}

TEST(CovarianceLowT, AgreesWithAnalyticRouteInItsRegime) {
    const auto approx = qbt::covariance_lowT_approx(0.01, 1000.0, {1.0}, 0.001);
    const auto exact = qbt::covariance_analytic_ld(0.01, 1000.0, {1.0}, 0.001).cov;
    EXPECT_LT(rel(approx.sigma_xx, exact.sigma_xx), 0.02);
    EXPECT_LT(rel(approx.sigma_pp, exact.sigma_pp), 0.02);
}

TEST(CovarianceLowT, Limits) {
    const auto vac = qbt::covariance_lowT_approx(1e-15, 1000.0, {1.0}, 1e-15);
    EXPECT_NEAR(vac.sigma_xx, 0.5, 1e-12);
    EXPECT_NEAR(vac.sigma_pp, 0.5, 1e-12);
    const double gamma = 0.01;
    const auto c = qbt::covariance_lowT_approx(gamma, 1e8, {1.0}, 0.0);
    EXPECT_NEAR(0.5 - c.sigma_xx, 0.5 * 2.0 * gamma / std::numbers::pi, 1e-12);
}

TEST(Physicality, CheckRejectsUncertaintyViolation) {
    EXPECT_THROW(qbt::check_physical({0.4, 0.5, 0.0}), qbt::PhysicalityError);
    EXPECT_THROW(qbt::check_physical({-0.5, -0.5, 0.0}), qbt::PhysicalityError);
    EXPECT_NO_THROW(qbt::check_physical({0.5, 0.5, 0.0}));
}

TEST(Physicality, AcrossCouplingsAndTemperatures) {
    for (double gamma : {1e-6, 0.01, 0.5, 5.0, 20.0}) {
        const qbt::SteadyStateSolver solver(SpectralModel::lorentz_drude(gamma, 100.0), {1.0});
        for (double T : {1e-3, 0.03, 1.0, 10.0}) EXPECT_GE(solver.covariance(T).det(), 0.25 - 1e-9);
    }
}

TEST(WeakCoupling, BothRoutesThermalize) {
    for (double T : {0.1, 0.5, 1.0}) {
        const auto th = qbt::thermal_covariance({1.0}, T);
        const auto n = qbt::covariance_numeric(SpectralModel::lorentz_drude(1e-6, 100.0), {1.0}, T).cov;
        const auto a = qbt::covariance_analytic_ld(1e-6, 100.0, {1.0}, T).cov;
        EXPECT_LT(rel(n.sigma_xx, th.sigma_xx), 1e-3);
        EXPECT_LT(rel(n.sigma_pp, th.sigma_pp), 1e-3);
        EXPECT_LT(rel(a.sigma_xx, th.sigma_xx), 1e-3);
        EXPECT_LT(rel(a.sigma_pp, th.sigma_pp), 1e-3);
    }
}

TEST(Bose, DifferenceIsStable) {
    EXPECT_NEAR(qbt::bose_difference(1.0, 0.5, 0.6),
                qbt::bose_occupation(1.0, 0.6) - qbt::bose_occupation(1.0, 0.5), 1e-15);
    EXPECT_EQ(qbt::bose_difference(1e4, 0.01, 0.02), 0.0);
    EXPECT_TRUE(std::isfinite(qbt::bose_difference(1e4, 0.02, 0.01)));
    const double T2 = 0.1 * (1.0 + 1e-9);
    const double tiny = qbt::bose_difference(1.0, 0.1, T2);
    const double slope = std::exp(10.0) / std::pow(std::expm1(10.0), 2) * 100.0;  // ∂n/∂T at T=0.1
    EXPECT_NEAR(tiny / (T2 - 0.1), slope, 1e-6 * slope);
}
