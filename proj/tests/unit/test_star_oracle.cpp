#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "qbt/errors.hpp"
#include "qbt/metrology.hpp"
#include "qbt/star_oracle.hpp"
#include "qbt/sweep.hpp"

using qbt::SpectralModel;
using qbt::StarSystem;

namespace {

StarSystem random_star(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> w(0.2, 5.0), g(0.05, 0.8), G(0.2, 2.0), w0(0.5, 2.0);
    StarSystem s;
    s.omega0 = w0(rng);
    s.scale = G(rng);
    for (int i = 0; i < n; ++i) {
        s.bath_freqs.push_back(w(rng));
        s.couplings.push_back(g(rng));
    }
    return s;
}

Eigen::VectorXd eigenvalues_at_fixed_v00(StarSystem s, double G, double v00) {
    s.scale = G;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(qbt::interaction_matrix(s, v00), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

}  // namespace

TEST(Star, TwoModeExample) {
    const StarSystem s{1.0, {1.0}, {0.5}, 1.0};
    const auto v = qbt::interaction_matrix(s);
    EXPECT_NEAR(v(0, 0), 1.25, 1e-15);
    EXPECT_NEAR(v(0, 1), 0.5, 1e-15);
    EXPECT_NEAR(v(1, 0), 0.5, 1e-15);
    EXPECT_NEAR(v(1, 1), 1.0, 1e-15);
    const auto m = qbt::normal_modes(s);
    const double r = std::sqrt(0.125 * 0.125 + 0.25);
    EXPECT_NEAR(m.eigenvalues(0), 1.125 - r, 1e-14);
    EXPECT_NEAR(m.eigenvalues(1), 1.125 + r, 1e-14);
}

TEST(Star, DecoupledSystem) {
    const StarSystem s{1.3, {2.0, 0.7, 1.1}, {0.3, 0.2, 0.4}, 0.0};
    const auto v = qbt::interaction_matrix(s);
    EXPECT_TRUE(v.isApprox(Eigen::Vector4d(1.69, 4.0, 0.49, 1.21).asDiagonal().toDenseMatrix()));
    const auto m = qbt::normal_modes(s);
    EXPECT_NEAR(m.eigenvalues(0), 0.49, 1e-15);
    EXPECT_NEAR(m.eigenvalues(3), 4.0, 1e-15);
    for (double d : qbt::eigenvalue_coupling_derivatives(s)) EXPECT_EQ(d, 0.0);
    const auto cov = qbt::reduced_probe_covariance(s, 0.4);
    const auto th = qbt::thermal_covariance({1.3}, 0.4);
    EXPECT_NEAR(cov.sigma_xx, th.sigma_xx, 1e-14);
    EXPECT_NEAR(cov.sigma_pp, th.sigma_pp, 1e-14);
    const StarSystem lone{1.3, {}, {}, 0.0};
    EXPECT_NEAR(qbt::star_qfi(lone, 0.4), qbt::qfi_equilibrium(1.3, 0.4), 1e-14);
}

TEST(Star, Validation) {
    EXPECT_THROW(qbt::validate(StarSystem{1.0, {1.0}, {}, 1.0}), qbt::DomainError);
    EXPECT_THROW(qbt::validate(StarSystem{1.0, {-1.0}, {0.1}, 1.0}), qbt::DomainError);
    EXPECT_THROW(qbt::validate(StarSystem{0.0, {1.0}, {0.1}, 1.0}), qbt::DomainError);
    EXPECT_THROW(qbt::validate(StarSystem{1.0, {1.0}, {0.1}, -1.0}), qbt::DomainError);
}

TEST(Star, EigensystemInvariants) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = random_star(rng, 15);
        const auto v = qbt::interaction_matrix(s);
        const auto m = qbt::normal_modes(s);
        EXPECT_NEAR(m.eigenvalues.sum(), v.trace(), 1e-9 * v.trace());
        const auto& O = m.mode_matrix;
        EXPECT_LT((O.transpose() * O - Eigen::MatrixXd::Identity(O.rows(), O.cols())).norm(), 1e-10);
        EXPECT_LT((O * m.eigenvalues.asDiagonal() * O.transpose() - v).norm(), 1e-9 * v.norm());
        EXPECT_LT(qbt::secular_residual(s, m), 1e-8);
        EXPECT_GT(m.eigenvalues(0), 0.0);
    }
}

TEST(Star, DerivativeMatchesFiniteDifferenceAtFixedV00) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const auto s = random_star(rng, 19);
        const double v00 = qbt::shifted_frequency_sq(s);
        const double h = 1e-5;
        const auto up = eigenvalues_at_fixed_v00(s, s.scale + h, v00);
        const auto down = eigenvalues_at_fixed_v00(s, s.scale - h, v00);
        const auto analytic = qbt::eigenvalue_coupling_derivatives(s);
        ASSERT_EQ(analytic.size(), 20u);
        for (int i = 0; i < 20; ++i) {
            const double fd = (up(i) - down(i)) / (2.0 * h);
            EXPECT_LT(std::abs(fd - analytic[i]), 1e-4 * std::max(std::abs(analytic[i]), 1e-3)) << trial << " " << i;
        }
    }
}

TEST(Star, DerivativeSignLaw) {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        const auto s = random_star(rng, 12);
        const auto m = qbt::normal_modes(s);
        const auto d = qbt::eigenvalue_coupling_derivatives(s, m);
        EXPECT_EQ(qbt::derivative_sign_violations(s, m, d), 0) << trial;
    }
}

TEST(Star, DegenerateBathFrequenciesAreSplit) {
    const StarSystem s{1.0, {2.0, 2.0, 3.0}, {0.3, 0.4, 0.2}, 1.0};
    const auto split = qbt::with_split_degeneracies(s);
    EXPECT_NE(split.bath_freqs[0], split.bath_freqs[1]);
    EXPECT_NEAR(split.bath_freqs[1], 2.0, 1e-8);
    const auto m = qbt::normal_modes(s);
    EXPECT_EQ(m.eigenvalues.size(), 4);
    EXPECT_NEAR(m.eigenvalues.sum(), qbt::interaction_matrix(split).trace(), 1e-12);
    // one eigenvalue is trapped between the split pair, so ∂_Gλ is singular there
    EXPECT_THROW(qbt::eigenvalue_coupling_derivatives(s), qbt::PoleError);
}

TEST(Discretization, SingleMode) {
    const auto model = SpectralModel::lorentz_drude(0.1, 100.0);
    const auto s = qbt::discretize_bath(model, 1, 50.0);
    ASSERT_EQ(s.bath_freqs.size(), 1u);
    EXPECT_DOUBLE_EQ(s.bath_freqs[0], 25.0);
    EXPECT_NEAR(s.couplings[0] * s.couplings[0], 2.0 / std::numbers::pi * 25.0 * qbt::spectral_density(model, 25.0) * 50.0,
                1e-12);
    EXPECT_THROW(qbt::discretize_bath(model, 0, 50.0), qbt::DomainError);
}

TEST(Discretization, RenormalizationShiftConvergesToTruncatedIntegral) {
    // A truncated grid sums (2/π)∫₀^{ω_max} J/ω; the missing tail is (4γω_c/π)(π/2 − atan(ω_max/ω_c)).
    const double gamma = 0.1, wc = 100.0, wmax = 1000.0;
    const auto model = SpectralModel::lorentz_drude(gamma, wc);
    const double truncated = 4.0 * gamma * wc / std::numbers::pi * std::atan(wmax / wc);
    const double tail = 4.0 * gamma * wc / std::numbers::pi * (std::numbers::pi / 2.0 - std::atan(wmax / wc));
    EXPECT_NEAR(truncated + tail, qbt::renormalization_freq_sq(model), 1e-12);
    double prev_err = 0.0;
    for (int n : {500, 1000, 2000}) {
        const auto s = qbt::discretize_bath(model, n, wmax);
        const double shift = qbt::shifted_frequency_sq(s) - 1.0;
        const double err = std::abs(shift - truncated);
        EXPECT_LT(err / truncated, 1e-3) << n;
        if (prev_err > 0.0) EXPECT_NEAR(prev_err / err, 4.0, 0.1) << n;
        prev_err = err;
    }
}

TEST(StarQfi, GrowsWithCouplingAtLowTemperature) {
    auto s = qbt::discretize_bath(SpectralModel::lorentz_drude(0.1, 10.0), 64, 200.0);
    double prev = 0.0;
    for (int i = 0; i <= 16; ++i) {
        s.scale = 1.0 + 0.25 * i;
        const double q = qbt::star_qfi(s, 0.01);
        EXPECT_GT(q, prev) << s.scale;
        prev = q;
    }
}

TEST(StarQfi, MarginalNeverExceedsGlobal) {
    auto s = qbt::discretize_bath(SpectralModel::lorentz_drude(1.0, 10.0), 100, 200.0);
    for (double G : {0.5, 1.0}) {
        s.scale = G;
        const qbt::StarFamily family(s);
        for (double T : {0.05, 0.2, 1.0}) {
            EXPECT_LE(qbt::qfi_from_fidelity(family, T), family.star_qfi(T)) << G << " " << T;
        }
    }
}

TEST(StarContinuum, ConvergesWithModeCount) {
    const auto model = SpectralModel::lorentz_drude(1.0, 100.0);
    const auto ref = qbt::covariance_numeric(model, {1.0}, 0.1).cov;
    double prev = 1e300;
    for (int n : {512, 1024, 2048}) {
        const auto cov = qbt::reduced_probe_covariance(qbt::discretize_bath(model, n, 2000.0), 0.1);
        const double err = std::max(std::abs(cov.sigma_xx / ref.sigma_xx - 1.0), std::abs(cov.sigma_pp / ref.sigma_pp - 1.0));
        EXPECT_LT(err, prev) << n;
        prev = err;
    }
    EXPECT_LT(prev, 0.01);
}
