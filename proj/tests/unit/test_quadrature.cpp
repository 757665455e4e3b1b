#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "qbt/errors.hpp"
#include "qbt/quadrature.hpp"

namespace quad = qbt::quad;

TEST(Quadrature, Polynomials) {
    for (int k = 0; k < 12; ++k) {
        const auto est = quad::integrate([k](double x) { return std::pow(x, k); }, 0.0, 2.0);
        EXPECT_NEAR(est.value, std::pow(2.0, k + 1) / (k + 1), 1e-12 * std::pow(2.0, k + 1)) << k;
    }
}

TEST(Quadrature, ReversedLimits) {
    const auto est = quad::integrate([](double x) { return std::cos(x); }, 1.0, 0.0);
    EXPECT_NEAR(est.value, -std::sin(1.0), 1e-14);
}

TEST(Quadrature, NarrowLorentzianNeedsNoHints) {
    const double w = 1e-4;
    auto f = [w](double x) { return w / (std::numbers::pi * ((x - 0.3) * (x - 0.3) + w * w)); };
    const auto est = quad::integrate(f, 0.0, 1.0);
    const double exact = (std::atan(0.7 / w) + std::atan(0.3 / w)) / std::numbers::pi;
    EXPECT_NEAR(est.value, exact, 1e-9);
    EXPECT_LE(est.error, 1e-10 * exact);
}

TEST(Quadrature, TailMap) {
    const auto est = quad::integrate_tail([](double x) { return 1.0 / (x * x); }, 2.0);
    EXPECT_NEAR(est.value, 0.5, 1e-13);
    const auto ex = quad::integrate_tail([](double x) { return std::exp(-x); }, 1.0);
    EXPECT_NEAR(ex.value, std::exp(-1.0), 1e-13);
}

TEST(Quadrature, PanelsWithTail) {
    const std::vector<double> pts{0.0, 0.5, 1.0, 3.0};
    const auto est = quad::integrate_panels([](double x) { return 1.0 / (1.0 + x * x); }, pts, true);
    EXPECT_NEAR(est.value, std::numbers::pi / 2.0, 1e-12);
}

TEST(Quadrature, ReportsFailureWithPartialEstimate) {
    quad::Options opts;
    opts.max_depth = 8;
    try {
        quad::integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, opts);
        FAIL() << "divergent integral accepted";
    } catch (const qbt::QuadratureError& e) {
        EXPECT_GT(e.estimate(), 0.0);
        EXPECT_GT(e.error_estimate(), 0.0);
    }
}

TEST(Quadrature, RejectsBadInput) {
    EXPECT_THROW(quad::integrate_tail([](double) { return 1.0; }, 0.0), qbt::DomainError);
    const std::vector<double> bad{0.0, 2.0, 1.0};
    EXPECT_THROW(quad::integrate_panels([](double) { return 1.0; }, bad, false), qbt::DomainError);
    EXPECT_THROW(quad::integrate([](double) { return std::nan(""); }, 0.0, 1.0), qbt::QuadratureError);
}
