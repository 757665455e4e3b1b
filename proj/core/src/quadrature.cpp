// quadrature.cpp: global adaptive Gauss-Kronrod (G15/K31) driver
//
// Node and weight tables come from Boost.Math; the subdivision logic lives here so the
// error estimate is always expressed on the physical interval.

#include "qbt/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qbt/errors.hpp"

namespace qbt::quad {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;
using Gauss = boost::math::quadrature::gauss<double, 15>;

constexpr std::size_t kMaxSegments = 20000;

struct Segment {
    double a = 0.0;
    double b = 0.0;
    bool mapped = false;  // integrate over t with x = origin / t
    double origin = 0.0;
    double value = 0.0;
    double error = 0.0;
    unsigned depth = 0;

    bool operator<(const Segment& other) const { return error < other.error; }
};

double eval_point(const Integrand& f, const Segment& s, double x) {
    if (!s.mapped) return f(x);
    // x = origin / t, dx = origin / t² dt
    const double u = s.origin / x;
    if (!std::isfinite(u)) return 0.0;
    return f(u) * s.origin / (x * x);
}

void evaluate(const Integrand& f, Segment& s) {
    const double mean = 0.5 * (s.a + s.b);
    const double half = 0.5 * (s.b - s.a);
    const auto& xs = Kronrod::abscissa();
    const auto& wk = Kronrod::weights();
    const auto& wg = Gauss::weights();

    double f0 = eval_point(f, s, mean);
    double kronrod = f0 * wk[0];
    double gauss = f0 * wg[0];
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double fp = eval_point(f, s, mean + half * xs[i]);
        const double fm = eval_point(f, s, mean - half * xs[i]);
        kronrod += (fp + fm) * wk[i];
        if (i % 2 == 0) gauss += (fp + fm) * wg[i / 2];
    }
    s.value = kronrod * half;
    s.error = std::abs((kronrod - gauss) * half);
    if (!std::isfinite(s.value) || !std::isfinite(s.error)) {
        throw QuadratureError("quadrature: integrand produced a non-finite value", s.value,
                              std::numeric_limits<double>::infinity());
    }
}

Estimate run(const Integrand& f, std::vector<Segment> initial, const Options& opts) {
    std::priority_queue<Segment> heap;
    double value = 0.0;
    double error = 0.0;
    for (auto& s : initial) {
        if (s.b == s.a) continue;
        evaluate(f, s);
        value += s.value;
        error += s.error;
        heap.push(s);
    }
    auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(value)); };

    // Floating-point noise floor: once the worst segment is narrower than this, stop.
    constexpr double kMinRelWidth = 64.0 * std::numeric_limits<double>::epsilon();
    while (!heap.empty() && error > target() && heap.size() < kMaxSegments) {
        Segment worst = heap.top();
        const double width = worst.b - worst.a;
        if (worst.depth >= opts.max_depth ||
            width <= kMinRelWidth * std::max(std::abs(worst.a), std::abs(worst.b))) {
            break;
        }
        heap.pop();
        Segment left = worst;
        Segment right = worst;
        const double mid = 0.5 * (worst.a + worst.b);
        left.b = mid;
        right.a = mid;
        left.depth = right.depth = worst.depth + 1;
        evaluate(f, left);
        evaluate(f, right);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum from the leaves to drop accumulated update round-off.
    value = 0.0;
    error = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    if (error > target()) {
        throw QuadratureError("quadrature: error target not reached", value, error);
    }
    return {value, error};
}

}  // namespace

Estimate integrate(const Integrand& f, double a, double b, const Options& opts) {
    if (!std::isfinite(a) || !std::isfinite(b)) {
        throw DomainError("quadrature: integrate() needs finite limits; use integrate_tail");
    }
    if (a == b) return {};
    if (b < a) {
        auto r = integrate(f, b, a, opts);
        return {-r.value, r.error};
    }
    return run(f, {Segment{a, b}}, opts);
}

Estimate integrate_tail(const Integrand& f, double a, const Options& opts) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw DomainError("quadrature: tail integral needs a finite positive lower limit");
    }
    Segment s{0.0, 1.0, true, a};
    return run(f, {s}, opts);
}

Estimate integrate_panels(const Integrand& f, std::span<const double> breakpoints,
                          bool tail_to_infinity, const Options& opts) {
    if (breakpoints.size() < 1 || (breakpoints.size() < 2 && !tail_to_infinity)) {
        throw DomainError("quadrature: need at least one panel");
    }
    std::vector<Segment> segments;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i] <= breakpoints[i + 1])) {
            throw DomainError("quadrature: breakpoints must be non-decreasing");
        }
        segments.push_back(Segment{breakpoints[i], breakpoints[i + 1]});
    }
    if (tail_to_infinity) {
        const double origin = breakpoints.back();
        if (!(origin > 0.0)) throw DomainError("quadrature: tail needs a positive origin");
        // Split t ∈ (0, 1] once so the mapped endpoint region refines independently.
        segments.push_back(Segment{0.0, 0.5, true, origin});
        segments.push_back(Segment{0.5, 1.0, true, origin});
    }
    return run(f, std::move(segments), opts);
}

}  // namespace qbt::quad
