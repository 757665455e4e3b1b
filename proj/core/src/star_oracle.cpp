#include "qbt/star_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "qbt/errors.hpp"
#include "qbt/metrology.hpp"

namespace qbt {

namespace {

void check_temperature(double T, const char* who) {
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw DomainError(std::string(who) + ": temperature must be positive and finite");
    }
}

}  // namespace

void validate(const StarSystem& star) {
    if (!(star.omega0 > 0.0)) throw DomainError("star: omega0 must be positive");
    if (star.bath_freqs.size() != star.couplings.size()) {
        throw DomainError("star: bath frequency and coupling lists differ in length");
    }
    for (double w : star.bath_freqs) {
        if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("star: bath frequencies must be positive");
    }
    if (!(star.scale >= 0.0)) throw DomainError("star: coupling scale G must be non-negative");
}

StarSystem discretize_bath(const SpectralModel& model, int n_modes, double omega_max,
                           double omega0) {
    validate(model);
    if (n_modes < 1) throw DomainError("discretize_bath: need at least one mode");
    if (!(omega_max > 0.0)) throw DomainError("discretize_bath: omega_max must be positive");
    StarSystem star;
    star.omega0 = omega0;
    star.scale = 1.0;
    const double dw = omega_max / n_modes;
    star.bath_freqs.reserve(n_modes);
    star.couplings.reserve(n_modes);
    for (int mu = 1; mu <= n_modes; ++mu) {
        const double w = (mu - 0.5) * dw;
        star.bath_freqs.push_back(w);
        star.couplings.push_back(std::sqrt(2.0 / std::numbers::pi * w * spectral_density(model, w) * dw));
    }
    return star;
}

double shifted_frequency_sq(const StarSystem& star) {
    double shift = 0.0;
    for (std::size_t k = 0; k < star.bath_freqs.size(); ++k) {
        const double r = star.couplings[k] / star.bath_freqs[k];
        shift += r * r;
    }
    return star.omega0 * star.omega0 + star.scale * star.scale * shift;
}

Eigen::MatrixXd interaction_matrix(const StarSystem& star, double v00) {
    validate(star);
    const auto n = static_cast<Eigen::Index>(star.bath_freqs.size()) + 1;
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, n);
    v(0, 0) = v00;
    for (Eigen::Index k = 1; k < n; ++k) {
        const double w = star.bath_freqs[k - 1];
        v(k, k) = w * w;
        v(0, k) = v(k, 0) = star.scale * star.couplings[k - 1];
    }
    return v;
}

Eigen::MatrixXd interaction_matrix(const StarSystem& star) {
    return interaction_matrix(star, shifted_frequency_sq(star));
}

StarSystem with_split_degeneracies(const StarSystem& star) {
    StarSystem out = star;
    std::vector<std::size_t> order(out.bath_freqs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return out.bath_freqs[a] < out.bath_freqs[b]; });
    for (std::size_t i = 1; i < order.size(); ++i) {
        const double prev = out.bath_freqs[order[i - 1]];
        double& cur = out.bath_freqs[order[i]];
        if (cur - prev <= 1e-12 * cur) cur = prev * (1.0 + 1e-9);
    }
    return out;
}

NormalModes normal_modes(const StarSystem& star) {
    const StarSystem split = with_split_degeneracies(star);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(interaction_matrix(split));
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("normal_modes: eigendecomposition failed", 0.0, 0.0);
    }
    NormalModes modes{solver.eigenvalues(), solver.eigenvectors()};
    if (modes.eigenvalues.size() > 0 && !(modes.eigenvalues(0) > 0.0)) {
        throw PhysicalityError("normal_modes: interaction matrix is not positive definite");
    }
    return modes;
}

std::vector<double> eigenvalue_coupling_derivatives(const StarSystem& star,
                                                    const NormalModes& modes) {
    const double G = star.scale;
    const double lam_max = modes.eigenvalues.size() ? modes.eigenvalues.maxCoeff() : 0.0;
    const double pole_tol = std::max(1e-8, 1e3 * std::numeric_limits<double>::epsilon() * lam_max);
    std::vector<double> out;
    out.reserve(modes.eigenvalues.size());
    for (Eigen::Index i = 0; i < modes.eigenvalues.size(); ++i) {
        const double lam = modes.eigenvalues(i);
        double s1 = 0.0;
        double s2 = 0.0;
        for (std::size_t k = 0; k < star.bath_freqs.size(); ++k) {
            const double wk2 = star.bath_freqs[k] * star.bath_freqs[k];
            const double gap = wk2 - lam;
            if (std::abs(gap) < pole_tol) {
                if (G == 0.0) continue;
                throw PoleError("eigenvalue_coupling_derivatives: eigenvalue on a bath frequency");
            }
            const double g2 = star.couplings[k] * star.couplings[k];
            s1 += g2 / gap;
            s2 += g2 / (gap * gap);
        }
        out.push_back(-2.0 * G * s1 / (1.0 + G * G * s2));
    }
    return out;
}

std::vector<double> eigenvalue_coupling_derivatives(const StarSystem& star) {
    const StarSystem split = with_split_degeneracies(star);
    return eigenvalue_coupling_derivatives(split, normal_modes(split));
}

double secular_residual(const StarSystem& star, const NormalModes& modes) {
    const double v00 = shifted_frequency_sq(star);
    const double G2 = star.scale * star.scale;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < modes.eigenvalues.size(); ++i) {
        const double lam = modes.eigenvalues(i);
        double sum = 0.0;
        for (std::size_t k = 0; k < star.bath_freqs.size(); ++k) {
            const double g2 = star.couplings[k] * star.couplings[k];
            sum += G2 * g2 / (star.bath_freqs[k] * star.bath_freqs[k] - lam);
        }
        worst = std::max(worst, std::abs(v00 - lam - sum) / std::max(1.0, lam));
    }
    return worst;
}

StarFamily::StarFamily(const StarSystem& star)
    : star_(with_split_degeneracies(star)), modes_(normal_modes(star_)) {}

CovarianceMatrix StarFamily::covariance(double T) const {
    check_temperature(T, "reduced_probe_covariance");
    CovarianceMatrix s{0.0, 0.0, 0.0};
    for (Eigen::Index i = 0; i < modes_.eigenvalues.size(); ++i) {
        const double w = std::sqrt(modes_.eigenvalues(i));
        const double o2 = modes_.mode_matrix(0, i) * modes_.mode_matrix(0, i);
        const double coth = 1.0 + 2.0 * bose_occupation(w, T);
        s.sigma_xx += o2 * coth / (2.0 * w);
        s.sigma_pp += o2 * 0.5 * w * coth;
    }
    check_physical(s);
    return s;
}

CovarianceMatrix StarFamily::increment(double T1, double T2) const {
    check_temperature(T1, "increment");
    check_temperature(T2, "increment");
    CovarianceMatrix d{0.0, 0.0, 0.0};
    if (T1 == T2) return d;
    for (Eigen::Index i = 0; i < modes_.eigenvalues.size(); ++i) {
        const double w = std::sqrt(modes_.eigenvalues(i));
        const double o2 = modes_.mode_matrix(0, i) * modes_.mode_matrix(0, i);
        const double dn = bose_difference(w, T1, T2);
        d.sigma_xx += o2 * dn / w;
        d.sigma_pp += o2 * dn * w;
    }
    return d;
}

double StarFamily::star_qfi(double T) const {
    check_temperature(T, "star_qfi");
    double q = 0.0;
    for (Eigen::Index i = 0; i < modes_.eigenvalues.size(); ++i) {
        q += qfi_equilibrium(std::sqrt(modes_.eigenvalues(i)), T);
    }
    return q;
}

CovarianceMatrix reduced_probe_covariance(const StarSystem& star, double T) {
    return StarFamily(star).covariance(T);
}

double star_qfi(const StarSystem& star, double T) { return StarFamily(star).star_qfi(T); }

}  // namespace qbt
