#include "qbt/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qbt/errors.hpp"
#include "qbt/version.hpp"

namespace qbt {

namespace {

// Runs f(i) for i in [0, n). Results land by index, so output order never depends on
// scheduling. The lowest-index exception is rethrown.
template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + fmt(v[i]);
    return out;
}

Table make_table(std::vector<std::string> columns) {
    Table t;
    t.metadata.emplace_back("qbtherm", kVersion);
    t.metadata.emplace_back("units", "hbar = k_B = omega0 = 1");
    t.columns = std::move(columns);
    return t;
}

void add_model_metadata(Table& t, const SpectralModel& m, const ProbeSpec& p) {
    t.metadata.emplace_back("model", m.id());
    t.metadata.emplace_back("gamma", fmt(m.gamma));
    t.metadata.emplace_back("omega_c", fmt(m.omega_c));
    t.metadata.emplace_back("omega0", fmt(p.omega0));
}

void check_row(const std::vector<Cell>& row) {
    for (const auto& c : row) {
        if (const double* v = std::get_if<double>(&c); v && std::isnan(*v)) {
            throw Error("sweep: NaN in output row");
        }
    }
}

struct Point {
    std::size_t block;
    double x;
};

std::vector<Cell> report_row(const SensitivityReport& r) {
    return {r.T, r.cov.sigma_xx, r.cov.sigma_pp, r.qfi, r.f_energy, r.f_xsq, r.rel_error};
}

}  // namespace

void Grid::validate() const {
    if (!(from < to)) throw DomainError("grid: start must be below stop");
    if (points < 2) throw DomainError("grid: need at least two points");
    if (log && !(from > 0.0)) throw DomainError("grid: log spacing needs positive endpoints");
}

std::vector<double> Grid::values() const {
    validate();
    std::vector<double> v(points);
    for (int i = 0; i < points; ++i) {
        const double f = static_cast<double>(i) / (points - 1);
        v[i] = log ? std::exp(std::log(from) + f * (std::log(to) - std::log(from)))
                   : from + f * (to - from);
    }
    v.front() = from;
    v.back() = to;
    return v;
}

std::size_t Table::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::out_of_range("table: no column " + name);
    return static_cast<std::size_t>(it - columns.begin());
}

double Table::number(std::size_t row, const std::string& name) const {
    return std::get<double>(rows.at(row).at(column(name)));
}

Table sweep_sensitivity(const SpectralModel& model, const ProbeSpec& probe, const Grid& temps,
                        const SweepOptions& opts) {
    const auto ts = temps.values();
    const SteadyStateSolver solver(model, probe);
    Table t = make_table({"T", "sigma_xx", "sigma_pp", "qfi", "f_energy", "f_xsq", "rel_error"});
    add_model_metadata(t, model, probe);
    t.rows.resize(ts.size());
    parallel_for(ts.size(), opts.threads, [&](std::size_t i) {
        const auto r = sensitivity_report(solver, ts[i]);
        check_bound_chain(r);
        t.rows[i] = report_row(r);
        check_row(t.rows[i]);
    });
    return t;
}

Table sweep_qfi(const SpectralModel& model, const ProbeSpec& probe, const Grid& temps,
                const SweepOptions& opts) {
    const auto ts = temps.values();
    const SteadyStateSolver solver(model, probe);
    Table t = make_table({"T", "sigma_xx", "sigma_pp", "error_xx", "error_pp", "qfi", "rel_error"});
    add_model_metadata(t, model, probe);
    t.rows.resize(ts.size());
    parallel_for(ts.size(), opts.threads, [&](std::size_t i) {
        const auto est = solver.estimate(ts[i]);
        const double q = qfi_from_fidelity(solver, ts[i]);
        t.rows[i] = {ts[i],  est.cov.sigma_xx, est.cov.sigma_pp, est.error_xx,
                     est.error_pp, q,          relative_error(q, ts[i])};
        check_row(t.rows[i]);
    });
    return t;
}

Table fig1a(const std::vector<double>& gammas, double omega_c, const Grid& temps,
            const SweepOptions& opts) {
    const auto ts = temps.values();
    const ProbeSpec probe{1.0};
    std::vector<std::unique_ptr<SteadyStateSolver>> solvers(gammas.size());
    parallel_for(gammas.size(), opts.threads, [&](std::size_t b) {
        solvers[b] = std::make_unique<SteadyStateSolver>(
            SpectralModel::lorentz_drude(gammas[b], omega_c), probe);
    });

    Table t = make_table({"gamma", "T", "qfi", "rel_error", "log10_rel_error", "qfi_eq",
                          "log10_rel_error_eq"});
    t.metadata.emplace_back("model", "lorentz-drude");
    t.metadata.emplace_back("omega_c", fmt(omega_c));
    t.metadata.emplace_back("gammas", join(gammas));
    t.rows.resize(gammas.size() * ts.size());
    parallel_for(t.rows.size(), opts.threads, [&](std::size_t i) {
        const std::size_t b = i / ts.size();
        const double T = ts[i % ts.size()];
        const double q = qfi_from_fidelity(*solvers[b], T);
        const double log_eq = log_qfi_equilibrium(probe.omega0, T);
        // δT/T = 1/(T√𝓕): log10 form keeps the exponentially large reference finite
        const double log10_eq = -(std::log(T) + 0.5 * log_eq) / std::log(10.0);
        t.rows[i] = {gammas[b], T, q, relative_error(q, T), std::log10(relative_error(q, T)),
                     qfi_equilibrium(probe.omega0, T), log10_eq};
        check_row(t.rows[i]);
    });
    return t;
}

Table fig1b(const std::vector<double>& temps, double omega_c, const Grid& gammas,
            const SweepOptions& opts) {
    const auto gs = gammas.values();
    const ProbeSpec probe{1.0};
    Table t = make_table({"T", "gamma", "qfi", "rel_error"});
    t.metadata.emplace_back("model", "lorentz-drude");
    t.metadata.emplace_back("omega_c", fmt(omega_c));
    t.metadata.emplace_back("temperatures", join(temps));
    t.rows.resize(temps.size() * gs.size());
    // One solver per γ serves every temperature.
    std::vector<std::unique_ptr<SteadyStateSolver>> solvers(gs.size());
    parallel_for(gs.size(), opts.threads, [&](std::size_t j) {
        solvers[j] = std::make_unique<SteadyStateSolver>(SpectralModel::lorentz_drude(gs[j], omega_c),
                                                         probe);
    });
    parallel_for(t.rows.size(), opts.threads, [&](std::size_t i) {
        const double T = temps[i / gs.size()];
        const std::size_t j = i % gs.size();
        const double q = qfi_from_fidelity(*solvers[j], T);
        t.rows[i] = {T, gs[j], q, relative_error(q, T)};
        check_row(t.rows[i]);
    });
    return t;
}

Table fig2(const std::vector<double>& gammas, double omega_c, const Grid& temps,
           const SweepOptions& opts) {
    const auto ts = temps.values();
    const ProbeSpec probe{1.0};
    std::vector<std::unique_ptr<SteadyStateSolver>> solvers(gammas.size());
    parallel_for(gammas.size(), opts.threads, [&](std::size_t b) {
        solvers[b] = std::make_unique<SteadyStateSolver>(
            SpectralModel::lorentz_drude(gammas[b], omega_c), probe);
    });
    Table t = make_table({"gamma", "T", "sigma_xx", "sigma_pp", "qfi", "f_energy", "f_xsq",
                          "ratio_energy", "ratio_xsq"});
    t.metadata.emplace_back("model", "lorentz-drude");
    t.metadata.emplace_back("omega_c", fmt(omega_c));
    t.metadata.emplace_back("gammas", join(gammas));
    t.rows.resize(gammas.size() * ts.size());
    parallel_for(t.rows.size(), opts.threads, [&](std::size_t i) {
        const std::size_t b = i / ts.size();
        const auto r = sensitivity_report(*solvers[b], ts[i % ts.size()]);
        check_bound_chain(r);
        t.rows[i] = {gammas[b], r.T,          r.cov.sigma_xx,       r.cov.sigma_pp,
                     r.qfi,     r.f_energy,   r.f_xsq,              r.f_energy / r.qfi,
                     r.f_xsq / r.qfi};
        check_row(t.rows[i]);
    });
    return t;
}

Table fig3(double gamma, double omega_c, const Grid& temps, const Grid& freqs,
           const SweepOptions& opts) {
    const auto ts = temps.values();
    const auto ws = freqs.values();
    if (ws.size() != ts.size()) {
        throw DomainError("fig3: temperature and frequency grids need the same number of points");
    }
    const ProbeSpec probe{1.0};
    const auto m1 = SpectralModel::exp_cutoff(gamma, omega_c, 1.0);
    const auto m2 = SpectralModel::exp_cutoff(gamma, omega_c, 2.0);
    std::unique_ptr<SteadyStateSolver> s1, s2;
    parallel_for(2, opts.threads, [&](std::size_t k) {
        (k == 0 ? s1 : s2) = std::make_unique<SteadyStateSolver>(k == 0 ? m1 : m2, probe);
    });

    Table t = make_table({"T", "qfi_s1", "qfi_s2", "rel_error_s1", "rel_error_s2", "omega", "J_s1",
                          "J_s2"});
    t.metadata.emplace_back("model", "exp-cutoff s=1 vs s=2");
    t.metadata.emplace_back("gamma", fmt(gamma));
    t.metadata.emplace_back("omega_c", fmt(omega_c));
    t.metadata.emplace_back("omega0", fmt(probe.omega0));
    t.rows.resize(ts.size());
    parallel_for(ts.size(), opts.threads, [&](std::size_t i) {
        const double q1 = qfi_from_fidelity(*s1, ts[i]);
        const double q2 = qfi_from_fidelity(*s2, ts[i]);
        t.rows[i] = {ts[i],
                     q1,
                     q2,
                     relative_error(q1, ts[i]),
                     relative_error(q2, ts[i]),
                     ws[i],
                     spectral_density(m1, ws[i]),
                     spectral_density(m2, ws[i])};
        check_row(t.rows[i]);
    });
    return t;
}

int derivative_sign_violations(const StarSystem& star, const NormalModes& modes,
                               const std::vector<double>& derivatives) {
    const double v00 = shifted_frequency_sq(star);
    int bad = 0;
    for (Eigen::Index i = 0; i < modes.eigenvalues.size(); ++i) {
        const double gap = modes.eigenvalues(i) - v00;
        const double d = derivatives[static_cast<std::size_t>(i)];
        if ((gap > 0.0) != (d > 0.0) || (gap < 0.0) != (d < 0.0)) ++bad;
    }
    return bad;
}

Table star_sweep(const StarSweepSpec& spec, const SweepOptions& opts) {
    validate(spec.model);
    validate(spec.probe);
    if (spec.scales.empty()) throw DomainError("star: need at least one coupling scale G");
    Table t = make_table({"G", "sigma_xx", "sigma_pp", "sigma_xx_continuum", "sigma_pp_continuum",
                          "rel_diff_xx", "rel_diff_pp", "qfi_marginal", "star_qfi",
                          "sign_violations"});
    add_model_metadata(t, spec.model, spec.probe);
    t.metadata.emplace_back("T", fmt(spec.T));
    t.metadata.emplace_back("n_modes", std::to_string(spec.n_modes));
    t.metadata.emplace_back("omega_max", fmt(spec.omega_max));
    t.rows.resize(spec.scales.size());

    parallel_for(spec.scales.size(), opts.threads, [&](std::size_t i) {
        const double G = spec.scales[i];
        StarSystem star = discretize_bath(spec.model, spec.n_modes, spec.omega_max, spec.probe.omega0);
        star.scale = G;
        const StarFamily family(star);
        const auto s = family.covariance(spec.T);

        // J is linear in γ, so scaling every coupling by G is the continuum model at γG².
        CovarianceMatrix ref = thermal_covariance(spec.probe, spec.T);
        if (G > 0.0) {
            SpectralModel scaled = spec.model;
            scaled.gamma *= G * G;
            ref = covariance_numeric(scaled, spec.probe, spec.T).cov;
        }
        int violations = 0;
        if (G > 0.0) {
            const StarSystem split = with_split_degeneracies(star);
            const auto derivs = eigenvalue_coupling_derivatives(split, family.modes());
            violations = derivative_sign_violations(split, family.modes(), derivs);
        }
        const double q_marginal = qfi_from_fidelity(family, spec.T);
        const double q_star = family.star_qfi(spec.T);
        if (q_marginal > q_star * (1.0 + 1e-3)) {
            throw Error("star: marginal QFI exceeds the global star QFI");
        }
        t.rows[i] = {G,
                     s.sigma_xx,
                     s.sigma_pp,
                     ref.sigma_xx,
                     ref.sigma_pp,
                     std::abs(s.sigma_xx - ref.sigma_xx) / ref.sigma_xx,
                     std::abs(s.sigma_pp - ref.sigma_pp) / ref.sigma_pp,
                     q_marginal,
                     q_star,
                     static_cast<double>(violations)};
        check_row(t.rows[i]);
    });
    return t;
}

}  // namespace qbt
