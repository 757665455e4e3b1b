// qbtherm: batch front end for steady-state thermometry sweeps
//
// Exit codes: 0 success, 1 numerical failure, 2 usage error.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <qbt/errors.hpp>
#include <qbt/metrology.hpp>
#include <qbt/star_oracle.hpp>
#include <qbt/steady_state.hpp>
#include <qbt/sweep.hpp>
#include <qbt/version.hpp>

#include "output.hpp"

namespace {

constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelFlags {
    std::string model = "lorentz-drude";
    double gamma = 1.0;
    double omega_c = 100.0;
    double s = 1.0;
    bool numeric_only = false;
    double probe_freq = 1.0;
};

struct GridFlags {
    std::optional<double> from;
    std::optional<double> to;
    std::optional<int> points;
    bool log = false;
    bool linear = false;
};

struct OutputFlags {
    std::string format = "csv";
    std::string out;
    unsigned threads = 0;
};

void add_model_flags(CLI::App* cmd, ModelFlags& m) {
    cmd->add_option("--model", m.model, "Spectral density: lorentz-drude | exp-cutoff")
        ->check(CLI::IsMember({"lorentz-drude", "exp-cutoff"}));
    cmd->add_option("--gamma", m.gamma, "Dissipation strength");
    cmd->add_option("--omega-c", m.omega_c, "Cutoff frequency");
    cmd->add_option("--s", m.s, "Ohmicity (exp-cutoff)");
    cmd->add_flag("--numeric-kernel", m.numeric_only,
                  "Principal-value Re chi (needed for s other than 1, 2)");
    cmd->add_option("--probe-freq", m.probe_freq, "Bare probe frequency");
}

void add_grid_flags(CLI::App* cmd, GridFlags& g, const std::string& axis) {
    cmd->add_option("--from", g.from, "First " + axis + " value");
    cmd->add_option("--to", g.to, "Last " + axis + " value");
    cmd->add_option("--points", g.points, "Number of grid points");
    auto* log = cmd->add_flag("--log", g.log, "Log-spaced grid");
    cmd->add_flag("--linear", g.linear, "Linearly spaced grid")->excludes(log);
}

void add_output_flags(CLI::App* cmd, OutputFlags& o) {
    cmd->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", o.out, "Output path (default stdout)");
    cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

qbt::SpectralModel make_model(const ModelFlags& f, double gamma) {
    try {
        if (f.model == "lorentz-drude") return qbt::SpectralModel::lorentz_drude(gamma, f.omega_c);
        return qbt::SpectralModel::exp_cutoff(gamma, f.omega_c, f.s, f.numeric_only);
    } catch (const qbt::DomainError& e) {
        throw UsageError(e.what());
    }
}

qbt::SpectralModel make_model(const ModelFlags& f) { return make_model(f, f.gamma); }

qbt::ProbeSpec make_probe(const ModelFlags& f) {
    qbt::ProbeSpec p{f.probe_freq};
    try {
        qbt::validate(p);
    } catch (const qbt::DomainError& e) {
        throw UsageError(e.what());
    }
    return p;
}

qbt::Grid make_grid(const GridFlags& f, qbt::Grid defaults) {
    qbt::Grid g = defaults;
    if (f.from) g.from = *f.from;
    if (f.to) g.to = *f.to;
    if (f.points) g.points = *f.points;
    if (f.log) g.log = true;
    if (f.linear) g.log = false;
    try {
        g.validate();
    } catch (const qbt::DomainError& e) {
        throw UsageError(e.what());
    }
    return g;
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw UsageError(std::string(what) + " must be positive");
}

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

qbtherm::Format format_of(const OutputFlags& o) {
    return o.format == "json" ? qbtherm::Format::Json : qbtherm::Format::Csv;
}

qbt::Table base_table(std::vector<std::string> columns, const qbt::SpectralModel& m,
                      const qbt::ProbeSpec& p) {
    qbt::Table t;
    t.metadata = {{"qbtherm", qbt::kVersion},
                  {"units", "hbar = k_B = omega0 = 1"},
                  {"model", m.id()},
                  {"gamma", g17(m.gamma)},
                  {"omega_c", g17(m.omega_c)},
                  {"omega0", g17(p.omega0)}};
    t.columns = std::move(columns);
    return t;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

qbt::Table run_covariance(const ModelFlags& mf, std::optional<double> temp, bool zero_t,
                          const std::string& route) {
    const auto model = make_model(mf);
    const auto probe = make_probe(mf);
    if (zero_t && temp) throw UsageError("--temp and --zero-temperature are exclusive");
    if (!zero_t && !temp) throw UsageError("--temp is required (or --zero-temperature)");
    if (temp) require_positive(*temp, "--temp");
    const bool want_numeric = route == "numeric" || route == "both";
    const bool want_analytic = route == "analytic" || route == "both";
    const bool want_lowt = route == "lowT";
    if ((want_analytic || want_lowt) && model.variant != qbt::SpectralVariant::LorentzDrude) {
        throw UsageError("analytic and lowT routes exist for the lorentz-drude model only");
    }
    if (zero_t && !want_numeric) throw UsageError("--zero-temperature needs --route numeric");

    auto t = base_table({"route", "T", "sigma_xx", "sigma_pp", "sigma_xp", "error_xx", "error_pp",
                         "rel_diff_xx", "rel_diff_pp"},
                        model, probe);
    const double T = temp.value_or(0.0);
    std::optional<qbt::CovarianceMatrix> numeric;
    if (want_numeric) {
        const auto est = zero_t ? qbt::covariance_numeric_ground(model, probe)
                                : qbt::covariance_numeric(model, probe, T);
        numeric = est.cov;
        t.rows.push_back({std::string("numeric"), T, est.cov.sigma_xx, est.cov.sigma_pp,
                          est.cov.sigma_xp, est.error_xx, est.error_pp, 0.0, 0.0});
    }
    auto add = [&](const std::string& name, const qbt::CovarianceMatrix& c) {
        const double dx = numeric ? rel_diff(c.sigma_xx, numeric->sigma_xx) : NAN;
        const double dp = numeric ? rel_diff(c.sigma_pp, numeric->sigma_pp) : NAN;
        t.rows.push_back({name, T, c.sigma_xx, c.sigma_pp, c.sigma_xp, 0.0, 0.0, dx, dp});
    };
    if (want_analytic) add("analytic", qbt::covariance_analytic_ld(model.gamma, model.omega_c, probe, T).cov);
    if (want_lowt) add("lowT", qbt::covariance_lowT_approx(model.gamma, model.omega_c, probe, T));
    if (!zero_t) add("thermal", qbt::thermal_covariance(probe, T));
    if (!numeric) {
        // without a numeric row the diff columns would be NaN; report against thermal instead
        const auto& th = std::get<double>(t.rows.back()[2]);
        const auto& thp = std::get<double>(t.rows.back()[3]);
        for (auto& row : t.rows) {
            row[7] = rel_diff(std::get<double>(row[2]), th);
            row[8] = rel_diff(std::get<double>(row[3]), thp);
        }
        t.metadata.emplace_back("rel_diff_reference", "thermal");
    } else {
        t.metadata.emplace_back("rel_diff_reference", "numeric");
    }
    return t;
}

// Single-temperature variants of the qfi / sensitivity sweeps.
qbt::Table single_point(const qbt::SpectralModel& model, const qbt::ProbeSpec& probe, double T,
                        bool with_sensitivity) {
    const qbt::SteadyStateSolver solver(model, probe);
    if (with_sensitivity) {
        const auto r = qbt::sensitivity_report(solver, T);
        qbt::check_bound_chain(r);
        auto t = base_table({"T", "sigma_xx", "sigma_pp", "qfi", "f_energy", "f_xsq", "rel_error"},
                            model, probe);
        t.rows.push_back({T, r.cov.sigma_xx, r.cov.sigma_pp, r.qfi, r.f_energy, r.f_xsq, r.rel_error});
        return t;
    }
    const auto est = solver.estimate(T);
    const double q = qbt::qfi_from_fidelity(solver, T);
    auto t = base_table({"T", "sigma_xx", "sigma_pp", "error_xx", "error_pp", "qfi", "rel_error"},
                        model, probe);
    t.rows.push_back({T, est.cov.sigma_xx, est.cov.sigma_pp, est.error_xx, est.error_pp, q,
                      qbt::relative_error(q, T)});
    return t;
}

std::vector<double> positive_list(const std::vector<double>& v, const char* what) {
    if (v.empty()) throw UsageError(std::string(what) + " needs at least one value");
    for (double x : v) require_positive(x, what);
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qbtherm: steady-state quantum Brownian thermometry"};
    app.set_version_flag("--version", std::string(qbt::kVersion));
    app.require_subcommand(1);

    ModelFlags mf;
    GridFlags gf;
    OutputFlags of;
    std::optional<double> temp;
    bool zero_t = false;
    std::string route = "numeric";
    std::vector<double> gammas;
    std::vector<double> temps;
    std::vector<double> scales;
    std::optional<double> omega_from, omega_to;
    int n_modes = 2000;
    std::optional<double> omega_max;

    auto* cov = app.add_subcommand("covariance", "Stationary covariance at one temperature");
    add_model_flags(cov, mf);
    add_output_flags(cov, of);
    cov->add_option("--temp", temp, "Sample temperature");
    cov->add_flag("--zero-temperature", zero_t, "T -> 0 limit (numeric route)");
    cov->add_option("--route", route, "numeric | analytic | lowT | both")
        ->check(CLI::IsMember({"numeric", "analytic", "lowT", "both"}));

    auto* qfi = app.add_subcommand("qfi", "Quantum Fisher information vs temperature");
    auto* sens = app.add_subcommand("sensitivity", "QFI and F_T(H_p), F_T(x^2) vs temperature");
    for (auto* cmd : {qfi, sens}) {
        add_model_flags(cmd, mf);
        add_output_flags(cmd, of);
        add_grid_flags(cmd, gf, "temperature");
        cmd->add_option("--temp", temp, "Single temperature instead of a grid");
    }

    auto* f1a = app.add_subcommand("fig1a", "delta T / T vs T for several gamma");
    f1a->add_option("--gammas", gammas, "Dissipation strengths")->delimiter(',');
    auto* f1b = app.add_subcommand("fig1b", "QFI vs gamma for several T");
    f1b->add_option("--temps", temps, "Temperatures")->delimiter(',');
    auto* f2 = app.add_subcommand("fig2", "QFI and sensitivities vs T for several gamma");
    f2->add_option("--gammas", gammas, "Dissipation strengths")->delimiter(',');
    auto* f3 = app.add_subcommand("fig3", "Ohmic vs super-Ohmic QFI vs T");
    f3->add_option("--gamma", mf.gamma, "Dissipation strength");
    f3->add_option("--omega-from", omega_from, "First frequency of the J_s columns");
    f3->add_option("--omega-to", omega_to, "Last frequency of the J_s columns");
    for (auto* cmd : {f1a, f1b, f2, f3}) {
        cmd->add_option("--omega-c", mf.omega_c, "Cutoff frequency");
        add_grid_flags(cmd, gf, cmd == f1b ? "gamma" : "temperature");
        add_output_flags(cmd, of);
    }

    auto* star = app.add_subcommand("star", "Finite star-system oracle vs the continuum");
    add_model_flags(star, mf);
    add_output_flags(star, of);
    add_grid_flags(star, gf, "G");
    star->add_option("--temp", temp, "Sample temperature");
    star->add_option("--modes", n_modes, "Number of bath modes");
    star->add_option("--omega-max", omega_max, "Largest bath frequency (default 20 omega_c)");
    star->add_option("--G", scales, "Coupling scales G")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    const qbt::SweepOptions sweep{of.threads};
    try {
        qbt::Table table;
        if (cov->parsed()) {
            table = run_covariance(mf, temp, zero_t, route);
        } else if (qfi->parsed() || sens->parsed()) {
            const auto model = make_model(mf);
            const auto probe = make_probe(mf);
            const bool with_sens = sens->parsed();
            if (temp) {
                if (gf.from || gf.to || gf.points) throw UsageError("--temp excludes grid flags");
                require_positive(*temp, "--temp");
                table = single_point(model, probe, *temp, with_sens);
            } else {
                const auto grid = make_grid(gf, {1e-2, 1.0, 11, true});
                table = with_sens ? qbt::sweep_sensitivity(model, probe, grid, sweep)
                                  : qbt::sweep_qfi(model, probe, grid, sweep);
            }
        } else if (f1a->parsed()) {
            const auto g = positive_list(gammas.empty() ? std::vector<double>{0.1, 1.0, 5.0} : gammas,
                                         "--gammas");
            require_positive(mf.omega_c, "--omega-c");
            table = qbt::fig1a(g, mf.omega_c, make_grid(gf, {1e-3, 1.0, 31, true}), sweep);
        } else if (f1b->parsed()) {
            const auto ts = positive_list(temps.empty() ? std::vector<double>{1.0, 0.1, 0.01} : temps,
                                          "--temps");
            require_positive(mf.omega_c, "--omega-c");
            table = qbt::fig1b(ts, mf.omega_c, make_grid(gf, {0.1, 10.0, 21, true}), sweep);
        } else if (f2->parsed()) {
            const auto g = positive_list(
                gammas.empty() ? std::vector<double>{5e-3, 5e-2, 0.5} : gammas, "--gammas");
            require_positive(mf.omega_c, "--omega-c");
            table = qbt::fig2(g, mf.omega_c, make_grid(gf, {1e-2, 1.0, 21, true}), sweep);
        } else if (f3->parsed()) {
            if (!f3->count("--gamma")) mf.gamma = 0.1;
            require_positive(mf.gamma, "--gamma");
            require_positive(mf.omega_c, "--omega-c");
            const auto tgrid = make_grid(gf, {1e-3, 1.0, 20, true});
            GridFlags wf;
            wf.from = omega_from.value_or(1e-2);
            wf.to = omega_to.value_or(10.0 * mf.omega_c);
            wf.points = tgrid.points;
            wf.log = true;
            table = qbt::fig3(mf.gamma, mf.omega_c, tgrid, make_grid(wf, {}), sweep);
        } else if (star->parsed()) {
            qbt::StarSweepSpec spec{make_model(mf), make_probe(mf)};
            spec.T = temp.value_or(0.1);
            require_positive(spec.T, "--temp");
            if (n_modes < 1) throw UsageError("--modes must be at least 1");
            spec.n_modes = n_modes;
            spec.omega_max = omega_max.value_or(20.0 * mf.omega_c);
            require_positive(spec.omega_max, "--omega-max");
            if (!scales.empty() && (gf.from || gf.to || gf.points)) {
                throw UsageError("--G excludes grid flags");
            }
            if (!scales.empty()) {
                spec.scales = scales;
            } else if (gf.from || gf.to || gf.points) {
                spec.scales = make_grid(gf, {0.0, 1.0, 5, false}).values();
            } else {
                spec.scales = {0.0, 1.0};
            }
            for (double G : spec.scales) {
                if (!(G >= 0.0)) throw UsageError("--G values must be non-negative");
            }
            table = qbt::star_sweep(spec, sweep);
        }
        qbtherm::write_table(table, format_of(of), of.out);
    } catch (const UsageError& e) {
        std::cerr << "qbtherm: usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const qbt::ConvergenceError& e) {
        std::cerr << "qbtherm: " << e.what() << " (estimate " << e.estimate() << ", error "
                  << e.error_estimate() << ")\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "qbtherm: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
