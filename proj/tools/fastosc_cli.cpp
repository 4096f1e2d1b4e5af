// Command-line driver: one subcommand per experiment, CSV on stdout or --out.

#include <cerrno>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "fastosc/fastosc.hpp"
#include "fastosc/harness/config.hpp"
#include "fastosc/harness/csv.hpp"
#include "fastosc/harness/sweep.hpp"

namespace {

using namespace fastosc;
using namespace fastosc::harness;

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_config = 2;
constexpr int exit_no_convergence = 3;

std::string read_file(std::string const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError({"cannot open config '" + path + "': " + std::strerror(errno)});
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int cmd_k2(ExperimentConfig const& cfg, std::ostream& out) {
    auto const r = compute_k2(cfg.potential);
    write_row(out, {"k2_re", "k2_im", "by_quadrature_re", "by_quadrature_im", "by_closed_form_re", "by_closed_form_im",
                    "agreement", "classification"});
    write_row(out, {format_real(r.value.real()), format_real(r.value.imag()), format_real(r.by_quadrature.real()),
                    format_real(r.by_quadrature.imag()), format_real(r.by_closed_form.real()),
                    format_real(r.by_closed_form.imag()), format_real(r.agreement), to_string(r.classification)});
    if (r.flagged) std::cerr << "warning: k2 routes disagree (relative " << r.agreement << ")\n";
    return exit_ok;
}

int cmd_predict(ExperimentConfig const& cfg, std::ostream& out) {
    auto const k2 = compute_k2(cfg.potential).value;
    std::vector<std::vector<std::optional<double>>> rows;
    for (double eps : cfg.epsilons) {
        auto const l = predict_lambda(k2, eps);
        rows.push_back({eps, k2.real(), k2.imag(), l.real(), l.imag()});
    }
    write_table(out, {"eps", "k2_re", "k2_im", "lambda_pred_re", "lambda_pred_im"}, rows);
    return exit_ok;
}

int cmd_solve(ExperimentConfig const& cfg, std::ostream& out) {
    std::optional<K2Report> k2;
    if (!cfg.potential.has_zero_mode() && !cfg.bracket) k2 = compute_k2(cfg.potential);
    auto const rec = solve_record(cfg, cfg.epsilons.front(), k2);
    emit_csv({rec}, out);
    if (!rec.converged) {
        std::cerr << "no admissible root: " << rec.reason << " (iterations " << rec.iterations << ", |F| "
                  << rec.residual << ")\n";
        return exit_no_convergence;
    }
    return exit_ok;
}

int cmd_sweep(ExperimentConfig const& cfg, std::ostream& out) {
    auto const res = run_sweep(cfg);
    emit_csv(res.records, out);
    auto const& s = res.summary;
    std::cerr << "converged " << s.converged << "/" << res.records.size();
    if (s.slope) std::cerr << ", slope " << format_real(*s.slope);
    if (s.mean_remainder) std::cerr << ", mean remainder_ratio " << format_real(*s.mean_remainder);
    if (s.remainder_spread) std::cerr << ", remainder spread " << format_real(*s.remainder_spread);
    std::cerr << '\n';
    return exit_ok;
}

int cmd_scan(ExperimentConfig const& cfg, std::ostream& out) {
    double const eps = cfg.epsilons.front();
    auto const scan = scan_roots(cfg.potential, eps, cfg.solver.scan_window, cfg.solver.scan_samples, cfg.solver);
    std::vector<std::vector<std::optional<double>>> rows;
    for (std::size_t i = 0; i < scan.count(); ++i) {
        double const k = scan.roots[i];
        rows.push_back({eps, k, -k * k, scan.residuals[i]});
    }
    write_table(out, {"eps", "kappa", "lambda", "residual"}, rows);
    std::cerr << "roots found: " << scan.count() << '\n';
    return exit_ok;
}

int cmd_lemma(ExperimentConfig const& cfg, std::ostream& out) {
    auto const fit = decay_order_fit(cfg.potential, cfg.epsilons);
    std::vector<std::vector<std::optional<double>>> rows;
    for (std::size_t i = 0; i < fit.epsilons.size(); ++i) rows.push_back({fit.epsilons[i], fit.errors[i]});
    write_table(out, {"eps", "error"}, rows);
    std::cerr << "fitted order " << format_real(fit.fitted_order) << (fit.floor_flag ? " (floor reached)" : "") << '\n';
    return exit_ok;
}

int cmd_gauge_check(ExperimentConfig const& cfg, std::ostream& out) {
    auto const m = cfg.potential.support_hull();
    auto catalog = default_test_catalog(m);
    std::mt19937_64 rng(cfg.seed);
    for (int i = 0; i < 5; ++i) {
        double const c = m.lo + m.length() * unit_uniform(rng);
        double const w = m.length() * (0.05 + 0.3 * unit_uniform(rng));
        catalog.push_back(TestFunction::gaussian(c, w, i % 3));
    }
    std::vector<std::vector<std::optional<double>>> rows;
    for (double eps : cfg.epsilons) {
        auto const g = build_gauge(cfg.potential, eps);
        SampleGrid const grid{m.lo - 0.1 * m.length(), m.hi + 0.1 * m.length(),
                              static_cast<std::size_t>(std::ceil(1.2 * m.length() / (eps / 40.0))) + 1};
        double worst = 0.0;
        for (auto const& phi : catalog) worst = std::max(worst, identity_residual(g, phi, grid));
        rows.push_back({eps, worst});
        std::cerr << "eps " << format_real(eps) << ": L bound sample " << format_real(l_bound_sample(g, catalog)) << '\n';
    }
    write_table(out, {"eps", "identity_residual"}, rows);
    return exit_ok;
}

int cmd_keps(ExperimentConfig const& cfg, std::ostream& out) {
    std::vector<KEpsReport> reps;
    std::vector<std::vector<std::optional<double>>> rows;
    for (double eps : cfg.epsilons) {
        auto const r = compute_k_eps(cfg.potential, eps);
        reps.push_back(r);
        rows.push_back({eps, r.m1.real(), r.m1.imag(), r.m2.real(), r.m2.imag(), r.k_eps.real(), r.k_eps.imag()});
    }
    write_table(out, {"eps", "m1_re", "m1_im", "m2_re", "m2_im", "k_eps_re", "k_eps_im"}, rows);
    if (reps.size() >= 3) {
        auto const fit = fit_expansion(reps);
        std::cerr << "c1 = " << format_real(fit.c1.real()) << " + " << format_real(fit.c1.imag()) << "i, c2 = "
                  << format_real(fit.c2.real()) << " + " << format_real(fit.c2.imag()) << "i\n";
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Emerging eigenvalue of -d^2/dx^2 + V(x, x/eps): prediction and direct solver"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> points_per_period;
    app.add_option("--config", config_path, "experiment config (JSON)")->required();
    app.add_option("--out", out_path, "output path (default: stdout)");
    app.add_option("--seed", seed, "seed override for randomized checks");
    app.add_option("--points-per-period", points_per_period, "solver steps per fast period (>= 20)");

    std::map<std::string, int (*)(ExperimentConfig const&, std::ostream&)> const commands{
        {"k2", cmd_k2},       {"predict", cmd_predict}, {"solve", cmd_solve},
        {"sweep", cmd_sweep}, {"scan", cmd_scan},       {"lemma", cmd_lemma},
        {"gauge-check", cmd_gauge_check}, {"keps", cmd_keps},
    };
    std::map<std::string, std::string> const help{
        {"k2", "k2 by both routes and the existence verdict"},
        {"predict", "leading-order eigenvalue -eps^4 k2^2 per eps"},
        {"solve", "direct bound-state solve at the first eps"},
        {"sweep", "prediction vs solver over the eps list"},
        {"scan", "count mismatch roots on the kappa window at the first eps"},
        {"lemma", "averaging decay table and fitted order"},
        {"gauge-check", "gauge identity residual per eps"},
        {"keps", "m1, m2, k_eps chain per eps"},
    };
    for (auto const& [name, fn] : commands) app.add_subcommand(name, help.at(name))->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int const code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }
    std::string const command = app.get_subcommands().front()->get_name();

    ExperimentConfig cfg;
    try {
        cfg = parse_config(read_file(config_path), command);
        if (seed) cfg.seed = *seed;
        if (points_per_period) {
            if (*points_per_period < 20) throw ConfigError({"--points-per-period must be >= 20"});
            cfg.solver.points_per_fast_period = *points_per_period;
        }
    } catch (InputError const& e) {
        std::cerr << e.what() << '\n';
        return exit_config;
    }

    try {
        std::ostringstream buffer;
        int const code = commands.at(command)(cfg, buffer);
        if (out_path.empty()) {
            std::cout << buffer.str() << std::flush;
            if (!std::cout) throw std::runtime_error("failed writing to <stdout>");
        } else {
            std::ofstream f(out_path, std::ios::binary);
            if (!f) throw std::runtime_error("cannot open '" + out_path + "': " + std::strerror(errno));
            f << buffer.str();
            f.close();
            if (!f) throw std::runtime_error("failed writing '" + out_path + "'");
        }
        return code;
    } catch (InputError const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failure;
    }
}
