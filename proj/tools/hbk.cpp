// hbk: batch driver for the matrix-valued kinetic solver.

#include <CLI11.hpp>

#include <cstdio>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "hbk/hbk.hpp"

namespace fs = std::filesystem;
using namespace hbk;
using io::RunConfig;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_config = 2;
constexpr int exit_constraint = 3;

struct Options {
    std::string config_path;
    std::optional<std::string> output;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
};

RunConfig resolve(const Options& o) {
    RunConfig c = o.config_path.empty() ? RunConfig{} : io::load_config(o.config_path);
    if (o.output) c.output_dir = *o.output;
    if (o.seed) c.seed = *o.seed;
    io::validate(c);
    set_thread_count(o.threads ? *o.threads : -1);
    fs::create_directories(c.output_dir);
    return c;
}

std::string out_path(const RunConfig& c, const std::string& name) { return (fs::path(c.output_dir) / name).string(); }

nlohmann::json envelope(const RunConfig& c, const std::string& command) {
    return {{"command", command}, {"config", io::to_json(c)}};
}

int cmd_simulate(const RunConfig& c) {
    const TorusGrid g = c.grid();
    const DispersionRelation om = io::make_dispersion(c, g);
    const WignerField w0 = io::initial_field(c, g);
    IntegratorConfig ic = c.integrator();
    ic.keep_fields = true;
    const TrajectoryRecord tr = evolve(w0, om, c.collision_params(), ic);

    io::write_trajectory_csv(out_path(c, "trajectory.csv"), tr, c);
    const auto meta = envelope(c, "simulate");
    std::vector<std::size_t> snaps;
    for (std::size_t i = 0; i < tr.fields.size(); ++i)
        if (i == 0 || i + 1 == tr.fields.size() || (c.snapshot_every > 0 && i % c.snapshot_every == 0))
            snaps.push_back(i);
    nlohmann::json snap_list = nlohmann::json::array();
    for (std::size_t i : snaps) {
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_%06zu.hbwf", i);
        nlohmann::json m = meta;
        m["t"] = tr.times[i];
        io::write_snapshot(out_path(c, name), tr.fields[i], m);
        snap_list.push_back({{"file", name}, {"t", tr.times[i]}});
    }
    nlohmann::json rep = meta;
    rep["status"] = tr.status;
    rep["steps_recorded"] = tr.times.size();
    rep["t_final"] = tr.times.back();
    rep["dt_max_heuristic"] = dt_max(om, c.collision_params());
    rep["conservation"] = conservation_report(tr).to_json();
    rep["max_fermi_residual"] = *std::max_element(tr.fermi_residual.begin(), tr.fermi_residual.end());
    rep["snapshots"] = snap_list;
    io::write_json(out_path(c, "report.json"), rep);
    if (tr.status != "ok") {
        std::cerr << "hbk: run stopped at t = " << tr.times.back() << " (" << tr.status << ")\n";
        return exit_constraint;
    }
    return exit_ok;
}

int cmd_epsilon_study(const RunConfig& c) {
    const auto field = io::continuum_field(c);
    if (!field)
        throw Error(errc::config, "initial_data.kind: epsilon-study needs an analytic preset "
                                  "(constant, cosine or polarized-bump)");
    const DispersionFactory make = [&c](const TorusGrid& g) { return io::make_dispersion(c, g); };
    const auto rep = epsilon_study_paired(*field, c.d, c.schedule, make, c.study_op, c.collision_params(), c.slack,
                                          c.cross_mode);
    nlohmann::json out = envelope(c, "epsilon-study");
    out["report"] = rep.to_json();
    io::write_json(out_path(c, "epsilon_study.json"), out);

    std::ofstream csv(out_path(c, "epsilon_study.csv"));
    csv << io::comment_block(c) << "N_coarse,eps_coarse,eps_fine,l2_increment\n";
    io::full_precision(csv);
    for (std::size_t i = 0; i < rep.series.size(); ++i)
        csv << c.schedule[i].first << ',' << c.schedule[i].second << ',' << c.schedule[i + 1].second << ','
            << rep.series[i].residual << '\n';
    std::cout << "epsilon-study verdict: " << (rep.verdict ? "pass" : "fail") << '\n';
    return exit_ok;
}

int cmd_validate_dispersion(const RunConfig& c) {
    nlohmann::json out = envelope(c, "validate-dispersion");
    double envelope_c = 0.0;
    for (double r = 0.0; r <= 200.0; r += 0.05) envelope_c = std::max(envelope_c, std::abs(bessel_f(r)) * std::sqrt(1 + r));
    out["bessel_envelope"] = {{"sup_abs_f_sqrt_1_plus_r", envelope_c}, {"bound", 1.3}, {"pass", envelope_c <= 1.3}};

    const DispersionRelation om = io::make_dispersion(c, TorusGrid(c.d, c.decay_n));
    const DecayFit fit = pt_l3_decay(om, c.decay_t_max, c.decay_samples, c.decay_t_min);
    const double target = 3.0 * c.d / 7.0;
    out["pt_l3_decay"] = {{"N", c.decay_n},
                          {"t", fit.abscissae},
                          {"l3_cubed", fit.values},
                          {"fitted_exponent", fit.fitted_exponent},
                          {"fitted_constant", fit.fitted_constant},
                          {"bound_exponent", target},
                          {"pass", fit.fitted_exponent >= target}};

    IntegrabilityOptions opt;
    opt.step = c.integrability_step;
    const auto g = g_integrability_estimate(SignVector::collision(), c.d, c.f_resolution, opt);
    out["g_integrability"] = g.to_json();
    io::write_json(out_path(c, "validate_dispersion.json"), out);
    std::cout << "l3 decay exponent " << fit.fitted_exponent << " (bound " << target << "), integrability "
              << (g.verdict ? "pass" : "fail") << '\n';
    return exit_ok;
}

int cmd_sigma_coll(const RunConfig& c) {
    const TorusGrid g = c.grid();
    const DispersionRelation om = io::make_dispersion(c, g);
    if (static_cast<std::size_t>(c.sigma_k) >= g.size()) throw Error(errc::config, "sigma_coll.k: outside the grid");
    const SignVector sg = SignVector::collision();
    // Outside [-m, m] the Lorentzian tail carries at most `tail` of the mass.
    const double m = sup_omega_tilde(sg, om) + 2 * c.epsilon / (std::numbers::pi * c.alpha_tail);
    const double lo = c.alpha_min.value_or(-m), hi = c.alpha_max.value_or(m);
    const double step = c.alpha_step.value_or(c.epsilon / 4);
    const auto n = static_cast<long>(std::ceil((hi - lo) / step));
    std::vector<double> alpha(n + 1), sigma(n + 1);
    for (long i = 0; i <= n; ++i) {
        alpha[i] = std::min(hi, lo + static_cast<double>(i) * step);
        sigma[i] = sigma_coll_map(static_cast<std::size_t>(c.sigma_k), alpha[i], sg, om, c.epsilon);
    }
    std::ofstream csv(out_path(c, "sigma_coll.csv"));
    csv << io::comment_block(c) << "alpha,sigma_coll,cumulative_integral\n";
    io::full_precision(csv);
    double integral = 0.0;
    for (long i = 0; i <= n; ++i) {
        if (i > 0) integral += 0.5 * (alpha[i] - alpha[i - 1]) * (sigma[i] + sigma[i - 1]);
        csv << alpha[i] << ',' << sigma[i] << ',' << integral << '\n';
    }
    nlohmann::json out = envelope(c, "sigma-coll");
    out["alpha_range"] = {lo, hi};
    out["alpha_step"] = step;
    out["k"] = c.sigma_k;
    out["integral"] = integral;
    out["normalization_error"] = std::abs(integral - 1.0);
    io::write_json(out_path(c, "sigma_coll.json"), out);
    std::cout << "integral of sigma_coll over alpha: " << integral << '\n';
    return exit_ok;
}

int cmd_selftest(const RunConfig& c) {
    const TorusGrid g = c.grid();
    const DispersionRelation om = io::make_dispersion(c, g);
    const auto res = run_selftest(om, c.collision_params(), c.seed);
    nlohmann::json out = envelope(c, "selftest");
    out["result"] = res.to_json();
    io::write_json(out_path(c, "selftest.json"), out);
    for (const auto& k : res.checks)
        std::cout << (k.pass ? "PASS " : "FAIL ") << k.name << " = " << k.value << " (limit " << k.limit << ")"
                  << (k.error.empty() ? "" : " error: " + k.error) << '\n';
    return res.all_pass() ? exit_ok : exit_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hbk: matrix-valued Boltzmann solver on the lattice torus.\n"
                 "Grid dimension d is limited to 1, 2 or 3; the collision cost grows like N^(2d),\n"
                 "so d = 3 is practical only for N <= 8 on a workstation."};
    app.require_subcommand(1);
    Options o;
    auto add_common = [&o](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "Config file (key = value with [sections])")->check(CLI::ExistingFile);
        sub->add_option("--output", o.output, "Output directory (overrides output_dir)");
        sub->add_option("--threads", o.threads, "Worker threads, 0 = all cores (fallback: HBK_THREADS)")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--seed", o.seed, "Random seed (overrides seed)");
    };
    struct Command {
        const char* name;
        const char* help;
        int (*run)(const RunConfig&);
    };
    const Command commands[] = {
        {"simulate", "Integrate the kinetic equation; writes trajectory.csv, snapshots and report.json",
         cmd_simulate},
        {"epsilon-study", "Paired (N, eps) refinement of H_eff or C_diss", cmd_epsilon_study},
        {"validate-dispersion", "Bessel envelope, l3 decay of the free propagator and integrability of F",
         cmd_validate_dispersion},
        {"sigma-coll", "Sweep alpha and integrate the collision-manifold density", cmd_sigma_coll},
        {"selftest", "Run the invariant suite on the configured grid", cmd_selftest},
    };
    int status = exit_ok;
    for (const auto& cmd : commands) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        add_common(sub);
        sub->callback([&o, &status, run = cmd.run] {
            try {
                status = run(resolve(o));
            } catch (const Error& e) {
                std::cerr << "hbk: " << e.what() << '\n';
                const std::string& code = e.code();
                status = (code == errc::dt_too_large || code == errc::not_psd || code == errc::not_hermitian)
                             ? exit_constraint
                             : exit_config;
            } catch (const fs::filesystem_error& e) {
                std::cerr << "hbk: " << e.what() << '\n';
                status = exit_config;
            }
        });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }
    return status;
}
