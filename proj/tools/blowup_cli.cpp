// Scenario-driven pipeline runner: blow up, simulate, solve manifolds, blow
// down, verify certificates, and dump the constants report.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "blowup/scenario.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliOptions {
    std::string scenario_path;
    std::string out_dir = ".";
    unsigned long long seed = 0;
    double sigma0 = 0.0;
    double beta = 0.0;
    int kappa = -1;
};

blowup::Scenario load_scenario(const CliOptions& opt) {
    auto sc = blowup::Scenario::load(opt.scenario_path);
    if (opt.seed != 0) sc.seed = static_cast<unsigned>(opt.seed);
    if (opt.sigma0 > 0.0) sc.sigma0 = opt.sigma0;
    if (opt.beta > 0.0) sc.beta = opt.beta;
    if (opt.kappa >= 0) sc.kappa_override = opt.kappa;
    return sc;
}

json equilibria_json(const blowup::Pipeline& p) {
    json out = json::array();
    for (const auto& eq : p.equilibria) {
        json e;
        e["v"] = eq.v_star;
        if (eq.v_star_exact) e["v_exact"] = blowup::rational_to_string(*eq.v_star_exact);
        e["jacobian"] = {eq.jacobian.a, eq.jacobian.b, eq.jacobian.c, eq.jacobian.d};
        e["eigenvalues_re"] = {eq.eigenvalues.lambda1.real(), eq.eigenvalues.lambda2.real()};
        e["eigenvalues_im"] = {eq.eigenvalues.lambda1.imag(), eq.eigenvalues.lambda2.imag()};
        e["class"] = blowup::to_string(eq.classification);
        out.push_back(e);
    }
    return out;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw blowup::ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

int cmd_blowup(const CliOptions& opt) {
    auto sc = load_scenario(opt);
    auto p = blowup::Pipeline::build(sc, /*need_split=*/false);
    std::cout << "blown-up field: " << p.pulled_f.to_string() << '\n';
    std::cout << "kappa = " << p.desing.kappa << '\n';
    std::cout << "desingularized: " << p.desing.f.to_string() << '\n';
    std::cout << "axis equilibria:\n";
    for (const auto& eq : p.equilibria)
        std::cout << "  v = " << eq.v_star << "  eig = (" << eq.eigenvalues.lambda1.real() << ", "
                  << eq.eigenvalues.lambda2.real() << ")  " << blowup::to_string(eq.classification)
                  << '\n';
    json rep;
    rep["scenario"] = sc.name;
    rep["blown_up_field"] = p.pulled_f.to_string();
    rep["kappa"] = p.desing.kappa;
    rep["kappa_zero_warning"] = p.desing.zero_kappa_warning;
    rep["desingularized_field"] = p.desing.f.to_string();
    rep["axis_invariant"] = p.desing.axis_invariant;
    rep["equilibria"] = equilibria_json(p);
    write_json(fs::path(opt.out_dir) / "blowup.json", rep);
    return 0;
}

int cmd_simulate(const CliOptions& opt) {
    auto sc = load_scenario(opt);
    auto p = blowup::Pipeline::build(sc, /*need_split=*/false);

    // the simulation runs in un-recentered desingularized coordinates
    blowup::DelayRHS sim_rhs;
    sim_rhs.f = p.desing.f;
    sim_rhs.g = p.g_desing;
    sim_rhs.forcing = p.forcing;
    sim_rhs.kappa = std::max(1, p.desing.kappa);

    auto traj = blowup::integrate_desingularized(sim_rhs, sc.sim_init, sc.sim_T);
    blowup::write_trajectory_csv((fs::path(opt.out_dir) / "trajectory_desing.csv").string(), traj,
                                 true);

    auto [x0, y0] = sc.chart.apply(sc.sim_init.x, sc.sim_init.y);
    double tau_end = traj.rho.back();
    // dense sampling keeps the comparison interpolation error below the gate
    auto orig = blowup::integrate_original(p.F, p.G, p.forcing, {x0, y0}, 0.0, tau_end, 1e-10,
                                           1e-12, 0.001);
    blowup::write_trajectory_csv((fs::path(opt.out_dir) / "trajectory_original.csv").string(),
                                 orig, false);

    blowup::Trajectory mapped;
    mapped.times = traj.times;
    for (const auto& s : traj.states) {
        auto [x, y] = sc.chart.apply(s.x, s.y);
        mapped.states.push_back({x, y});
    }
    blowup::WarpPair warp{traj.times, traj.rho, 0.0};
    double dev = blowup::orbit_compare(mapped, orig, warp);
    std::cout << "orbit deviation after retiming: " << dev << '\n';

    json rep;
    rep["scenario"] = sc.name;
    rep["orbit_deviation"] = dev;
    rep["axis_flag"] = traj.axis_flag;
    rep["accepted_steps"] = traj.accepted_steps;
    rep["rejected_steps"] = traj.rejected_steps;
    write_json(fs::path(opt.out_dir) / "simulate.json", rep);
    return dev <= 1e-6 ? 0 : 2;
}

json constants_json(const blowup::Pipeline& p) {
    json c;
    c["A"] = {p.split.A.a, p.split.A.b, p.split.A.c, p.split.A.d};
    c["C"] = p.split.C;
    c["alpha"] = p.split.alpha;
    c["L"] = p.split.L;
    c["K"] = p.split.K;
    c["lambda"] = p.bp.lambda;
    c["Theta"] = p.bp.Theta;
    c["M"] = p.rhs.M;
    c["eta"] = p.forcing.decay_eta;
    c["H"] = p.forcing.envelope_H;
    c["cutoff_radius"] = p.rhs.cutoff_radius;
    c["kappa"] = p.rhs.kappa;
    c["seed"] = p.sc.seed;
    return c;
}

int cmd_manifold(const CliOptions& opt, std::vector<std::string>& failures) {
    auto sc = load_scenario(opt);
    auto p = blowup::Pipeline::build(sc);
    auto cfg = blowup::make_lp_config(p.rhs, p.split, sc.sigma0, sc.beta);

    auto chart = blowup::build_manifold_chart(sc.sigma0, cfg, p.rhs, p.split, p.bp);
    blowup::write_chart_csv((fs::path(opt.out_dir) / "manifold_chart.csv").string(), chart);

    for (double c : chart.contraction_factors)
        if (c >= 0.5 + 0.05) failures.push_back("contraction");
    if (!chart.decay.pass) failures.push_back("decay");

    chart.tangency_ratios = blowup::tangency_probe(sc.sigma0, cfg, p.rhs, p.split, p.bp);
    bool tan_ok = true;
    for (std::size_t i = 1; i < chart.tangency_ratios.size(); ++i)
        if (chart.tangency_ratios[i] > chart.tangency_ratios[i - 1]) tan_ok = false;
    if (!chart.tangency_ratios.empty() && chart.tangency_ratios.front() > 0.0 &&
        chart.tangency_ratios.back() > 0.1 * chart.tangency_ratios.front())
        tan_ok = false;
    if (!tan_ok) failures.push_back("tangency");

    blowup::Segment psi = blowup::psi_from_head(
        {cfg.r * 0.5, cfg.r * 0.5}, p.split, p.bp);
    auto sol = blowup::solve_fixed_point(psi, sc.sigma0, cfg, p.rhs, p.split, p.bp);
    double psi_norm = blowup::bnorm(psi, p.bp);
    for (double dt : {1.0, 2.0, 5.0}) {
        double t = sc.sigma0 + std::round(dt / cfg.dt) * cfg.dt;
        double res = blowup::invariance_check(sol, t, cfg, p.rhs, p.split, p.bp);
        chart.invariance_residuals.push_back(res);
        if (res > 10.0 * cfg.fp_tol * std::max(psi_norm, 1e-16)) failures.push_back("invariance");
    }

    json rep;
    rep["scenario"] = sc.name;
    rep["constants"] = constants_json(p);
    rep["config"] = {{"sigma0", cfg.sigma0}, {"r", cfg.r},     {"delta", cfg.delta},
                     {"beta", cfg.beta},     {"dt", cfg.dt},   {"T_max", cfg.T_max},
                     {"fp_tol", cfg.fp_tol}, {"zeta", cfg.zeta},
                     {"contraction_bound", cfg.contraction_bound}};
    rep["N_est"] = chart.decay.N_est;
    rep["N_bound"] = chart.decay.N_bound;
    rep["tangency_ratios"] = chart.tangency_ratios;
    rep["invariance_residuals"] = chart.invariance_residuals;
    rep["contraction_factors"] = chart.contraction_factors;
    rep["failures"] = failures;
    write_json(fs::path(opt.out_dir) / "manifold.json", rep);
    return failures.empty() ? 0 : 2;
}

int cmd_blowdown(const CliOptions& opt) {
    auto sc = load_scenario(opt);
    auto p = blowup::Pipeline::build(sc);
    auto cfg = blowup::make_lp_config(p.rhs, p.split, sc.sigma0, sc.beta);
    auto chart = blowup::build_manifold_chart(sc.sigma0, cfg, p.rhs, p.split, p.bp);

    // the blow-down runs in un-recentered coordinates: shift v back
    blowup::ManifoldChart shifted = chart;
    double vs = blowup::to_double(p.v_star);
    for (auto& h : shifted.psi_heads) h.y += vs;
    blowup::DelayRHS raw = p.rhs;
    raw.f = p.desing.f;
    raw.g = p.g_desing;
    auto clouds = blowup::reconstruct_manifolds(shifted, raw);
    blowup::write_cloud_csv((fs::path(opt.out_dir) / "manifold_cloud.csv").string(), clouds);

    json rep;
    rep["scenario"] = sc.name;
    rep["plus_count"] = clouds.plus.size();
    rep["minus_count"] = clouds.minus.size();
    rep["zero_time_count"] = clouds.zero_time.size();
    rep["excluded_radius"] = clouds.excluded_radius;
    write_json(fs::path(opt.out_dir) / "blowdown.json", rep);
    return 0;
}

int cmd_report(const CliOptions& opt) {
    auto sc = load_scenario(opt);
    auto p = blowup::Pipeline::build(sc);
    double beta = sc.beta > 0.0 ? sc.beta : p.split.alpha / 2.0;
    json rep;
    rep["scenario"] = sc.name;
    rep["constants"] = constants_json(p);
    rep["equilibria"] = equilibria_json(p);
    json ladder = json::array();
    for (const auto& rung : blowup::zeta_ladder(p.rhs, p.split, sc.sigma0, beta))
        ladder.push_back({{"delta", rung.delta},
                          {"zeta", rung.zeta},
                          {"contraction_bound", rung.contraction_bound}});
    rep["zeta_ladder"] = ladder;
    write_json(fs::path(opt.out_dir) / "report.json", rep);
    std::cout << rep.dump(2) << '\n';
    return 0;
}

int cmd_verify(const CliOptions& opt) {
    std::vector<std::string> failures;
    auto sc = load_scenario(opt);
    auto p = blowup::Pipeline::build(sc);

    {  // forcing envelope
        std::vector<double> grid;
        for (int i = 0; i <= 400; ++i) grid.push_back(i * 0.05);
        if (!blowup::verify_envelope(p.forcing, grid).pass) failures.push_back("envelope");
    }
    if (!p.desing.axis_invariant) failures.push_back("axis-invariance");

    {  // warp round trip on the scenario trajectory
        blowup::DelayRHS sim_rhs = p.rhs;
        sim_rhs.f = p.desing.f;
        sim_rhs.g = p.g_desing;
        auto traj = blowup::integrate_desingularized(sim_rhs, sc.sim_init, sc.sim_T);
        auto warp = blowup::rho_from_trajectory(traj, sim_rhs.kappa);
        auto inv = blowup::invert_monotone(warp);
        double worst = 0.0;
        for (double t : warp.t_samples) worst = std::max(worst, std::abs(inv.rho(warp.rho(t)) - t));
        if (worst > 1e-8) failures.push_back("warp-roundtrip");
    }

    int rc = cmd_manifold(opt, failures);
    json rep;
    rep["scenario"] = sc.name;
    rep["failures"] = failures;
    write_json(fs::path(opt.out_dir) / "verify.json", rep);
    if (!failures.empty()) {
        std::cerr << "FAIL:";
        for (const auto& f : failures) std::cerr << ' ' << f;
        std::cerr << '\n';
        return 2;
    }
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"blow-up desingularization pipeline"};
    app.require_subcommand(1);
    CliOptions opt;
    app.add_option("--scenario", opt.scenario_path, "scenario JSON path")->required();
    app.add_option("--out", opt.out_dir, "output directory");
    app.add_option("--seed", opt.seed, "override the scenario seed");
    app.add_option("--sigma0", opt.sigma0, "override sigma0");
    app.add_option("--beta", opt.beta, "override beta");
    app.add_option("--kappa", opt.kappa, "override kappa");

    auto* sub_blowup = app.add_subcommand("blowup", "symbolic chart transform report");
    auto* sub_sim = app.add_subcommand("simulate", "trajectories + orbit comparison");
    auto* sub_manifold = app.add_subcommand("manifold", "manifold chart + certificates");
    auto* sub_blowdown = app.add_subcommand("blowdown", "manifold clouds in original coordinates");
    auto* sub_verify = app.add_subcommand("verify", "full certificate battery");
    auto* sub_report = app.add_subcommand("report", "JSON constants summary");

    CLI11_PARSE(app, argc, argv);
    try {
        fs::create_directories(opt.out_dir);
        if (sub_blowup->parsed()) return cmd_blowup(opt);
        if (sub_sim->parsed()) return cmd_simulate(opt);
        if (sub_manifold->parsed()) {
            std::vector<std::string> failures;
            return cmd_manifold(opt, failures);
        }
        if (sub_blowdown->parsed()) return cmd_blowdown(opt);
        if (sub_verify->parsed()) return cmd_verify(opt);
        if (sub_report->parsed()) return cmd_report(opt);
    } catch (const blowup::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 3;
    } catch (const blowup::Error& e) {
        std::cerr << "pipeline error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 3;
}
