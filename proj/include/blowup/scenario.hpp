#ifndef BLOWUP_SCENARIO_HPP
#define BLOWUP_SCENARIO_HPP

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "blowup/blowdown.hpp"
#include "blowup/errors.hpp"
#include "blowup/forcing.hpp"
#include "blowup/integrator.hpp"
#include "blowup/lpsolver.hpp"
#include "blowup/polyfield.hpp"
#include "blowup/timewarp.hpp"

namespace blowup {

// Declarative description of one pipeline run: the planar field, the forcing
// coupling, the chart, and solver overrides.
struct Scenario {
    std::string name = "unnamed";
    std::string fx, fy;          // F components in (x, y)
    std::string gx = "0", gy = "0";
    nlohmann::json forcing_spec; // family + parameters
    BlowupChart chart;
    std::optional<Rational> recenter;  // axis equilibrium to move to the origin
    std::optional<int> kappa_override;
    double sigma0 = 1.0;
    double beta = 0.0;  // 0 selects alpha/2
    double cutoff_init = 0.5;
    Vec2 sim_init{0.1, 0.5};
    double sim_T = 3.0;
    unsigned seed = 12345;

    static Scenario from_json(const nlohmann::json& j);
    static Scenario load(const std::string& path);
};

inline Scenario Scenario::from_json(const nlohmann::json& j) {
    Scenario sc;
    try {
        sc.name = j.value("name", sc.name);
        sc.fx = j.at("field").at("fx").get<std::string>();
        sc.fy = j.at("field").at("fy").get<std::string>();
        if (j.contains("coupling")) {
            sc.gx = j["coupling"].value("gx", "0");
            sc.gy = j["coupling"].value("gy", "0");
        }
        sc.forcing_spec = j.value("forcing", nlohmann::json{{"family", "none"}});
        if (j.contains("chart")) {
            const auto& c = j["chart"];
            std::string dir = c.value("direction", "x");
            sc.chart.direction = dir == "y" ? BlowupChart::Direction::Y : BlowupChart::Direction::X;
            sc.chart.sign = c.value("sign", 1);
            sc.chart.p = c.value("p", 1);
            sc.chart.q = c.value("q", 1);
        }
        if (j.contains("recenter")) sc.recenter = parse_rational(j["recenter"].get<std::string>());
        if (j.contains("kappa")) sc.kappa_override = j["kappa"].get<int>();
        sc.sigma0 = j.value("sigma0", sc.sigma0);
        sc.beta = j.value("beta", sc.beta);
        sc.cutoff_init = j.value("cutoff", sc.cutoff_init);
        if (j.contains("simulate")) {
            const auto& s = j["simulate"];
            sc.sim_init = {s.value("u0", sc.sim_init.x), s.value("v0", sc.sim_init.y)};
            sc.sim_T = s.value("T", sc.sim_T);
        }
        sc.seed = j.value("seed", sc.seed);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario schema: ") + e.what());
    }
    return sc;
}

inline Scenario Scenario::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario parse: ") + e.what());
    }
    return from_json(j);
}

inline ForcingFn forcing_from_spec(const nlohmann::json& spec) {
    std::string family = spec.value("family", "none");
    if (family == "none") return make_exponential_forcing(0.0, 1.0);
    if (family == "exponential")
        return make_exponential_forcing(spec.at("c").get<double>(), spec.at("eta").get<double>());
    if (family == "exp_trig")
        return make_exp_trig_forcing(spec.at("c").get<double>(), spec.at("a").get<double>(),
                                     spec.at("b").get<double>(), spec.value("phase", 0.0));
    if (family == "exp_poly")
        return make_exp_poly_forcing(spec.at("c").get<double>(), spec.at("m").get<int>(),
                                     spec.at("a").get<double>(), spec.at("eta").get<double>());
    throw ConfigError("unknown forcing family '" + family + "'");
}

// All symbolic and spectral data derived from a scenario, computed once.
struct Pipeline {
    Scenario sc;
    PolyMap2 F, G;
    PolyMap2 pulled_f, pulled_g;       // after the chart, before division
    DesingularizedField desing;        // F side
    PolyMap2 g_desing;                 // G side, divided by the same u^kappa
    std::vector<AxisEquilibrium> equilibria;
    Rational v_star = 0;
    PolyMap2 f_rec, g_rec;             // recentered at the chosen equilibrium
    ForcingFn forcing;
    DelayRHS rhs;
    HyperbolicSplit split;
    BParams bp;

    static Pipeline build(const Scenario& sc, bool need_split = true);
};

inline Pipeline Pipeline::build(const Scenario& sc, bool need_split) {
    Pipeline p;
    p.sc = sc;
    p.F = PolyMap2::parse(sc.fx, sc.fy);
    p.G = PolyMap2::parse(sc.gx, sc.gy);
    p.pulled_f = blowup_pullback(p.F, sc.chart);
    p.pulled_g = blowup_pullback(p.G, sc.chart);
    p.desing = desingularize(p.pulled_f, sc.kappa_override);
    p.g_desing = {p.pulled_g.px.divide_first_pow(p.desing.kappa),
                  p.pulled_g.py.divide_first_pow(p.desing.kappa), "u", "v"};
    p.equilibria = axis_equilibria_and_linearize(p.desing);
    p.forcing = forcing_from_spec(sc.forcing_spec);

    if (sc.recenter) {
        p.v_star = *sc.recenter;
    } else {
        // default: the first hyperbolic saddle on the axis
        bool found = false;
        for (const auto& eq : p.equilibria)
            if (eq.classification == EquilibriumClass::HyperbolicSaddle && eq.v_star_exact) {
                p.v_star = *eq.v_star_exact;
                found = true;
                break;
            }
        if (!found && need_split) throw NonHyperbolic("no exact saddle equilibrium on the axis");
    }
    auto recentered = translate_equilibrium(p.desing, p.v_star);
    p.f_rec = recentered.f;
    p.g_rec = translate_map(p.g_desing, p.v_star);
    p.rhs = make_delay_rhs(p.f_rec, p.g_rec, p.forcing, std::max(1, p.desing.kappa),
                           sc.cutoff_init);
    if (need_split) {
        p.split = spectral_split(p.f_rec.jacobian(0.0, 0.0), sc.seed);
        p.bp = bparams_for(p.split, p.rhs.M);
    }
    return p;
}

inline void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                                 bool desingularized) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out.precision(17);
    if (desingularized) {
        out << "t,u,v,rho\n";
        for (std::size_t i = 0; i < traj.size(); ++i)
            out << traj.times[i] << ',' << traj.states[i].x << ',' << traj.states[i].y << ','
                << (i < traj.rho.size() ? traj.rho[i] : 0.0) << '\n';
    } else {
        out << "tau,x,y\n";
        for (std::size_t i = 0; i < traj.size(); ++i)
            out << traj.times[i] << ',' << traj.states[i].x << ',' << traj.states[i].y << '\n';
    }
}

inline void write_chart_csv(const std::string& path, const ManifoldChart& chart) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out.precision(17);
    out << "sigma,psi_u,psi_v,w_u,w_v,contraction\n";
    for (std::size_t i = 0; i < chart.psi_heads.size(); ++i)
        out << chart.sigma << ',' << chart.psi_heads[i].x << ',' << chart.psi_heads[i].y << ','
            << chart.w_heads[i].x << ',' << chart.w_heads[i].y << ','
            << chart.contraction_factors[i] << '\n';
}

inline void write_cloud_csv(const std::string& path, const ManifoldClouds& clouds) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out.precision(17);
    out << "sigma,x,y,tau,side,uncharacterized\n";
    auto dump = [&](const std::vector<BlowdownPoint>& pts) {
        for (const auto& p : pts)
            out << p.sigma << ',' << p.x << ',' << p.y << ',' << p.tau << ',' << p.side << ','
                << (p.uncharacterized ? 1 : 0) << '\n';
    };
    dump(clouds.plus);
    dump(clouds.minus);
    dump(clouds.zero_time);
}

}  // namespace blowup

#endif
