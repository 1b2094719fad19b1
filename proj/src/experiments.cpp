#include "irswet/experiments.hpp"

#include "irswet/csi_baseline.hpp"
#include "irswet/mc_harness.hpp"
#include "irswet/parallel.hpp"
#include "irswet/precoding.hpp"
#include "irswet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

namespace irswet {

namespace {

using json = nlohmann::json;

constexpr double rad2deg = 180.0 / pi;

ArrayGeometry square(const ArrayGeometry& g, Eigen::Index side)
{
    ArrayGeometry s = g;
    s.Nx = s.Ny = side;
    return s;
}

AOConfig optimizer_of(const ScenarioConfig& cfg)
{
    AOConfig a = cfg.optimizer;
    a.threads = cfg.threads;
    return a;
}

// Configured value first, then the reference sweep values not already present.
std::vector<double> beta_min_sweep(double configured)
{
    std::vector<double> v{configured};
    for (double b : {0.2, 0.5, 0.8, 1.0})
        if (std::abs(b - configured) > 1e-12) v.push_back(b);
    return v;
}

double mean_of(const std::vector<double>& v)
{
    return v.empty() ? 0.0 : pairwise_sum(v.begin(), v.end()) / static_cast<double>(v.size());
}

json jnum(double x)
{
    if (std::isfinite(x)) return x;
    return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

// I0(z) e^{-z}
double bessel_i0_scaled(double z)
{
    if (z < 500) return std::cyl_bessel_i(0.0, z) * std::exp(-z);
    const double t = 1 / (8 * z);
    return (1 + t + 4.5 * t * t + 37.5 * t * t * t) / std::sqrt(2 * pi * z);
}

WorstCaseSetup worst_case_setup(const ScenarioConfig& cfg, const ArrayGeometry& geom, std::size_t K, std::size_t trials)
{
    WorstCaseSetup w;
    w.geometry = geom;
    w.angles = cfg.angles;
    w.coupling = cfg.coupling;
    w.P = cfg.P;
    w.kappa = cfg.kappa;
    w.budget = cfg.budget;
    w.eh = cfg.eh;
    w.overhead = cfg.overhead;
    w.K = K;
    w.trials = trials;
    w.seed = cfg.seed;
    w.beam_slack = cfg.beam_slack;
    w.om = cfg.optimizer;
    w.baseline = cfg.baseline;
    w.threads = cfg.threads;
    return w;
}

Table worst_case_table() { return Table({"N", "K", "trials", "transfer_fraction", "csi_free_w", "csi_free_ideal_w", "csi_based_w", "gap_db"}); }

json add_worst_case_row(Table& t, const WorstCaseSetup& w, const WorstCaseResult& r)
{
    t.add_row({static_cast<long long>(w.geometry.N()), static_cast<long long>(w.K), static_cast<long long>(w.trials),
               r.transfer_fraction, r.csi_free, r.csi_free_ideal, r.csi_based, r.gap_db()});
    return json{{"N", w.geometry.N()}, {"K", w.K}, {"directions", r.directions}, {"gap_db", jnum(r.gap_db())}};
}

struct Beam {
    std::string model;
    RVec thetas, betas;
    Scheme scheme = Scheme::OM;
    double kappa_boundary = 0;
};

// Ideal alignment and the practical design towards `direction`.
std::vector<Beam> broadside_beams(const ScenarioConfig& cfg, const ArrayGeometry& geom, const IncidentField& inc,
                                  double direction)
{
    const RVec los = los_phases(geom, direction);
    ScenarioConfig local = cfg;
    local.geometry = geom;
    const PracticalBeam pb = practical_beam(local, los, inc.mus);
    std::vector<Beam> beams;
    beams.push_back({"ideal", align_phases(los, inc.mus), RVec::Ones(geom.N()), Scheme::OM, 0.0});
    beams.push_back({"practical", pb.result.thetas, pb.result.betas, pb.scheme, pb.kappa_boundary});
    return beams;
}

LinkScenario scaled_scenario(const ScenarioConfig& cfg, const ArrayGeometry& geom, const IncidentField& inc,
                             const Beam& b, double direction)
{
    LinkScenario sc;
    sc.Pe = inc.Pe;
    sc.mus = inc.mus;
    sc.thetas = b.thetas;
    sc.betas = b.betas;
    sc.er_los = los_phases(geom, direction);
    sc.kappa = cfg.kappa;
    sc.budget = cfg.budget;
    sc.eh = cfg.eh;
    return sc;
}

// Simpson average of energy_pdf over [lo, hi].
double bin_density(double lo, double hi, double Pe, double kappa, double r, double e)
{
    constexpr int m = 32;
    const double h = (hi - lo) / m;
    double acc = 0;
    for (int i = 0; i <= m; ++i) {
        const double w = (i == 0 || i == m) ? 1 : (i % 2 ? 4 : 2);
        acc += w * energy_pdf(lo + i * h, Pe, kappa, r, e);
    }
    return acc * h / 3 / (hi - lo);
}

} // namespace

double energy_pdf(double e, double Pe, double kappa, double r_sigma, double e_eq)
{
    if (!(e >= 0) || std::isinf(kappa)) return 0.0;
    const double s = Pe * r_sigma / (2 * (kappa + 1));
    const double lambda = 2 * kappa * e_eq / r_sigma;
    const double x = e / s;
    const double z = std::sqrt(lambda * x);
    return 0.5 * std::exp(-(x + lambda) / 2 + z) * bessel_i0_scaled(z) / s;
}

PracticalBeam practical_beam(const ScenarioConfig& cfg, const RVec& los, const RVec& mus)
{
    PracticalBeam pb;
    const OptimResult om = om_solve(cfg.coupling, los, mus, optimizer_of(cfg));
    pb.kappa_boundary = kappa_boundary(los.size(), om.energy.r_sigma, om.energy.e_eq);
    switch (cfg.scheme) {
    case SchemeChoice::Auto: pb.scheme = select_scheme(cfg.kappa, pb.kappa_boundary); break;
    case SchemeChoice::DM: pb.scheme = Scheme::DM; break;
    case SchemeChoice::OM: pb.scheme = Scheme::OM; break;
    }
    pb.result = pb.scheme == Scheme::DM ? dm_solve(cfg.coupling, los, mus) : om;
    return pb;
}

const std::vector<std::string>& experiment_names()
{
    static const std::vector<std::string> names{"coupling-sweep", "tau-fit", "energy-dist", "energy-vs-distance",
                                                "beam-plan",      "heatmap", "vs-N",        "vs-K",
                                                "validate"};
    return names;
}

ExperimentOutput run_experiment(const std::string& command, const ScenarioConfig& cfg, const RunOptions& opts)
{
    using Fn = ExperimentOutput (*)(const ScenarioConfig&, const RunOptions&);
    static const std::map<std::string, Fn> table{
        {"coupling-sweep", coupling_sweep}, {"tau-fit", tau_fit_experiment}, {"energy-dist", energy_distribution},
        {"energy-vs-distance", energy_vs_distance}, {"beam-plan", beam_plan}, {"heatmap", heatmap},
        {"vs-N", versus_n}, {"vs-K", versus_k}, {"validate", validate_suite}};
    const auto it = table.find(command);
    if (it == table.end()) throw std::invalid_argument("unknown experiment '" + command + "'");
    cfg.validate();
    return it->second(cfg, opts);
}

ExperimentOutput coupling_sweep(const ScenarioConfig& cfg, const RunOptions& opts)
{
    ExperimentOutput out{"coupling-sweep", {}, json::object(), true};
    const int points = opts.quick ? 73 : 361;
    Table t({"beta_min", "theta_rad", "theta_deg", "beta"});
    for (double bmin : beta_min_sweep(cfg.coupling.beta_min)) {
        CouplingParams p = cfg.coupling;
        p.beta_min = bmin;
        for (int k = 0; k < points; ++k) {
            const double th = -pi + 2 * pi * k / (points - 1);
            t.add_row({bmin, th, th * rad2deg, amplitude_of_phase(th, p)});
        }
    }
    out.diagnostics["full_reflection_phase_rad"] = full_reflection_phase(cfg.coupling);
    out.tables.emplace_back("coupling_sweep.csv", std::move(t));
    return out;
}

ExperimentOutput tau_fit_experiment(const ScenarioConfig& cfg, const RunOptions& opts)
{
    ExperimentOutput out{"tau-fit", {}, json::object(), true};
    const std::vector<Eigen::Index> sides = opts.quick ? std::vector<Eigen::Index>{8, 10} : std::vector<Eigen::Index>{8, 10, 12, 14};
    AOConfig ao = optimizer_of(cfg);
    if (opts.quick) ao.restarts = std::min(ao.restarts, 1);

    Table points({"beta_min", "N", "e_eq", "r_sigma", "e_eq_over_n2", "kappa_boundary", "sweeps", "best_restart"});
    Table taus({"beta_min", "tau"});
    json diag = json::array();
    for (double bmin : beta_min_sweep(cfg.coupling.beta_min)) {
        CouplingParams p = cfg.coupling;
        p.beta_min = bmin;
        std::vector<std::pair<double, double>> fit;
        for (Eigen::Index side : sides) {
            const ArrayGeometry geom = square(cfg.geometry, side);
            const IncidentField inc = mrt_incidence(geom, cfg.angles, cfg.P);
            const RVec los = los_phases(geom, 0.0);
            const OptimResult r = om_solve(p, los, inc.mus, ao);
            const double n = static_cast<double>(geom.N());
            fit.emplace_back(n, r.energy.e_eq);
            points.add_row({bmin, static_cast<long long>(geom.N()), r.energy.e_eq, r.energy.r_sigma, r.energy.e_eq / (n * n),
                            kappa_boundary(geom.N(), r.energy.r_sigma, r.energy.e_eq),
                            static_cast<long long>(r.sweeps_used), static_cast<long long>(r.best_restart)});
        }
        const double tau = fit_tau(fit);
        taus.add_row({bmin, tau});
        diag.push_back({{"beta_min", bmin}, {"tau", tau}});
    }
    out.diagnostics["fits"] = diag;
    out.diagnostics["optimizer"] = {{"grid_points", ao.grid_points}, {"restarts", ao.restarts}, {"max_sweeps", ao.max_sweeps}};
    out.tables.emplace_back("tau_fit.csv", std::move(taus));
    out.tables.emplace_back("tau_fit_points.csv", std::move(points));
    return out;
}

ExperimentOutput energy_distribution(const ScenarioConfig& cfg, const RunOptions& opts)
{
    ExperimentOutput out{"energy-dist", {}, json::object(), true};
    const std::vector<Eigen::Index> sides = opts.quick ? std::vector<Eigen::Index>{10} : std::vector<Eigen::Index>{10, 16, 20};
    const std::size_t trials = opts.quick ? std::min<std::size_t>(cfg.trials, 2000) : cfg.trials;
    constexpr int bins = 50;

    Table summary({"N", "model", "scheme", "trials", "mean", "variance", "mean_theory", "variance_theory", "mean_rel_err",
                   "variance_rel_err", "q05", "q50", "q95"});
    Table hist({"N", "model", "bin_lo", "bin_hi", "density_mc", "density_theory"});
    json diag = json::array();
    for (Eigen::Index side : sides) {
        const ArrayGeometry geom = square(cfg.geometry, side);
        const IncidentField inc = mrt_incidence(geom, cfg.angles, cfg.P);
        for (const Beam& b : broadside_beams(cfg, geom, inc, 0.0)) {
            const LinkScenario sc = scaled_scenario(cfg, geom, inc, b, 0.0);
            std::vector<double> samples;
            const EnergyStats st = simulate_energy(sc, trials, cfg.seed, cfg.threads, &samples);
            const EqEnergy eq = e_eq(sc.thetas, sc.betas, sc.er_los, sc.mus);
            const double m_th = expected_energy(inc.Pe, cfg.kappa, eq.r_sigma, eq.e_eq);
            const double v_th = energy_variance(inc.Pe, cfg.kappa, eq.r_sigma, eq.e_eq);
            const std::string scheme = b.model == "ideal" ? "aligned" : to_string(b.scheme);
            summary.add_row({static_cast<long long>(geom.N()), b.model, scheme, static_cast<long long>(trials), st.mean,
                             st.variance, m_th, v_th, st.mean / m_th - 1, v_th > 0 ? st.variance / v_th - 1 : std::numeric_limits<double>::quiet_NaN(),
                             st.quantiles[0], st.quantiles[2], st.quantiles[4]});

            const double hi = m_th + 5 * std::sqrt(v_th);
            const double lo = std::max(0.0, m_th - 5 * std::sqrt(v_th));
            if (hi > lo) {
                std::vector<std::size_t> counts(bins, 0);
                const double w = (hi - lo) / bins;
                for (double e : samples) {
                    if (e < lo || e >= hi) continue;
                    counts[std::min<std::size_t>(bins - 1, static_cast<std::size_t>((e - lo) / w))]++;
                }
                for (int k = 0; k < bins; ++k) {
                    const double a = lo + k * w, z = a + w;
                    hist.add_row({static_cast<long long>(geom.N()), b.model, a, z,
                                  static_cast<double>(counts[k]) / (static_cast<double>(trials) * w),
                                  bin_density(a, z, inc.Pe, cfg.kappa, eq.r_sigma, eq.e_eq)});
                }
            }
            diag.push_back({{"N", geom.N()}, {"model", b.model}, {"scheme", scheme}, {"e_eq", eq.e_eq},
                            {"r_sigma", eq.r_sigma}, {"kappa_boundary", jnum(b.kappa_boundary)}});
        }
    }
    out.diagnostics["designs"] = diag;
    out.tables.emplace_back("energy_dist.csv", std::move(summary));
    out.tables.emplace_back("energy_dist_hist.csv", std::move(hist));
    return out;
}

ExperimentOutput energy_vs_distance(const ScenarioConfig& cfg, const RunOptions& opts)
{
    ExperimentOutput out{"energy-vs-distance", {}, json::object(), true};
    const std::size_t trials = opts.quick ? std::min<std::size_t>(cfg.trials, 2000) : cfg.trials;
    std::vector<double> distances;
    const double step = opts.quick ? 1.0 : 0.5;
    for (double d = step; d <= 10 + 1e-9; d += step) distances.push_back(d);

    const ArrayGeometry& geom = cfg.geometry;
    const IncidentField inc = mrt_incidence(geom, cfg.angles, cfg.P);
    Table t({"distance_m", "model", "mean_rf_w", "mean_rf_dbm", "mean_harvested_w", "active_fraction"});
    json diag = json::array();
    for (const Beam& b : broadside_beams(cfg, geom, inc, 0.0)) {
        const LinkScenario sc = scaled_scenario(cfg, geom, inc, b, 0.0);
        std::vector<double> e;
        const EnergyStats st = simulate_energy(sc, trials, cfg.seed, cfg.threads, &e);
        std::vector<double> h(e.size());
        for (double d : distances) {
            const double g = link_gain(d, cfg.budget);
            std::size_t active = 0;
            for (std::size_t i = 0; i < e.size(); ++i) {
                h[i] = harvest(g * e[i], cfg.eh);
                active += h[i] > 0;
            }
            const double rf = g * st.mean;
            t.add_row({d, b.model, rf, rf > 0 ? watts_to_dbm(rf) : -std::numeric_limits<double>::infinity(), mean_of(h),
                       static_cast<double>(active) / static_cast<double>(e.size())});
        }
        diag.push_back({{"model", b.model}, {"scaled_mean", st.mean}});
    }
    out.diagnostics["designs"] = diag;
    out.tables.emplace_back("energy_vs_distance.csv", std::move(t));
    return out;
}

ExperimentOutput beam_plan(const ScenarioConfig& cfg, const RunOptions&)
{
    ExperimentOutput out{"beam-plan", {}, json::object(), true};
    const RotationSchedule s = plan_rotation(cfg.effective_n_eff(), cfg.geometry.spacing_ratio, cfg.beam_slack);
    Table t({"direction_deg", "lower_edge_deg", "upper_edge_deg"});
    for (std::size_t v = 0; v < s.size(); ++v)
        t.add_row({s.directions[v] * rad2deg, s.edges[v].lower * rad2deg, s.edges[v].upper * rad2deg});
    out.diagnostics["directions"] = s.size();
    out.diagnostics["n_eff"] = s.n_eff;
    out.diagnostics["delta"] = s.delta;
    out.diagnostics["covers"] = covers(s.directions, s.n_eff, s.spacing_ratio, s.delta);
    out.tables.emplace_back("beam_plan.csv", std::move(t));
    return out;
}

ExperimentOutput heatmap(const ScenarioConfig& cfg, const RunOptions& opts)
{
    ExperimentOutput out{"heatmap", {}, json::object(), true};
    HeatmapSetup hs;
    hs.geometry = cfg.geometry;
    hs.angles = cfg.angles;
    hs.coupling = cfg.coupling;
    hs.P = cfg.P;
    hs.kappa = cfg.kappa;
    hs.budget = cfg.budget;
    hs.eh = cfg.eh;
    hs.beam_slack = cfg.beam_slack;
    hs.om = cfg.optimizer;
    hs.seed = cfg.seed;
    hs.threads = cfg.threads;
    HeatmapSpec spec;
    spec.trials = opts.quick ? std::min<std::size_t>(cfg.heatmap_trials, 200) : cfg.heatmap_trials;
    if (opts.quick) spec.angles = 31;
    if (cfg.n_eff > 0) spec.directions = plan_rotation(cfg.n_eff, cfg.geometry.spacing_ratio, cfg.beam_slack).directions;

    const Heatmap hm = heatmap_experiment(hs, spec);
    Table t({"angle_deg", "radius_m", "energy_w"});
    for (std::size_t a = 0; a < hm.angles.size(); ++a)
        for (std::size_t r = 0; r < hm.radii.size(); ++r)
            t.add_row({hm.angles[a] * rad2deg, hm.radii[r], hm.map.grid(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(r))});
    Eigen::Index ia = 0, ir = 0;
    const double peak = hm.map.grid.maxCoeff(&ia, &ir);
    std::vector<double> dirs_deg;
    for (double d : hm.directions) dirs_deg.push_back(d * rad2deg);
    out.diagnostics["directions_deg"] = dirs_deg;
    out.diagnostics["peak"] = {{"energy_w", peak}, {"angle_deg", hm.angles[ia] * rad2deg}, {"radius_m", hm.radii[ir]}};
    out.diagnostics["trials_per_cell"] = spec.trials;
    out.tables.emplace_back("heatmap.csv", std::move(t));
    return out;
}

ExperimentOutput versus_n(const ScenarioConfig& cfg, const RunOptions& opts)
{
    ExperimentOutput out{"vs-N", {}, json::object(), true};
    const std::vector<Eigen::Index> sides =
        opts.quick ? std::vector<Eigen::Index>{8, 12, 14} : std::vector<Eigen::Index>{6, 7, 8, 9, 10, 11, 12, 13, 14};
    const std::size_t trials = opts.quick ? std::min<std::size_t>(cfg.worst_case_trials, 2) : cfg.worst_case_trials;
    const std::size_t K = opts.quick ? std::min<std::size_t>(cfg.ers, 8) : cfg.ers;
    Table t = worst_case_table();
    json diag = json::array();
    for (Eigen::Index side : sides) {
        const WorstCaseSetup w = worst_case_setup(cfg, square(cfg.geometry, side), K, trials);
        diag.push_back(add_worst_case_row(t, w, worst_case_compare(w)));
    }
    out.diagnostics["points"] = diag;
    out.tables.emplace_back("vs_n.csv", std::move(t));
    return out;
}

ExperimentOutput versus_k(const ScenarioConfig& cfg, const RunOptions& opts)
{
    ExperimentOutput out{"vs-K", {}, json::object(), true};
    const std::vector<std::size_t> ks = opts.quick ? std::vector<std::size_t>{4, 16} : std::vector<std::size_t>{4, 8, 16, 32, 64};
    const std::size_t trials = opts.quick ? std::min<std::size_t>(cfg.worst_case_trials, 2) : cfg.worst_case_trials;
    Table t = worst_case_table();
    json diag = json::array();
    for (std::size_t K : ks) {
        const WorstCaseSetup w = worst_case_setup(cfg, cfg.geometry, K, trials);
        diag.push_back(add_worst_case_row(t, w, worst_case_compare(w)));
    }
    out.diagnostics["points"] = diag;
    out.tables.emplace_back("vs_k.csv", std::move(t));
    return out;
}

ExperimentOutput validate_suite(const ScenarioConfig& cfg, const RunOptions& opts)
{
    ExperimentOutput out{"validate", {}, json::object(), true};
    Table t({"check", "value", "threshold", "passed"});
    auto record = [&](const std::string& name, double value, double threshold, bool ok) {
        t.add_row({name, value, threshold, std::string(ok ? "true" : "false")});
        out.passed = out.passed && ok;
    };
    const std::uint64_t seed = cfg.seed;
    const std::size_t draws = opts.quick ? 2000 : 10000;

    // aligned ideal phases reach N^2
    {
        double worst = 0;
        for (Eigen::Index side : {2, 10, 20}) {
            const ArrayGeometry g = square(cfg.geometry, side);
            const IncidentField inc = mrt_incidence(g, cfg.angles, cfg.P);
            const RVec los = los_phases(g, 0.3);
            const RVec th = align_phases(los, inc.mus);
            const double n = static_cast<double>(g.N());
            worst = std::max(worst, std::abs(e_eq(th, RVec::Ones(g.N()), los, inc.mus).e_eq / (n * n) - 1));
        }
        record("ideal_optimum_rel_err", worst, 1e-9, worst <= 1e-9);
    }
    // coupling law endpoints
    {
        double worst = 0;
        for (std::uint64_t i = 0; i < 100; ++i) {
            Stream s(seed, Domain::generic, i);
            CouplingParams p{s.uniform(), s.uniform(-pi, pi), s.uniform(0.1, 4)};
            worst = std::max({worst, std::abs(amplitude_of_phase(p.eta + pi / 2, p) - 1),
                              std::abs(amplitude_of_phase(p.eta - pi / 2, p) - p.beta_min)});
        }
        record("coupling_endpoints_abs_err", worst, 0, worst == 0);
    }
    // equal incident amplitude for any precoder
    {
        const ChannelG G(cfg.geometry, cfg.angles);
        double worst = 0;
        for (std::uint64_t i = 0; i < 20; ++i) {
            Stream s(seed, Domain::precoder, i);
            CVec w(cfg.geometry.M);
            for (auto& x : w) x = s.complex_normal();
            const RVec a = (G.matrix() * w).cwiseAbs();
            worst = std::max(worst, (a.maxCoeff() - a.minCoeff()) / a.maxCoeff());
        }
        record("equal_incident_amplitude_rel_spread", worst, 1e-10, worst <= 1e-10);
    }
    // random phases give E_eq = N on average
    {
        const Eigen::Index n = 100;
        std::vector<double> e(draws);
        for (std::size_t d = 0; d < draws; ++d) {
            Stream s(seed, Domain::generic, 1000 + d);
            RVec th(n);
            for (auto& x : th) x = s.uniform(-pi, pi);
            e[d] = e_eq(th, RVec::Ones(n), RVec::Zero(n), RVec::Zero(n)).e_eq;
        }
        const EnergyStats st = summarize(e, seed);
        const double z = std::abs(st.mean - static_cast<double>(n)) / st.std_error_mean();
        record("random_phase_mean_z", z, 3, z <= 3);
    }
    // common phase offset leaves the optimum unchanged
    {
        const ArrayGeometry g = square(cfg.geometry, 4);
        const IncidentField inc = mrt_incidence(g, cfg.angles, cfg.P);
        const RVec los = los_phases(g, 0.2);
        AOConfig ao = optimizer_of(cfg);
        ao.restarts = 1;
        const double e0 = om_solve(cfg.coupling, los, inc.mus, ao).energy.e_eq;
        const RVec shifted = (inc.mus.array() + 1.234).matrix();
        const double e1 = om_solve(cfg.coupling, los, shifted, ao).energy.e_eq;
        const double rel = std::abs(e1 - e0) / e0;
        record("common_phase_invariance_rel", rel, 1e-9, rel <= 1e-9);
    }
    // MRT incident power dominance
    {
        const ChannelG G(cfg.geometry, cfg.angles);
        const double pe = incident_field(G, mrt(cfg.angles.z(cfg.geometry.spacing_ratio), cfg.geometry.M, 1.0)).Pe;
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < draws; ++i) {
            Stream s(seed, Domain::precoder, 100 + i);
            CVec w(cfg.geometry.M);
            for (auto& x : w) x = s.complex_normal();
            w /= w.norm();
            worst = std::max(worst, (G.matrix() * w).cwiseAbs2().mean() - pe);
        }
        record("mrt_dominance_excess", worst, 1e-9, worst <= 1e-9);
    }
    // rotation schedule
    {
        const RotationSchedule s = plan_rotation(cfg.effective_n_eff(), cfg.geometry.spacing_ratio, cfg.beam_slack);
        const bool ok = covers(s.directions, s.n_eff, s.spacing_ratio, s.delta);
        record("rotation_covers", ok ? 1 : 0, 1, ok);
    }
    // Monte Carlo mean against the closed form
    {
        const IncidentField inc = mrt_incidence(cfg.geometry, cfg.angles, cfg.P);
        const auto beams = broadside_beams(cfg, cfg.geometry, inc, 0.0);
        for (const Beam& b : beams) {
            const LinkScenario sc = scaled_scenario(cfg, cfg.geometry, inc, b, 0.0);
            const EnergyStats st = simulate_energy(sc, draws * 4, seed, cfg.threads);
            const EqEnergy eq = e_eq(sc.thetas, sc.betas, sc.er_los, sc.mus);
            const double m = expected_energy(inc.Pe, cfg.kappa, eq.r_sigma, eq.e_eq);
            const double se = st.std_error_mean();
            const double z = se > 0 ? std::abs(st.mean - m) / se : std::abs(st.mean - m);
            record("mc_mean_z_" + b.model, z, 3, z <= 3);
        }
    }
    // max-min baseline against exhaustive search
    {
        double worst = std::numeric_limits<double>::infinity();
        for (std::uint64_t i = 0; i < (opts.quick ? 2u : 5u); ++i) {
            ErSet ers;
            ers.channels.resize(4, 2);
            Stream s(seed, Domain::generic, 50000 + i);
            for (Eigen::Index j = 0; j < 4; ++j)
                for (Eigen::Index k = 0; k < 2; ++k) ers.channels(j, k) = s.complex_normal();
            AOConfig ao = cfg.baseline;
            ao.threads = cfg.threads;
            const double ratio = maxmin_solve(ers, ao).min_energy / brute_force_maxmin(ers, 16, cfg.threads).min_energy;
            worst = std::min(worst, ratio);
        }
        record("maxmin_vs_exhaustive_ratio", worst, 0.95, worst >= 0.95);
    }
    // optimiser trace is non-decreasing
    {
        const ArrayGeometry g = square(cfg.geometry, 5);
        const IncidentField inc = mrt_incidence(g, cfg.angles, cfg.P);
        const OptimResult r = om_solve(cfg.coupling, los_phases(g, 0.4), inc.mus, optimizer_of(cfg));
        double drop = 0;
        for (std::size_t i = 1; i < r.objective_trace.size(); ++i)
            drop = std::max(drop, r.objective_trace[i - 1] - r.objective_trace[i]);
        record("om_trace_max_drop", drop, 0, drop <= 0);
    }
    // thread count does not change samples
    {
        const IncidentField inc = mrt_incidence(cfg.geometry, cfg.angles, cfg.P);
        const Beam b = broadside_beams(cfg, cfg.geometry, inc, 0.0).front();
        const LinkScenario sc = scaled_scenario(cfg, cfg.geometry, inc, b, 0.0);
        std::vector<double> a, c;
        simulate_energy(sc, draws, seed, 1, &a);
        simulate_energy(sc, draws, seed, 3, &c);
        const bool same = a == c;
        record("thread_independent_samples", same ? 1 : 0, 1, same);
    }
    out.diagnostics["passed"] = out.passed;
    out.tables.emplace_back("validate.csv", std::move(t));
    return out;
}

std::string render_csv(const ExperimentOutput& out, const Table& table, const ScenarioConfig& cfg)
{
    return table.to_string(preamble(out.command, config_hash(cfg), cfg.seed));
}

std::string manifest_json(const ExperimentOutput& out, const ScenarioConfig& cfg)
{
    json m;
    m["schema_version"] = manifest_schema_version;
    m["command"] = out.command;
    m["config"] = json::parse(config_document(cfg));
    m["config_hash"] = config_hash(cfg);
    m["seed"] = cfg.seed;
    m["baseline_solver"] = baseline_solver_name;
    json files = json::array();
    for (const auto& [name, table] : out.tables) files.push_back({{"name", name}, {"columns", table.columns()}, {"rows", table.rows()}});
    m["files"] = files;
    m["diagnostics"] = out.diagnostics;
    m["passed"] = out.passed;
    return m.dump(2) + "\n";
}

std::vector<std::string> write_outputs(const ExperimentOutput& out, const ScenarioConfig& cfg)
{
    namespace fs = std::filesystem;
    const fs::path dir(cfg.output);
    fs::create_directories(dir);

    std::vector<std::pair<fs::path, std::string>> files;
    for (const auto& [name, table] : out.tables) files.emplace_back(dir / name, render_csv(out, table, cfg));
    std::string stem = out.command;
    std::replace(stem.begin(), stem.end(), '-', '_');
    files.emplace_back(dir / (stem + ".manifest.json"), manifest_json(out, cfg));

    std::vector<fs::path> staged;
    try {
        for (const auto& [path, text] : files) {
            const fs::path tmp = path.string() + ".tmp";
            std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
            if (!os) throw std::runtime_error("cannot open " + tmp.string());
            staged.push_back(tmp);
            os << text;
            os.close();
            if (!os) throw std::runtime_error("write failed: " + tmp.string());
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& tmp : staged) fs::remove(tmp, ec);
        throw;
    }
    std::vector<std::string> written;
    for (std::size_t i = 0; i < files.size(); ++i) {
        fs::rename(staged[i], files[i].first);
        written.push_back(files[i].first.string());
    }
    return written;
}

} // namespace irswet
