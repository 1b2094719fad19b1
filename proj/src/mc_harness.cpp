#include "irswet/mc_harness.hpp"

#include "irswet/parallel.hpp"
#include "irswet/precoding.hpp"
#include "irswet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace irswet {

void LinkBudget::validate() const
{
    if (!(exp_pb_irs >= 2) || !(exp_irs_er >= 2)) throw std::invalid_argument("LinkBudget: path-loss exponents must be >= 2");
    if (!(pb_irs_distance_m > 0) || !(charge_radius_m > 0)) throw std::invalid_argument("LinkBudget: distances must be positive");
    if (!std::isfinite(ref_loss_db) || !std::isfinite(pb_gain_dbi) || !std::isfinite(element_gain_dbi))
        throw std::invalid_argument("LinkBudget: losses and gains must be finite");
}

void EhModel::validate() const
{
    if (!(conversion > 0 && conversion <= 1)) throw std::invalid_argument("EhModel: conversion must lie in (0, 1]");
    if (!(sensitivity_dbm < saturation_dbm)) throw std::invalid_argument("EhModel: sensitivity must be below saturation");
}

void OverheadModel::validate() const
{
    if (coherence < 1) throw std::invalid_argument("OverheadModel: coherence block must be positive");
}

double OverheadModel::transfer_fraction(Eigen::Index N) const
{
    const int tp = pilot(N);
    if (tp >= coherence) return 0.0;
    return static_cast<double>(coherence - tp) / coherence;
}

double EnergyStats::std_error_mean() const
{
    return trials > 0 ? std::sqrt(variance / static_cast<double>(trials)) : std::numeric_limits<double>::infinity();
}

double path_loss_linear(double distance_m, double exponent, const LinkBudget& budget)
{
    if (budget.blocked) return 0.0;
    if (!(distance_m > 0)) throw std::invalid_argument("path_loss_linear: distance must be positive");
    const double d = std::max(distance_m, 1.0);
    return std::pow(10.0, -(budget.ref_loss_db + 10 * exponent * std::log10(d)) / 10);
}

double link_gain(double distance_m, const LinkBudget& budget)
{
    return db_to_linear(budget.pb_gain_dbi) * db_to_linear(budget.element_gain_dbi) *
           path_loss_linear(budget.pb_irs_distance_m, budget.exp_pb_irs, budget) *
           path_loss_linear(distance_m, budget.exp_irs_er, budget);
}

double harvest(double p_in_w, const EhModel& model)
{
    if (p_in_w < 0 || std::isnan(p_in_w)) throw std::invalid_argument("harvest: input power must be non-negative");
    const double sens = dbm_to_watts(model.sensitivity_dbm);
    const double sat = dbm_to_watts(model.saturation_dbm);
    if (p_in_w < sens) return 0.0;
    return model.conversion * std::min(p_in_w, sat);
}

CVec LinkScenario::weights() const
{
    const Eigen::Index n = thetas.size();
    if (betas.size() != n || mus.size() != n || er_los.size() != n)
        throw std::invalid_argument("LinkScenario: vector lengths differ");
    CVec w(n);
    const double a = std::sqrt(Pe);
    for (Eigen::Index i = 0; i < n; ++i) w[i] = std::polar(a * betas[i], thetas[i] + mus[i]);
    return w;
}

EnergyStats summarize(const std::vector<double>& values, std::uint64_t seed, const std::vector<double>& levels)
{
    EnergyStats st;
    st.trials = values.size();
    st.seed = seed;
    if (values.empty()) return st;
    const double n = static_cast<double>(values.size());
    st.mean = pairwise_sum(values.begin(), values.end()) / n;
    std::vector<double> dev(values.size());
    std::transform(values.begin(), values.end(), dev.begin(), [&](double x) { return (x - st.mean) * (x - st.mean); });
    st.variance = values.size() > 1 ? pairwise_sum(dev.begin(), dev.end()) / (n - 1) : 0.0;
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    for (double q : levels) {
        const double pos = q * (n - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, sorted.size() - 1);
        st.quantile_levels.push_back(q);
        st.quantiles.push_back(sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]));
    }
    return st;
}

EnergyStats simulate_energy(const LinkScenario& sc, std::size_t trials, std::uint64_t seed, unsigned threads,
                            std::vector<double>* samples)
{
    if (trials < 1) throw std::invalid_argument("simulate_energy: trials must be >= 1");
    if (!(sc.kappa >= 0)) throw std::invalid_argument("simulate_energy: kappa must be non-negative");
    if (sc.physical) {
        sc.budget.validate();
        sc.eh.validate();
    }
    const CVec w = sc.weights();
    const auto [a_los, a_nlos] = rician_amplitudes(sc.kappa);
    const double scale = sc.physical ? link_gain(sc.distance_m, sc.budget) : 1.0;

    std::vector<double> values(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        const Stream trial(seed, Domain::channel, t);
        cplx x{0, 0};
        for (Eigen::Index i = 0; i < w.size(); ++i)
            x += w[i] * rician_entry(a_los, a_nlos, sc.er_los[i], trial.child(static_cast<std::uint64_t>(i)));
        const double e = std::norm(x);
        values[t] = sc.physical ? harvest(scale * e, sc.eh) : e;
    });
    EnergyStats st = summarize(values, seed);
    if (samples) *samples = std::move(values);
    return st;
}

std::vector<std::pair<double, double>> place_ers(std::size_t K, double radius_m, std::uint64_t seed)
{
    std::vector<std::pair<double, double>> pos(K);
    for (std::size_t k = 0; k < K; ++k) {
        Stream s(seed, Domain::placement, k);
        const double angle = s.uniform(-pi / 2, pi / 2);
        const double r = radius_m * std::sqrt(s.uniform());
        pos[k] = {angle, r};
    }
    return pos;
}

IncidentField mrt_incidence(const ArrayGeometry& geom, const AngleSet& angles, double P)
{
    const ChannelG G(geom, angles);
    return incident_field(G, mrt(angles.z(geom.spacing_ratio), geom.M, P));
}

AOConfig worst_case_baseline_config()
{
    AOConfig cfg = baseline_config();
    cfg.grid_points = 90;
    cfg.sweep_tol = 1e-6;
    cfg.max_sweeps = 50;
    return cfg;
}

double WorstCaseResult::gap_db() const
{
    if (csi_based <= 0) return std::numeric_limits<double>::infinity();
    if (csi_free <= 0) return -std::numeric_limits<double>::infinity();
    return linear_to_db(csi_free / csi_based);
}

namespace {

struct BeamSet {
    std::vector<CVec> practical; // per direction: sqrt(Pe) b e^{i(theta + mu)}
    std::vector<CVec> ideal;
    std::vector<double> directions;
};

CVec beam_weights(const RVec& thetas, const RVec& betas, const RVec& mus, double Pe)
{
    CVec w(thetas.size());
    const double a = std::sqrt(Pe);
    for (Eigen::Index i = 0; i < thetas.size(); ++i) w[i] = std::polar(a * betas[i], thetas[i] + mus[i]);
    return w;
}

BeamSet rotation_beams(const ArrayGeometry& geom, const CouplingParams& coupling, const IncidentField& inc,
                       const std::vector<double>& directions, const AOConfig& om, bool want_practical)
{
    BeamSet b;
    b.directions = directions;
    for (double d : directions) {
        const RVec los = los_phases(geom, d);
        const RVec ideal = align_phases(los, inc.mus);
        b.ideal.push_back(beam_weights(ideal, RVec::Ones(geom.N()), inc.mus, inc.Pe));
        if (want_practical) {
            const OptimResult r = om_solve(coupling, los, inc.mus, om);
            b.practical.push_back(beam_weights(r.thetas, r.betas, inc.mus, inc.Pe));
        }
    }
    return b;
}

double mean_of(const std::vector<double>& v) { return pairwise_sum(v.begin(), v.end()) / static_cast<double>(v.size()); }

} // namespace

WorstCaseResult worst_case_compare(const WorstCaseSetup& s)
{
    s.geometry.validate();
    s.coupling.validate();
    s.budget.validate();
    s.eh.validate();
    s.overhead.validate();
    if (s.K < 1 || s.trials < 1) throw std::invalid_argument("worst_case_compare: K and trials must be >= 1");

    const Eigen::Index n = s.geometry.N();
    const IncidentField inc = mrt_incidence(s.geometry, s.angles, s.P);
    const RotationSchedule sched = plan_rotation(static_cast<double>(s.geometry.Ny), s.geometry.spacing_ratio, s.beam_slack);
    AOConfig om = s.om;
    om.threads = s.threads;
    const BeamSet beams = rotation_beams(s.geometry, s.coupling, inc, sched.directions, om, true);

    WorstCaseResult res;
    res.positions = place_ers(s.K, s.budget.charge_radius_m, s.seed);
    res.transfer_fraction = s.overhead.transfer_fraction(n);
    res.directions = sched.size();

    const std::size_t K = s.K, V = sched.size();
    std::vector<RVec> er_los(K);
    std::vector<double> gains(K);
    for (std::size_t k = 0; k < K; ++k) {
        er_los[k] = los_phases(s.geometry, res.positions[k].first);
        gains[k] = link_gain(res.positions[k].second, s.budget);
    }
    const auto [a_los, a_nlos] = rician_amplitudes(s.kappa);

    // trial-major storage: [t * K + k]
    std::vector<double> free_p(s.trials * K), free_i(s.trials * K), based(s.trials * K, 0.0);
    parallel_for(s.trials, s.threads, [&](std::size_t t) {
        const Stream trial(s.seed, Domain::channel, t);
        ErSet ers;
        ers.channels.resize(n, static_cast<Eigen::Index>(K));
        CVec h(n);
        for (std::size_t k = 0; k < K; ++k) {
            const Stream er = trial.child(k);
            for (Eigen::Index j = 0; j < n; ++j)
                h[j] = rician_entry(a_los, a_nlos, er_los[k][j], er.child(static_cast<std::uint64_t>(j)));
            double acc_p = 0, acc_i = 0;
            for (std::size_t v = 0; v < V; ++v) {
                acc_p += harvest(gains[k] * std::norm((beams.practical[v].array() * h.array()).sum()), s.eh);
                acc_i += harvest(gains[k] * std::norm((beams.ideal[v].array() * h.array()).sum()), s.eh);
            }
            free_p[t * K + k] = acc_p / static_cast<double>(V);
            free_i[t * K + k] = acc_i / static_cast<double>(V);
            const double a = std::sqrt(gains[k] * inc.Pe);
            for (Eigen::Index j = 0; j < n; ++j) ers.channels(j, static_cast<Eigen::Index>(k)) = a * std::polar(1.0, inc.mus[j]) * h[j];
        }
        if (res.transfer_fraction > 0) {
            AOConfig cfg = s.baseline;
            cfg.threads = 1;
            cfg.seed = mix64(s.baseline.seed ^ mix64(t));
            const MaxMinResult mm = maxmin_solve(ers, cfg);
            for (std::size_t k = 0; k < K; ++k)
                based[t * K + k] = res.transfer_fraction * harvest(mm.per_er[static_cast<Eigen::Index>(k)], s.eh);
        }
    });

    auto per_er_mean = [&](const std::vector<double>& all) {
        RVec m(static_cast<Eigen::Index>(K));
        std::vector<double> col(s.trials);
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t t = 0; t < s.trials; ++t) col[t] = all[t * K + k];
            m[static_cast<Eigen::Index>(k)] = mean_of(col);
        }
        return m;
    };
    res.per_er_free = per_er_mean(free_p);
    res.per_er_free_ideal = per_er_mean(free_i);
    res.per_er_based = per_er_mean(based);
    res.csi_free = res.per_er_free.minCoeff();
    res.csi_free_ideal = res.per_er_free_ideal.minCoeff();
    res.csi_based = res.per_er_based.minCoeff();
    return res;
}

Heatmap heatmap_experiment(const HeatmapSetup& s, const HeatmapSpec& spec)
{
    s.geometry.validate();
    s.budget.validate();
    s.eh.validate();
    if (spec.angles < 2) throw std::invalid_argument("heatmap_experiment: need at least two angle samples");

    Heatmap hm;
    for (int a = 0; a < spec.angles; ++a) hm.angles.push_back(-pi / 2 + pi * a / (spec.angles - 1));
    hm.radii = spec.radii;
    if (hm.radii.empty())
        for (double r = 0.5; r <= s.budget.charge_radius_m + 1e-9; r += 0.5) hm.radii.push_back(r);

    RotationSchedule sched;
    if (spec.directions) {
        sched.directions = *spec.directions;
    } else {
        sched = plan_rotation(static_cast<double>(s.geometry.Ny), s.geometry.spacing_ratio, s.beam_slack);
    }
    hm.directions = sched.directions;

    const IncidentField inc = mrt_incidence(s.geometry, s.angles, s.P);
    AOConfig om = s.om;
    om.threads = s.threads;
    const BeamSet beams = rotation_beams(s.geometry, s.coupling, inc, sched.directions, om, s.practical);
    const auto& weights = s.practical ? beams.practical : beams.ideal;
    const auto [a_los, a_nlos] = rician_amplitudes(s.kappa);
    const Eigen::Index rows = static_cast<Eigen::Index>(hm.angles.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(hm.radii.size());

    std::vector<double> gains;
    for (double r : hm.radii) gains.push_back(link_gain(r, s.budget));

    hm.map = coverage_map(sched, [&](std::size_t v, double) {
        Eigen::MatrixXd grid(rows, cols);
        const CVec& w = weights[v];
        parallel_for(static_cast<std::size_t>(rows), s.threads, [&](std::size_t a) {
            const RVec los = los_phases(s.geometry, hm.angles[a]);
            if (!spec.harvested) {
                cplx m{0, 0};
                for (Eigen::Index j = 0; j < w.size(); ++j) m += w[j] * std::polar(1.0, los[j]);
                // closed-form mean of |w^T h|^2
                const double mean = a_los * a_los * std::norm(m) + a_nlos * a_nlos * w.squaredNorm();
                for (Eigen::Index c = 0; c < cols; ++c) grid(static_cast<Eigen::Index>(a), c) = gains[c] * mean;
                return;
            }
            std::vector<double> e(spec.trials);
            const Stream cell = Stream(s.seed, Domain::channel, a).child(v);
            for (std::size_t t = 0; t < spec.trials; ++t) {
                const Stream trial = cell.child(t);
                cplx x{0, 0};
                for (Eigen::Index j = 0; j < w.size(); ++j)
                    x += w[j] * rician_entry(a_los, a_nlos, los[j], trial.child(static_cast<std::uint64_t>(j)));
                e[t] = std::norm(x);
            }
            std::vector<double> hv(spec.trials);
            for (Eigen::Index c = 0; c < cols; ++c) {
                for (std::size_t t = 0; t < spec.trials; ++t) hv[t] = harvest(gains[c] * e[t], s.eh);
                grid(static_cast<Eigen::Index>(a), c) = mean_of(hv);
            }
        });
        return grid;
    });
    return hm;
}

} // namespace irswet
