#include "irswet/csi_baseline.hpp"

#include "irswet/parallel.hpp"
#include "irswet/rng.hpp"
#include "irswet/search1d.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace irswet {

namespace {

void check_ers(const ErSet& ers)
{
    if (ers.K() < 1) throw std::invalid_argument("maxmin: at least one ER is required");
    if (ers.N() < 1) throw std::invalid_argument("maxmin: channels must have at least one element");
}

struct Outcome {
    RVec thetas;
    double value = 0;
    int sweeps = 0;
    std::vector<double> trace;
};

Outcome ascend(const ErSet& ers, RVec thetas, const AOConfig& cfg, const std::vector<cplx>& rotors)
{
    const Eigen::Index n = ers.N(), k_count = ers.K();
    const CMat& c = ers.channels;
    auto min_energy = [&](const RVec& th) { return per_er_energy(ers, th).minCoeff(); };

    Outcome out;
    double current = min_energy(thetas);
    out.trace.push_back(current);
    CVec sums(k_count), rest(k_count);
    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
        const RVec before = thetas;
        for (Eigen::Index k = 0; k < k_count; ++k) {
            cplx s{0, 0};
            for (Eigen::Index j = 0; j < n; ++j) s += c(j, k) * std::polar(1.0, thetas[j]);
            sums[k] = s;
        }
        for (Eigen::Index t = 0; t < n; ++t) {
            const cplx old = std::polar(1.0, thetas[t]);
            for (Eigen::Index k = 0; k < k_count; ++k) rest[k] = sums[k] - c(t, k) * old;
            auto f = [&](double th) {
                const cplx r = std::polar(1.0, th);
                double m = std::numeric_limits<double>::infinity();
                for (Eigen::Index k = 0; k < k_count; ++k) m = std::min(m, std::norm(rest[k] + c(t, k) * r));
                return m;
            };
            auto grid_value = [&](int g) {
                double m = std::numeric_limits<double>::infinity();
                for (Eigen::Index k = 0; k < k_count; ++k) m = std::min(m, std::norm(rest[k] + c(t, k) * rotors[g]));
                return m;
            };
            const Maximum best = grid_refine_max(grid_value, f, cfg.grid_points, cfg.refine_tol);
            if (best.value > f(thetas[t])) {
                thetas[t] = wrap_phase(best.x);
                const cplx now = std::polar(1.0, thetas[t]);
                for (Eigen::Index k = 0; k < k_count; ++k) sums[k] = rest[k] + c(t, k) * now;
            }
        }
        double value = min_energy(thetas);
        out.sweeps = sweep + 1;
        if (value < current) {
            thetas = before;
            value = current;
        }
        out.trace.push_back(value);
        const double gain = current > 0 ? (value - current) / current : value;
        current = value;
        if (gain < cfg.sweep_tol) break;
    }
    out.thetas = std::move(thetas);
    out.value = current;
    return out;
}

// Coordinate ascent on the soft-min -(1/t) log sum_k exp(-t E_k / scale),
// with t multiplied by cfg.smooth_growth after each stage. scale is the mean
// energy at the start of each sweep.
RVec smooth(const ErSet& ers, RVec thetas, const AOConfig& cfg, const std::vector<cplx>& rotors)
{
    const Eigen::Index n = ers.N(), k_count = ers.K();
    const CMat& c = ers.channels;
    CVec sums(k_count), rest(k_count);
    std::vector<double> e(k_count);
    double t = 1;
    for (int stage = 0; stage < cfg.smooth_stages; ++stage, t *= cfg.smooth_growth) {
        for (int sweep = 0; sweep < cfg.smooth_sweeps; ++sweep) {
            for (Eigen::Index k = 0; k < k_count; ++k) {
                cplx s{0, 0};
                for (Eigen::Index j = 0; j < n; ++j) s += c(j, k) * std::polar(1.0, thetas[j]);
                sums[k] = s;
            }
            const double scale = sums.cwiseAbs2().mean();
            if (!(scale > 0)) return thetas;
            for (Eigen::Index j = 0; j < n; ++j) {
                const cplx old = std::polar(1.0, thetas[j]);
                for (Eigen::Index k = 0; k < k_count; ++k) rest[k] = sums[k] - c(j, k) * old;
                auto soft_min = [&](cplx r) {
                    double m = std::numeric_limits<double>::infinity();
                    for (Eigen::Index k = 0; k < k_count; ++k) {
                        e[k] = std::norm(rest[k] + c(j, k) * r) / scale;
                        m = std::min(m, e[k]);
                    }
                    double acc = 0;
                    for (Eigen::Index k = 0; k < k_count; ++k) acc += std::exp(-t * (e[k] - m));
                    return m - std::log(acc) / t;
                };
                auto f = [&](double th) { return soft_min(std::polar(1.0, th)); };
                auto grid_value = [&](int g) { return soft_min(rotors[g]); };
                const Maximum best = grid_refine_max(grid_value, f, cfg.grid_points, cfg.refine_tol);
                if (best.value > f(thetas[j])) {
                    thetas[j] = wrap_phase(best.x);
                    const cplx now = std::polar(1.0, thetas[j]);
                    for (Eigen::Index k = 0; k < k_count; ++k) sums[k] = rest[k] + c(j, k) * now;
                }
            }
        }
    }
    return thetas;
}

} // namespace

AOConfig baseline_config()
{
    AOConfig cfg;
    cfg.restarts = 8;
    cfg.warm_start = false;
    cfg.smooth_stages = 10;
    return cfg;
}

RVec per_er_energy(const ErSet& ers, const RVec& thetas)
{
    if (thetas.size() != ers.N()) throw std::invalid_argument("per_er_energy: thetas length must equal N");
    CVec phasor(thetas.size());
    for (Eigen::Index j = 0; j < thetas.size(); ++j) phasor[j] = std::polar(1.0, thetas[j]);
    return (ers.channels.transpose() * phasor).cwiseAbs2();
}

MaxMinResult maxmin_solve(const ErSet& ers, const AOConfig& cfg)
{
    check_ers(ers);
    cfg.validate();
    const Eigen::Index n = ers.N();
    std::vector<cplx> rotors(cfg.grid_points);
    for (int g = 0; g < cfg.grid_points; ++g) rotors[g] = std::polar(1.0, grid_angle(g, cfg.grid_points));

    const int warm = cfg.warm_start ? 1 : 0;
    const int total = cfg.restarts + warm;
    std::vector<Outcome> outcomes(total);
    parallel_for(static_cast<std::size_t>(total), cfg.threads, [&](std::size_t r) {
        RVec init(n);
        if (static_cast<int>(r) < warm) {
            // align with the sum of unit-normalised receiver channels
            for (Eigen::Index j = 0; j < n; ++j) {
                cplx s{0, 0};
                for (Eigen::Index k = 0; k < ers.K(); ++k) {
                    const double a = ers.channels.col(k).norm();
                    if (a > 0) s += ers.channels(j, k) / a;
                }
                init[j] = wrap_phase(-std::arg(s));
            }
        } else {
            Stream s(cfg.seed, Domain::restart, r);
            for (Eigen::Index j = 0; j < n; ++j) init[j] = s.uniform(-pi, pi);
        }
        outcomes[r] = ascend(ers, smooth(ers, std::move(init), cfg, rotors), cfg, rotors);
    });

    int best = 0;
    for (int r = 1; r < total; ++r)
        if (outcomes[r].value > outcomes[best].value) best = r;

    MaxMinResult res;
    res.thetas = outcomes[best].thetas;
    res.per_er = per_er_energy(ers, res.thetas);
    res.min_energy = res.per_er.minCoeff();
    res.sweeps = outcomes[best].sweeps;
    res.best_restart = best;
    res.objective_trace = std::move(outcomes[best].trace);
    return res;
}

MaxMinResult brute_force_maxmin(const ErSet& ers, int levels, unsigned threads)
{
    check_ers(ers);
    if (levels < 1) throw std::invalid_argument("brute_force_maxmin: levels must be positive");
    const Eigen::Index n = ers.N(), k_count = ers.K();
    const double space = std::pow(static_cast<double>(levels), static_cast<double>(n));
    if (space > 1e8)
        throw std::length_error("brute_force_maxmin: search space of " + std::to_string(space) +
                                " lattice points exceeds the 1e8 limit");

    std::vector<cplx> rotors(levels);
    for (int l = 0; l < levels; ++l) rotors[l] = std::polar(1.0, 2 * pi * l / levels);

    // A common rotation by one lattice step leaves every energy unchanged, so
    // element 0 is pinned to level 0 and the search runs over the rest.
    struct Best {
        double value = -1;
        std::vector<int> digits;
    };
    const std::size_t branches = n > 1 ? static_cast<std::size_t>(levels) : 1;
    std::vector<Best> best(branches);

    parallel_for(branches, threads, [&](std::size_t b) {
        std::vector<int> digits(n, 0);
        if (n > 1) digits[1] = static_cast<int>(b);
        // partial[d] holds sum over elements < d
        std::vector<CVec> partial(n + 1, CVec::Zero(k_count));
        auto extend = [&](Eigen::Index d) {
            partial[d + 1] = partial[d] + ers.channels.row(d).transpose() * rotors[digits[d]];
        };
        const Eigen::Index fixed = std::min<Eigen::Index>(n, 2);
        for (Eigen::Index d = 0; d < fixed; ++d) extend(d);
        Best& mine = best[b];
        if (fixed == n) {
            mine.value = partial[n].cwiseAbs2().minCoeff();
            mine.digits = digits;
            return;
        }
        for (Eigen::Index d = fixed; d < n; ++d) extend(d);
        while (true) {
            const double v = partial[n].cwiseAbs2().minCoeff();
            if (v > mine.value) {
                mine.value = v;
                mine.digits = digits;
            }
            Eigen::Index d = n - 1;
            while (d >= fixed && digits[d] == levels - 1) {
                digits[d] = 0;
                --d;
            }
            if (d < fixed) break;
            ++digits[d];
            for (Eigen::Index e = d; e < n; ++e) extend(e);
        }
    });

    std::size_t arg = 0;
    for (std::size_t b = 1; b < branches; ++b)
        if (best[b].value > best[arg].value) arg = b;

    MaxMinResult res;
    res.thetas.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) res.thetas[j] = wrap_phase(2 * pi * best[arg].digits[j] / levels);
    res.per_er = per_er_energy(ers, res.thetas);
    res.min_energy = res.per_er.minCoeff();
    return res;
}

} // namespace irswet
