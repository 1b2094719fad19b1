#include "irswet/phase_optimizer.hpp"

#include "irswet/parallel.hpp"
#include "irswet/rng.hpp"
#include "irswet/search1d.hpp"

#include <limits>
#include <stdexcept>

namespace irswet {

namespace {

void check_lengths(Eigen::Index n, const RVec& a, const char* what)
{
    if (a.size() != n) throw std::invalid_argument(std::string("e_eq: length mismatch in ") + what);
}

struct RestartOutcome {
    RVec thetas;
    double value = 0;
    int sweeps = 0;
    std::vector<double> trace;
};

class OmProblem {
public:
    OmProblem(const CouplingParams& p, const RVec& los, const RVec& mus, const AOConfig& cfg)
        : p_(p), cfg_(cfg), offsets_(los + mus), table_(cfg.grid_points)
    {
        for (int k = 0; k < cfg.grid_points; ++k) {
            const double t = grid_angle(k, cfg.grid_points);
            table_[k] = std::polar(amplitude_of_phase(t, p), t);
        }
    }

    cplx term(Eigen::Index i, double theta) const
    {
        return std::polar(amplitude_of_phase(theta, p_), theta + offsets_[i]);
    }

    double total(const RVec& thetas) const
    {
        cplx s{0, 0};
        for (Eigen::Index i = 0; i < thetas.size(); ++i) s += term(i, thetas[i]);
        return std::norm(s);
    }

    RestartOutcome run(RVec thetas) const
    {
        const Eigen::Index n = thetas.size();
        RestartOutcome out;
        double current = total(thetas);
        out.trace.push_back(current);
        std::vector<cplx> terms(n);
        for (int sweep = 0; sweep < cfg_.max_sweeps; ++sweep) {
            const RVec before = thetas;
            for (Eigen::Index i = 0; i < n; ++i) terms[i] = term(i, thetas[i]);
            for (Eigen::Index t = 0; t < n; ++t) {
                cplx rest{0, 0};
                for (Eigen::Index j = 0; j < n; ++j)
                    if (j != t) rest += terms[j];
                const cplx rot = std::polar(1.0, offsets_[t]);
                const double base = std::norm(rest);
                const cplx crest = std::conj(rest) * rot;
                auto grid_value = [&](int k) {
                    return base + std::norm(table_[k]) + 2 * (crest * table_[k]).real();
                };
                auto f = [&](double th) { return std::norm(rest + term(t, th)); };
                const Maximum m = grid_refine_max(grid_value, f, cfg_.grid_points, cfg_.refine_tol);
                const double now = f(thetas[t]);
                if (m.value > now) {
                    thetas[t] = wrap_phase(m.x);
                    terms[t] = term(t, thetas[t]);
                }
            }
            double value = total(thetas);
            out.sweeps = sweep + 1;
            if (value < current) {
                // rounding only; keep the previous iterate
                thetas = before;
                value = current;
            }
            out.trace.push_back(value);
            const double gain = current > 0 ? (value - current) / current : value;
            current = value;
            if (gain < cfg_.sweep_tol) break;
        }
        out.thetas = std::move(thetas);
        out.value = current;
        return out;
    }

private:
    CouplingParams p_;
    AOConfig cfg_;
    RVec offsets_;
    std::vector<cplx> table_;
};

} // namespace

void AOConfig::validate() const
{
    if (grid_points < 8) throw std::invalid_argument("AOConfig: grid_points must be >= 8");
    if (!(refine_tol > 0) || !(sweep_tol > 0)) throw std::invalid_argument("AOConfig: tolerances must be positive");
    if (max_sweeps < 1) throw std::invalid_argument("AOConfig: max_sweeps must be >= 1");
    if (restarts < 0 || (restarts == 0 && !warm_start))
        throw std::invalid_argument("AOConfig: at least one restart is required");
    if (smooth_stages < 0 || smooth_sweeps < 1 || !(smooth_growth > 1))
        throw std::invalid_argument("AOConfig: smoothing needs stages >= 0, sweeps >= 1, growth > 1");
}

const char* to_string(Scheme s) { return s == Scheme::DM ? "DM" : "OM"; }

EqEnergy e_eq(const RVec& thetas, const RVec& betas, const RVec& los, const RVec& mus)
{
    const Eigen::Index n = thetas.size();
    check_lengths(n, betas, "betas");
    check_lengths(n, los, "los phases");
    check_lengths(n, mus, "incident phases");
    EqEnergy e;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double psi = los[i] + thetas[i] + mus[i];
        e.u += betas[i] * std::cos(psi);
        e.v += betas[i] * std::sin(psi);
    }
    e.e_eq = e.u * e.u + e.v * e.v;
    e.r_sigma = betas.squaredNorm();
    return e;
}

double e_eq_pairwise(const RVec& thetas, const RVec& betas, const RVec& los, const RVec& mus)
{
    const Eigen::Index n = thetas.size();
    check_lengths(n, betas, "betas");
    check_lengths(n, los, "los phases");
    check_lengths(n, mus, "incident phases");
    const RVec psi = los + thetas + mus;
    double cross = 0;
    for (Eigen::Index t = 0; t + 1 < n; ++t)
        for (Eigen::Index l = t + 1; l < n; ++l) cross += betas[t] * betas[l] * std::cos(psi[t] - psi[l]);
    return betas.squaredNorm() + 2 * cross;
}

RVec align_phases(const RVec& los, const RVec& mus) { return wrap_phases(-(los + mus)); }

OptimResult dm_solve(const CouplingParams& params, Eigen::Index N)
{
    params.validate();
    if (N < 1) throw std::invalid_argument("dm_solve: N must be positive");
    OptimResult r;
    r.thetas = RVec::Constant(N, wrap_phase(full_reflection_phase(params)));
    r.betas = RVec::Ones(N);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.energy = {nan, nan, nan, static_cast<double>(N)};
    return r;
}

OptimResult dm_solve(const CouplingParams& params, const RVec& los, const RVec& mus)
{
    OptimResult r = dm_solve(params, los.size());
    r.energy = e_eq(r.thetas, r.betas, los, mus);
    r.objective_trace = {r.energy.e_eq};
    return r;
}

OptimResult om_solve(const CouplingParams& params, const RVec& los, const RVec& mus, const AOConfig& cfg)
{
    params.validate();
    cfg.validate();
    const Eigen::Index n = los.size();
    if (n < 1 || mus.size() != n) throw std::invalid_argument("om_solve: los and mus must have equal, positive length");

    const OmProblem problem(params, los, mus, cfg);
    const int warm = cfg.warm_start ? 1 : 0;
    const int total = cfg.restarts + warm;
    std::vector<RestartOutcome> outcomes(total);
    parallel_for(static_cast<std::size_t>(total), cfg.threads, [&](std::size_t r) {
        RVec init(n);
        if (static_cast<int>(r) < warm) {
            init = align_phases(los, mus);
        } else {
            Stream s(cfg.seed, Domain::restart, r);
            for (Eigen::Index i = 0; i < n; ++i) init[i] = s.uniform(-pi, pi);
        }
        outcomes[r] = problem.run(std::move(init));
    });

    int best = 0;
    for (int r = 1; r < total; ++r)
        if (outcomes[r].value > outcomes[best].value) best = r;

    OptimResult res;
    res.thetas = outcomes[best].thetas;
    res.betas = amplitudes(res.thetas, params);
    res.energy = e_eq(res.thetas, res.betas, los, mus);
    res.sweeps_used = outcomes[best].sweeps;
    res.best_restart = best;
    res.objective_trace = std::move(outcomes[best].trace);
    return res;
}

double kappa_boundary(Eigen::Index N, double r_sigma_om, double e_eq_om, double e_eq_dm)
{
    const double n = static_cast<double>(N);
    if (e_eq_dm < 0) e_eq_dm = n;
    if (!(e_eq_om > e_eq_dm)) return std::numeric_limits<double>::infinity();
    return (n - r_sigma_om) / (e_eq_om - e_eq_dm);
}

Scheme select_scheme(double kappa, double kappa_B)
{
    if (!(kappa >= 0)) throw std::invalid_argument("select_scheme: kappa must be non-negative");
    return kappa <= kappa_B ? Scheme::DM : Scheme::OM;
}

double expected_energy(double Pe, double kappa, double r_sigma, double e_eq)
{
    if (std::isinf(kappa)) return Pe * e_eq;
    return Pe * r_sigma / (2 * (kappa + 1)) * (2 + 2 * kappa * e_eq / r_sigma);
}

double energy_variance(double Pe, double kappa, double r_sigma, double e_eq)
{
    if (std::isinf(kappa)) return 0.0;
    const double scale = Pe * r_sigma / (2 * (kappa + 1));
    return scale * scale * (4 + 8 * kappa * e_eq / r_sigma);
}

double fit_tau(std::span<const std::pair<double, double>> points)
{
    if (points.empty()) throw std::invalid_argument("fit_tau: no points");
    double num = 0, den = 0;
    for (const auto& [n, e] : points) {
        num += e * n * n;
        den += n * n * n * n;
    }
    return num / den;
}

} // namespace irswet
