#include "irswet/beam_planner.hpp"

#include <cmath>
#include <iomanip>
#include <stdexcept>

namespace irswet {

namespace {

constexpr double edge_tol = 1e-9;

double threshold(double delta) { return 1 / std::sqrt(2.0) - delta; }

// Bisection for g(x) = target on [inside, outside] with g(inside) > target >= g(outside).
template <class G>
double bisect(G&& g, double inside, double outside, double target)
{
    while (std::abs(outside - inside) > edge_tol) {
        const double mid = 0.5 * (inside + outside);
        if (g(mid) > target)
            inside = mid;
        else
            outside = mid;
    }
    return 0.5 * (inside + outside);
}

// One side of the main lobe; `dir` is +1 (upper) or -1 (lower).
double lobe_edge(double pointing, double n_eff, double s, double delta, int dir, bool& clamped)
{
    const double target = threshold(delta);
    auto g = [&](double w) { return pattern_gain(w, pointing, n_eff, s); };
    // first null sits at |sin w - sin p| = 1 / (n_eff s); never search past it
    const double null_sin = std::sin(pointing) + dir / (n_eff * s);
    double limit = dir * pi / 2;
    if (std::abs(null_sin) < 1) limit = std::asin(null_sin);
    clamped = false;
    if (g(limit) > target) {
        clamped = true;
        return limit;
    }
    return bisect(g, pointing, limit, target);
}

} // namespace

double pattern_gain(double omega, double pointing, double n_eff, double spacing_ratio)
{
    const double x = pi * spacing_ratio * (std::sin(omega) - std::sin(pointing));
    const double den = n_eff * std::sin(x);
    if (std::abs(den) < 1e-12) {
        // removable singularity (and its grating-lobe copies)
        return 1.0;
    }
    return std::min(1.0, std::abs(std::sin(n_eff * x) / den));
}

BeamEdges half_power_edges(double pointing, double n_eff, double spacing_ratio, double delta)
{
    if (!(pointing > -pi / 2 && pointing < pi / 2))
        throw std::invalid_argument("half_power_edges: pointing must lie in (-pi/2, pi/2)");
    if (!(n_eff >= 1)) throw std::invalid_argument("half_power_edges: n_eff must be >= 1");
    BeamEdges e;
    e.lower = lobe_edge(pointing, n_eff, spacing_ratio, delta, -1, e.lower_clamped);
    e.upper = lobe_edge(pointing, n_eff, spacing_ratio, delta, +1, e.upper_clamped);
    return e;
}

RotationSchedule plan_rotation(double n_eff, double spacing_ratio, double delta)
{
    if (!(n_eff >= 2)) throw std::invalid_argument("plan_rotation: n_eff must be >= 2");
    if (!(threshold(delta) > 0 && threshold(delta) < 1))
        throw std::invalid_argument("plan_rotation: delta leaves no valid gain threshold");

    std::vector<double> positive{0.0};
    BeamEdges last = half_power_edges(0.0, n_eff, spacing_ratio, delta);
    const double near_endfire = pi / 2 - 1e-9;
    while (!last.upper_clamped && last.upper < pi / 2 - edge_tol) {
        const double prev_upper = last.upper;
        auto lower_of = [&](double p) { return half_power_edges(p, n_eff, spacing_ratio, delta).lower; };
        double next;
        if (lower_of(near_endfire) < prev_upper) {
            // no pointing short of endfire puts its lower edge this far out;
            // take the shallowest beam whose lobe reaches +pi/2
            auto reaches = [&](double p) {
                const auto e = half_power_edges(p, n_eff, spacing_ratio, delta);
                return e.upper_clamped || e.upper >= pi / 2 - edge_tol;
            };
            double lo = positive.back(), hi = near_endfire;
            while (hi - lo > edge_tol) {
                const double mid = 0.5 * (lo + hi);
                (reaches(mid) ? hi : lo) = mid;
            }
            next = hi;
        } else {
            // lower edge grows monotonically with the pointing angle
            double lo = positive.back(), hi = near_endfire;
            while (hi - lo > edge_tol) {
                const double mid = 0.5 * (lo + hi);
                (lower_of(mid) < prev_upper ? lo : hi) = mid;
            }
            next = 0.5 * (lo + hi);
        }
        positive.push_back(next);
        last = half_power_edges(next, n_eff, spacing_ratio, delta);
    }

    RotationSchedule s;
    s.n_eff = n_eff;
    s.spacing_ratio = spacing_ratio;
    s.delta = delta;
    for (auto it = positive.rbegin(); it != positive.rend(); ++it)
        if (*it != 0.0) s.directions.push_back(-*it);
    for (double p : positive) s.directions.push_back(p);
    for (double p : s.directions) s.edges.push_back(half_power_edges(p, n_eff, spacing_ratio, delta));
    return s;
}

bool covers(const std::vector<double>& directions, double n_eff, double spacing_ratio, double delta, int points)
{
    const double target = threshold(delta) - 1e-9;
    for (int k = 0; k < points; ++k) {
        const double w = -pi / 2 + pi * k / (points - 1);
        bool ok = false;
        for (double p : directions) {
            if (pattern_gain(w, p, n_eff, spacing_ratio) >= target) {
                ok = true;
                break;
            }
        }
        if (!ok) return false;
    }
    return true;
}

void write_schedule_csv(std::ostream& os, const RotationSchedule& s)
{
    const double deg = 180 / pi;
    os << "direction_deg,lower_edge_deg,upper_edge_deg\n";
    os << std::fixed << std::setprecision(6);
    for (std::size_t v = 0; v < s.size(); ++v)
        os << s.directions[v] * deg << ',' << s.edges[v].lower * deg << ',' << s.edges[v].upper * deg << '\n';
}

CoverageMap coverage_map(const RotationSchedule& schedule,
                         const std::function<Eigen::MatrixXd(std::size_t, double)>& per_direction)
{
    if (schedule.size() == 0) throw std::invalid_argument("coverage_map: empty schedule");
    CoverageMap m;
    for (std::size_t v = 0; v < schedule.size(); ++v) {
        const Eigen::MatrixXd p = per_direction(v, schedule.directions[v]);
        if (v == 0)
            m.grid = Eigen::MatrixXd::Zero(p.rows(), p.cols());
        else if (p.rows() != m.grid.rows() || p.cols() != m.grid.cols())
            throw std::invalid_argument("coverage_map: per-direction grids differ in shape");
        m.grid += p;
    }
    m.grid /= static_cast<double>(schedule.size());
    m.directions_used = schedule.size();
    return m;
}

} // namespace irswet
