#pragma once

#include "irswet/types.hpp"

#include <functional>
#include <ostream>
#include <vector>

namespace irswet {

/// |sin(N pi s (sin w - sin p)) / (N sin(pi s (sin w - sin p)))|, 1 at the peak.
double pattern_gain(double omega, double pointing, double n_eff, double spacing_ratio = 0.5);

struct BeamEdges {
    double lower = 0;
    double upper = 0;
    bool lower_clamped = false; ///< lobe still above threshold at -pi/2
    bool upper_clamped = false; ///< lobe still above threshold at +pi/2
};

/// Angles on either side of the main lobe where the gain falls to
/// 1/sqrt(2) - delta, found by bisection to 1e-9 rad.
BeamEdges half_power_edges(double pointing, double n_eff, double spacing_ratio = 0.5, double delta = 0.0);

inline constexpr double default_beam_slack = 0.013;

struct RotationSchedule {
    std::vector<double> directions; ///< ascending, radians
    std::vector<BeamEdges> edges;
    double n_eff = 0;
    double spacing_ratio = 0.5;
    double delta = 0;

    std::size_t size() const { return directions.size(); }
};

/// Minimal beam set whose thresholded main lobes tile [-pi/2, pi/2], grown
/// outward from broadside so that each new lower edge meets the previous
/// upper edge.
RotationSchedule plan_rotation(double n_eff, double spacing_ratio = 0.5, double delta = default_beam_slack);

/// True when every angle of an `points`-sample grid over [-pi/2, pi/2] sees
/// gain >= 1/sqrt(2) - delta from at least one direction.
bool covers(const std::vector<double>& directions, double n_eff, double spacing_ratio, double delta, int points = 2000);

/// CSV: direction_deg,lower_edge_deg,upper_edge_deg
void write_schedule_csv(std::ostream& os, const RotationSchedule& s);

/// Time-averaged energy map over an angle x radius grid.
struct CoverageMap {
    Eigen::MatrixXd grid; ///< rows: angles, cols: radii
    std::size_t directions_used = 0;
};

/// Entrywise mean of evaluator(v) over all scheduled directions.
CoverageMap coverage_map(const RotationSchedule& schedule,
                         const std::function<Eigen::MatrixXd(std::size_t, double)>& per_direction);

} // namespace irswet
