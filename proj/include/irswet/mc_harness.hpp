#pragma once

#include "irswet/beam_planner.hpp"
#include "irswet/csi_baseline.hpp"
#include "irswet/geometry.hpp"
#include "irswet/hardware.hpp"
#include "irswet/phase_optimizer.hpp"
#include "irswet/precoding.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace irswet {

/// Large-scale propagation and antenna gains.
struct LinkBudget {
    double ref_loss_db = 31.6; ///< attenuation at 1 m
    double exp_pb_irs = 2.2;
    double exp_irs_er = 2.7;
    double pb_gain_dbi = 15;
    double element_gain_dbi = 3;
    double pb_irs_distance_m = 20;
    double charge_radius_m = 4;
    bool blocked = false; ///< zero every path gain

    void validate() const;
};

/// Linear harvester with sensitivity floor and input saturation.
struct EhModel {
    double conversion = 0.45;
    double sensitivity_dbm = -24;
    double saturation_dbm = -8;

    void validate() const;
};

/// Pilot cost of channel estimation.
struct OverheadModel {
    int coherence = 196;

    int pilot(Eigen::Index N) const { return static_cast<int>(N) + 1; }
    /// (T_c - T_p) / T_c, or 0 when pilots take the whole block.
    double transfer_fraction(Eigen::Index N) const;

    void validate() const;
};

struct EnergyStats {
    double mean = 0;
    double variance = 0; ///< unbiased sample variance
    std::vector<double> quantile_levels;
    std::vector<double> quantiles;
    std::size_t trials = 0;
    std::uint64_t seed = 0;

    double std_error_mean() const;
};

/// 10^(-(ref + 10 n log10 d) / 10); distances below the 1 m reference are
/// clamped to it. Antenna gains are not included.
double path_loss_linear(double distance_m, double exponent, const LinkBudget& budget);

/// Product of both path losses and the PB and element gains for an ER at
/// `distance_m` from the IRS.
double link_gain(double distance_m, const LinkBudget& budget);

/// Harvested DC power (W) for RF input power `p_in_w` (W).
double harvest(double p_in_w, const EhModel& model);

/// One beam configuration observed by one ER.
struct LinkScenario {
    double Pe = 1;    ///< incident power per element
    RVec mus;         ///< incident phases
    RVec thetas;      ///< IRS phases
    RVec betas;       ///< IRS amplitudes
    RVec er_los;      ///< LoS phases towards the ER
    double kappa = 2;
    bool physical = false; ///< apply link budget and harvester
    double distance_m = 4;
    LinkBudget budget;
    EhModel eh;

    /// Per-element complex weight sqrt(Pe) b_i e^{i(theta_i + mu_i)}.
    CVec weights() const;
};

/// Draws the IRS-to-ER channel `trials` times and records
/// E = Pe |sum b_i e^{i(theta_i + mu_i)} h_i|^2 (scaled), or the harvested
/// power when the scenario is physical. Trial t uses stream (seed, t).
EnergyStats simulate_energy(const LinkScenario& scenario, std::size_t trials, std::uint64_t seed,
                            unsigned threads = 1, std::vector<double>* samples = nullptr);

/// Summary statistics of a sample; quantiles by linear interpolation.
EnergyStats summarize(const std::vector<double>& values, std::uint64_t seed,
                      const std::vector<double>& levels = {0.05, 0.25, 0.5, 0.75, 0.95});

/// Uniform-in-area ER positions (angle, radius) on the half disc facing the IRS.
std::vector<std::pair<double, double>> place_ers(std::size_t K, double radius_m, std::uint64_t seed);

/// Baseline settings for the worst-ER comparison: coarse grid, loose sweep
/// tolerance, 8 random restarts.
AOConfig worst_case_baseline_config();

/// Full description of the worst-ER comparison.
struct WorstCaseSetup {
    ArrayGeometry geometry;
    AngleSet angles;
    CouplingParams coupling;
    double P = 1;
    double kappa = 2;
    LinkBudget budget;
    EhModel eh;
    OverheadModel overhead;
    std::size_t K = 16;
    std::size_t trials = 20;
    std::uint64_t seed = 1;
    double beam_slack = default_beam_slack;
    AOConfig om = {};
    AOConfig baseline = worst_case_baseline_config();
    unsigned threads = 1;
};

struct WorstCaseResult {
    double csi_free = 0;       ///< practical IRS, optimisation method, rotation
    double csi_free_ideal = 0; ///< ideal IRS, alignment, rotation
    double csi_based = 0;      ///< ideal IRS, perfect-CSI max-min, pilot overhead
    double transfer_fraction = 0;
    std::size_t directions = 0;
    RVec per_er_free, per_er_free_ideal, per_er_based;
    std::vector<std::pair<double, double>> positions;

    /// 10 log10(csi_free / csi_based); +inf when the baseline harvests nothing.
    double gap_db() const;
};

/// Minimum over ERs of the mean harvested power per coherence block (W x
/// block fraction) for the CSI-free rotation scheme and the CSI-based baseline.
WorstCaseResult worst_case_compare(const WorstCaseSetup& setup);

/// Heat-map request over the charging half disc.
struct HeatmapSpec {
    int angles = 91;               ///< samples over [-pi/2, pi/2]
    std::vector<double> radii;     ///< metres; empty -> 0.5 m steps up to the charge radius
    bool harvested = true;         ///< harvested power (Monte Carlo) vs scaled mean energy (closed form)
    std::size_t trials = 2000;
    std::optional<std::vector<double>> directions; ///< override the planned schedule
};

struct HeatmapSetup {
    ArrayGeometry geometry;
    AngleSet angles;
    CouplingParams coupling;
    bool practical = true;
    double P = 1;
    double kappa = 2;
    LinkBudget budget;
    EhModel eh;
    double beam_slack = default_beam_slack;
    AOConfig om = {};
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct Heatmap {
    CoverageMap map;
    std::vector<double> angles;
    std::vector<double> radii;
    std::vector<double> directions;
};

/// Time-averaged energy over the rotation schedule on an angle x radius grid.
Heatmap heatmap_experiment(const HeatmapSetup& setup, const HeatmapSpec& spec);

/// Incident field of the default MRT precoder on the LoS channel.
IncidentField mrt_incidence(const ArrayGeometry& geom, const AngleSet& angles, double P);

} // namespace irswet
