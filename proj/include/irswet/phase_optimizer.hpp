#pragma once

#include "irswet/hardware.hpp"
#include "irswet/types.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace irswet {

/// Equivalent received energy of a phase configuration.
struct EqEnergy {
    double e_eq = 0; ///< u^2 + v^2
    double u = 0;
    double v = 0;
    double r_sigma = 0; ///< sum of squared amplitudes
};

/// u = sum b_i cos(Phi_i + theta_i + mu_i), v = sum b_i sin(...).
EqEnergy e_eq(const RVec& thetas, const RVec& betas, const RVec& los, const RVec& mus);

/// Same quantity through the pairwise expansion
/// sum b_i^2 + 2 sum_{t<l} b_t b_l cos(psi_t - psi_l). O(N^2); used for checks.
double e_eq_pairwise(const RVec& thetas, const RVec& betas, const RVec& los, const RVec& mus);

/// Settings of the alternating (per-element) optimisation.
struct AOConfig {
    int grid_points = 720;
    double refine_tol = 1e-6;
    double sweep_tol = 1e-8;
    int max_sweeps = 200;
    int restarts = 4;        ///< random initialisations
    bool warm_start = true;  ///< extra restart at the ideal alignment solution
    std::uint64_t seed = 0x1f2e3d4c;
    unsigned threads = 1;    ///< workers for independent restarts; 0 = all cores
    // max-min only: soft-min continuation run before the exact ascent
    int smooth_stages = 0;
    double smooth_growth = 2; ///< sharpness ratio between stages
    int smooth_sweeps = 3;    ///< sweeps per stage

    void validate() const;
};

struct OptimResult {
    RVec thetas;
    RVec betas;
    EqEnergy energy;
    int sweeps_used = 0;
    int best_restart = 0;
    std::vector<double> objective_trace; ///< E_eq after initialisation and after each sweep
};

enum class Scheme { DM, OM };

const char* to_string(Scheme s);

/// Ideal alignment theta_i = -(Phi_i + mu_i), wrapped.
RVec align_phases(const RVec& los, const RVec& mus);

/// Direct method: every element at full reflection. The energy fields need
/// phases; this overload leaves e_eq, u and v as NaN.
OptimResult dm_solve(const CouplingParams& params, Eigen::Index N);
OptimResult dm_solve(const CouplingParams& params, const RVec& los, const RVec& mus);

/// Optimisation method: alternating per-element maximisation of E_eq under the
/// amplitude-phase coupling. Returns the best of all restarts.
OptimResult om_solve(const CouplingParams& params, const RVec& los, const RVec& mus, const AOConfig& cfg = {});

/// Rician factor above which the optimisation method beats the direct method:
/// (N - R) / (E_om - E_dm). E_dm defaults to N. Returns +inf when E_om <= E_dm,
/// meaning the direct method is always preferred.
double kappa_boundary(Eigen::Index N, double r_sigma_om, double e_eq_om, double e_eq_dm = -1);

/// DM when kappa <= kappa_B (inclusive), OM otherwise.
Scheme select_scheme(double kappa, double kappa_B);

/// Mean of the scaled received energy: Pe R / (2(k+1)) (2 + 2 k E / R).
double expected_energy(double Pe, double kappa, double r_sigma, double e_eq);

/// Variance of the scaled received energy: (Pe R / (2(k+1)))^2 (4 + 8 k E / R).
double energy_variance(double Pe, double kappa, double r_sigma, double e_eq);

/// Least-squares tau of E = tau N^2 through the origin.
double fit_tau(std::span<const std::pair<double, double>> points);

} // namespace irswet
