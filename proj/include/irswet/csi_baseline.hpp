#pragma once

#include "irswet/phase_optimizer.hpp"
#include "irswet/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace irswet {

/// Receivers served by the perfect-CSI design. Column k of `channels` is the
/// effective per-element gain of ER k (incident phase, fading and, if wanted,
/// path-loss scaling folded in); the received quantity is |sum_j c_jk e^{i theta_j}|^2.
struct ErSet {
    CMat channels;                                  ///< N x K
    std::vector<std::pair<double, double>> positions; ///< (angle rad, radius m), optional

    Eigen::Index N() const { return channels.rows(); }
    Eigen::Index K() const { return channels.cols(); }
};

struct MaxMinResult {
    RVec thetas;
    double min_energy = 0;
    RVec per_er;
    int sweeps = 0;
    int best_restart = 0;
    std::vector<double> objective_trace;
};

/// Default settings of the baseline solver: eight random restarts, no
/// alignment warm start, ten soft-min stages.
AOConfig baseline_config();

/// Per-receiver energies |c_k^T e^{i theta}|^2.
RVec per_er_energy(const ErSet& ers, const RVec& thetas);

/// Max-min phase design by per-element coordinate ascent. Each restart first
/// ascends a soft-min surrogate of increasing sharpness (cfg.smooth_*), then
/// ascends min_k energy exactly; the trace covers the exact stage only and is
/// non-decreasing.
MaxMinResult maxmin_solve(const ErSet& ers, const AOConfig& cfg = baseline_config());

/// Exhaustive max-min over `levels` uniformly spaced phases per element.
/// Refuses (std::length_error) when levels^N exceeds 1e8.
MaxMinResult brute_force_maxmin(const ErSet& ers, int levels, unsigned threads = 1);

inline constexpr const char* baseline_solver_name = "coordinate-ascent";

} // namespace irswet
