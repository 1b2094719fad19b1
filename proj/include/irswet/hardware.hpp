#pragma once

#include "irswet/types.hpp"

#include <cmath>
#include <variant>

namespace irswet {

/// Amplitude-phase coupling of a practical reflecting element.
struct CouplingParams {
    double beta_min = 0.2;
    double eta = 0.43 * pi;
    double alpha = 1.6;

    void validate() const;
};

/// beta(theta) = (1 - beta_min) ((sin(theta - eta) + 1) / 2)^alpha + beta_min
template <class Scalar>
Scalar amplitude_of_phase(Scalar theta, const CouplingParams& p)
{
    const Scalar s = (std::sin(theta - static_cast<Scalar>(p.eta)) + Scalar(1)) / Scalar(2);
    // lerp is exact at both ends
    return std::lerp(static_cast<Scalar>(p.beta_min), Scalar(1), std::pow(s, static_cast<Scalar>(p.alpha)));
}

/// Element-wise amplitude_of_phase().
RVec amplitudes(const RVec& thetas, const CouplingParams& p);

/// Phase that yields unit amplitude.
inline double full_reflection_phase(const CouplingParams& p) { return p.eta + pi / 2; }

struct IdealModel {};
struct PracticalModel {
    CouplingParams params;
};
using HardwareModel = std::variant<IdealModel, PracticalModel>;

/// Controllable IRS state. Phases are wrapped into [-pi, pi] on construction.
class PhaseConfig {
public:
    PhaseConfig(RVec thetas, HardwareModel model);

    const RVec& thetas() const { return thetas_; }
    const HardwareModel& model() const { return model_; }
    Eigen::Index size() const { return thetas_.size(); }

    /// Per-element reflection amplitudes (all ones for the ideal model).
    RVec betas() const;

private:
    RVec thetas_;
    HardwareModel model_;
};

/// beta_i e^{i theta_i} for every element.
CVec reflection_coefficients(const PhaseConfig& config);

} // namespace irswet
