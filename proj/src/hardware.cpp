#include "irswet/hardware.hpp"

#include <stdexcept>

namespace irswet {

void CouplingParams::validate() const
{
    if (!(beta_min >= 0 && beta_min <= 1)) throw std::invalid_argument("CouplingParams: beta_min must lie in [0, 1]");
    if (!(alpha > 0) || !std::isfinite(alpha)) throw std::invalid_argument("CouplingParams: alpha must be positive");
    if (!std::isfinite(eta)) throw std::invalid_argument("CouplingParams: eta must be finite");
}

RVec amplitudes(const RVec& thetas, const CouplingParams& p)
{
    return thetas.unaryExpr([&p](double t) { return amplitude_of_phase(t, p); });
}

PhaseConfig::PhaseConfig(RVec thetas, HardwareModel model) : thetas_(wrap_phases(thetas)), model_(std::move(model))
{
    if (const auto* pm = std::get_if<PracticalModel>(&model_)) pm->params.validate();
}

RVec PhaseConfig::betas() const
{
    if (const auto* pm = std::get_if<PracticalModel>(&model_)) return amplitudes(thetas_, pm->params);
    return RVec::Ones(thetas_.size());
}

CVec reflection_coefficients(const PhaseConfig& config)
{
    const RVec b = config.betas();
    CVec out(config.size());
    for (Eigen::Index i = 0; i < config.size(); ++i) out[i] = std::polar(b[i], config.thetas()[i]);
    return out;
}

} // namespace irswet
