#include "irswet/geometry.hpp"

namespace irswet {

void ArrayGeometry::validate() const
{
    if (M < 1) throw std::invalid_argument("ArrayGeometry: M must be >= 1");
    if (Nx < 1 || Ny < 1) throw std::invalid_argument("ArrayGeometry: Nx and Ny must be >= 1");
    if (!(spacing_ratio > 0) || !std::isfinite(spacing_ratio))
        throw std::invalid_argument("ArrayGeometry: spacing_ratio must be positive");
}

void AngleSet::validate() const
{
    if (!std::isfinite(phi_G) || !std::isfinite(theta_G) || !std::isfinite(gamma_G))
        throw std::invalid_argument("AngleSet: angles must be finite");
}

ChannelG::ChannelG(const ArrayGeometry& geom, const AngleSet& angles)
{
    geom.validate();
    angles.validate();
    const double s = geom.spacing_ratio;
    const CVec ar = steering_upa(angles.u(s), angles.v(s), geom.Nx, geom.Ny);
    const CVec at = steering_ula(angles.z(s), geom.M);
    g_ = std::sqrt(static_cast<double>(geom.M * geom.N())) * ar * at.adjoint();
}

double los_phase(Eigen::Index j, Eigen::Index nx, Eigen::Index ny, double theta_hk, double spacing_ratio)
{
    const auto idx = element_index(j, nx, ny);
    return -static_cast<double>(idx.y) * 2 * pi * spacing_ratio * std::sin(theta_hk);
}

RVec los_phases(const ArrayGeometry& geom, double theta_hk)
{
    RVec phi(geom.N());
    for (Eigen::Index k = 0; k < geom.N(); ++k)
        phi[k] = los_phase(k + 1, geom.Nx, geom.Ny, theta_hk, geom.spacing_ratio);
    return phi;
}

void sample_h_into(double kappa, const RVec& los_phases, const Stream& stream, CVec& out)
{
    if (!(kappa >= 0)) throw std::invalid_argument("sample_h: kappa must be non-negative");
    const Eigen::Index n = los_phases.size();
    out.resize(n);
    const auto [a_los, a_nlos] = rician_amplitudes(kappa);
    for (Eigen::Index i = 0; i < n; ++i)
        out[i] = rician_entry(a_los, a_nlos, los_phases[i], stream.child(static_cast<std::uint64_t>(i)));
}

ChannelH sample_h(double kappa, const RVec& los_phases, const Stream& stream)
{
    ChannelH h;
    sample_h_into(kappa, los_phases, stream, h.entries);
    h.kappa = kappa;
    h.los_phases = los_phases;
    return h;
}

} // namespace irswet
