#pragma once

#include "irswet/indexing.hpp"
#include "irswet/rng.hpp"
#include "irswet/types.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace irswet {

/// PB antenna count and IRS grid.
struct ArrayGeometry {
    Eigen::Index M = 4;
    Eigen::Index Nx = 10;
    Eigen::Index Ny = 10;
    double spacing_ratio = 0.5; ///< element spacing over wavelength

    Eigen::Index N() const { return Nx * Ny; }

    /// Throws std::invalid_argument when any invariant fails.
    void validate() const;
};

/// PB-to-IRS arrival/departure angles, radians.
struct AngleSet {
    double phi_G = pi / 4;   ///< azimuth AoA at the IRS
    double theta_G = pi / 3; ///< elevation AoA at the IRS
    double gamma_G = 0.0;    ///< AoD at the PB

    double u(double spacing_ratio = 0.5) const { return 2 * pi * spacing_ratio * std::cos(phi_G); }
    double v(double spacing_ratio = 0.5) const
    {
        return 2 * pi * spacing_ratio * std::sin(phi_G) * std::sin(theta_G);
    }
    double z(double spacing_ratio = 0.5) const { return 2 * pi * spacing_ratio * std::sin(gamma_G); }

    void validate() const;
};

/// Uniform linear array response: entry m is exp(i m z) / sqrt(M).
template <class Scalar>
CVector<Scalar> steering_ula(Scalar z, Eigen::Index m)
{
    if (m < 1) throw std::invalid_argument("steering_ula: element count must be positive");
    const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(m));
    CVector<Scalar> a(m);
    for (Eigen::Index k = 0; k < m; ++k) a[k] = std::polar(scale, static_cast<Scalar>(k) * z);
    return a;
}

/// Planar array response alpha_x(u) (x) alpha_y(v), ordered per element_index().
template <class Scalar>
CVector<Scalar> steering_upa(Scalar u, Scalar v, Eigen::Index nx, Eigen::Index ny)
{
    if (nx < 1 || ny < 1) throw std::invalid_argument("steering_upa: grid dimensions must be positive");
    const CVector<Scalar> ax = steering_ula(u, nx);
    const CVector<Scalar> ay = steering_ula(v, ny);
    CVector<Scalar> a(nx * ny);
    for (Eigen::Index k = 0; k < nx * ny; ++k) {
        const auto idx = element_index0(k, nx, ny);
        a[k] = ax[idx.x] * ay[idx.y];
    }
    return a;
}

/// Deterministic line-of-sight PB-to-IRS channel (N x M, rank one).
class ChannelG {
public:
    ChannelG(const ArrayGeometry& geom, const AngleSet& angles);

    const CMat& matrix() const { return g_; }
    Eigen::Index rows() const { return g_.rows(); }
    Eigen::Index cols() const { return g_.cols(); }

private:
    CMat g_;
};

inline ChannelG build_G(const ArrayGeometry& geom, const AngleSet& angles) { return {geom, angles}; }

/// Line-of-sight phase of element j (1-based) towards an in-plane ER at
/// elevation theta_hk: -(mod(j, Ny) - 1) * 2 pi (d/lambda) sin(theta_hk).
double los_phase(Eigen::Index j, Eigen::Index nx, Eigen::Index ny, double theta_hk, double spacing_ratio = 0.5);

/// los_phase() for all N elements, 0-based storage.
RVec los_phases(const ArrayGeometry& geom, double theta_hk);

/// Rician IRS-to-ER channel realisation.
struct ChannelH {
    CVec entries;
    double kappa = 0.0;
    RVec los_phases;
};

/// Element of a Rician channel drawn from `element_stream`:
/// a_los e^{i phase} + a_nlos CN(0, 1).
inline cplx rician_entry(double a_los, double a_nlos, double phase, Stream element_stream)
{
    return std::polar(a_los, phase) + a_nlos * element_stream.complex_normal();
}

/// LoS and scattered amplitudes sqrt(k/(1+k)), sqrt(1/(1+k)); kappa may be +inf.
inline std::pair<double, double> rician_amplitudes(double kappa)
{
    if (std::isinf(kappa)) return {1.0, 0.0};
    return {std::sqrt(kappa / (1 + kappa)), std::sqrt(1 / (1 + kappa))};
}

/// Draws h = sqrt(k/(1+k)) e^{i Phi} + sqrt(1/(1+k)) CN(0, I).
/// Element i consumes only stream.child(i).
ChannelH sample_h(double kappa, const RVec& los_phases, const Stream& stream);

/// Same draw written into a caller-owned buffer; no allocation.
void sample_h_into(double kappa, const RVec& los_phases, const Stream& stream, CVec& out);

} // namespace irswet
