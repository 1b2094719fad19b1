#pragma once

#include "irswet/geometry.hpp"

#include <stdexcept>

namespace irswet {

/// Transmit weights of the power beacon.
struct Precoder {
    CVec weights;
    double power_budget = 1.0;

    double power() const { return weights.squaredNorm(); }
};

/// Signal arriving at each IRS element.
struct IncidentField {
    RVec mus;           ///< incident phase per element
    double Pe = 0.0;    ///< common incident power (mean over elements)
    double spread = 0.0; ///< (max - min) / mean of the per-element powers
};

/// Raised when per-element incident powers differ, i.e. the equal-amplitude
/// property of a line-of-sight G does not hold for the supplied channel.
class NonUniformIncidence : public std::domain_error {
public:
    NonUniformIncidence(const std::string& what, double spread) : std::domain_error(what), spread_(spread) {}
    double spread() const { return spread_; }

private:
    double spread_;
};

inline constexpr double incidence_spread_tolerance = 1e-6;

/// Maximum-ratio transmission towards the IRS: sqrt(P) alpha_t(z) / ||alpha_t(z)||.
Precoder mrt(double z_G, Eigen::Index M, double P);

/// mus[j] = arg(G_j w), Pe = mean |G_j w|^2. Throws NonUniformIncidence when
/// the relative spread of |G_j w|^2 exceeds incidence_spread_tolerance.
IncidentField incident_field(const CMat& G, const Precoder& w);
inline IncidentField incident_field(const ChannelG& G, const Precoder& w) { return incident_field(G.matrix(), w); }

struct PerturbedPrecoder {
    Precoder precoder;
    double gain_ratio = 1.0; ///< |sum_m e^{-i xi_m}| / M
    double common_phase = 0.0; ///< arg(sum_m e^{-i xi_m})
};

/// w* = diag(e^{-i xi}) w.
PerturbedPrecoder perturb_common_phase(const Precoder& w, const RVec& xis);

} // namespace irswet
