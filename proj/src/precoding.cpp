#include "irswet/precoding.hpp"

#include <string>

namespace irswet {

Precoder mrt(double z_G, Eigen::Index M, double P)
{
    if (!(P > 0) || !std::isfinite(P)) throw std::invalid_argument("mrt: power budget must be positive");
    const CVec a = steering_ula(z_G, M);
    return {std::sqrt(P) * a / a.norm(), P};
}

IncidentField incident_field(const CMat& G, const Precoder& w)
{
    if (G.cols() != w.weights.size()) throw std::invalid_argument("incident_field: G columns must match precoder length");
    const CVec a = G * w.weights;
    const RVec power = a.cwiseAbs2();
    IncidentField f;
    f.mus = a.unaryExpr([](const cplx& c) { return std::arg(c); }).real();
    f.Pe = power.mean();
    f.spread = f.Pe > 0 ? (power.maxCoeff() - power.minCoeff()) / f.Pe : 0.0;
    if (f.spread > incidence_spread_tolerance)
        throw NonUniformIncidence("incident_field: per-element incident power is not uniform (relative spread " +
                                      std::to_string(f.spread) + ")",
                                  f.spread);
    return f;
}

PerturbedPrecoder perturb_common_phase(const Precoder& w, const RVec& xis)
{
    if (xis.size() != w.weights.size()) throw std::invalid_argument("perturb_common_phase: xis length must equal M");
    PerturbedPrecoder out;
    out.precoder.power_budget = w.power_budget;
    out.precoder.weights.resize(w.weights.size());
    cplx sum{0, 0};
    for (Eigen::Index m = 0; m < xis.size(); ++m) {
        const cplx r = std::polar(1.0, -xis[m]);
        out.precoder.weights[m] = r * w.weights[m];
        sum += r;
    }
    out.gain_ratio = std::abs(sum) / static_cast<double>(xis.size());
    out.common_phase = std::arg(sum);
    return out;
}

} // namespace irswet
