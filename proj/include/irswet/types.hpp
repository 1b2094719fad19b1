#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>

namespace irswet {

template <class Scalar>
using CVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <class Scalar>
using CMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using RVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using CVec = CVector<double>;
using CMat = CMatrix<double>;
using RVec = RVector<double>;
using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

/// Wraps an angle into [-pi, pi].
template <class Scalar>
Scalar wrap_phase(Scalar x)
{
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    Scalar r = std::remainder(x, two_pi);
    if (r < -std::numbers::pi_v<Scalar>) r += two_pi;
    if (r > std::numbers::pi_v<Scalar>) r -= two_pi;
    return r;
}

inline RVec wrap_phases(const RVec& x)
{
    return x.unaryExpr([](double t) { return wrap_phase(t); });
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_watts(double dbm) { return 1e-3 * db_to_linear(dbm); }
inline double watts_to_dbm(double w) { return linear_to_db(w / 1e-3); }

} // namespace irswet
