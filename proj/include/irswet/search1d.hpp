#pragma once

#include "irswet/types.hpp"

#include <cmath>

namespace irswet {

struct Maximum {
    double x;
    double value;
};

/// Grid point k of a uniform `points`-sample grid over [-pi, pi).
inline double grid_angle(int k, int points) { return -pi + 2 * pi * k / points; }

/// Golden-section maximisation of f on [lo, hi] down to a bracket width of
/// `tol`. Assumes f is unimodal on the bracket; `seed` is a known point
/// inside it and is returned if nothing better is found.
template <class F>
Maximum golden_max(F&& f, double lo, double hi, double tol, Maximum seed)
{
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    Maximum best = seed;
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if (fc > best.value) best = {c, fc};
    if (fd > best.value) best = {d, fd};
    return best;
}

/// Dense grid over [-pi, pi) followed by golden refinement around the best
/// grid point. `grid_value(k)` must equal f(grid_angle(k, points)).
template <class GridValue, class F>
Maximum grid_refine_max(GridValue&& grid_value, F&& f, int points, double tol)
{
    int best_k = 0;
    double best_v = grid_value(0);
    for (int k = 1; k < points; ++k) {
        const double v = grid_value(k);
        if (v > best_v) {
            best_v = v;
            best_k = k;
        }
    }
    const double x0 = grid_angle(best_k, points);
    const double h = 2 * pi / points;
    return golden_max(f, x0 - h, x0 + h, tol, {x0, best_v});
}

} // namespace irswet
