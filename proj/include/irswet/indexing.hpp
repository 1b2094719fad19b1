#pragma once

#include <Eigen/Core>

#include <stdexcept>

namespace irswet {

/// Position of one IRS element on the Nx-by-Ny grid.
///
/// Formulas number elements j = 1..N with a column index mod(j, Ny) and a
/// row index that advances every Ny elements. mod(j, Ny) = 0 is taken to mean
/// column Ny, which makes the mapping agree with the Kronecker ordering
/// alpha_x(u) (x) alpha_y(v): 0-based element k = x_index * Ny + y_index.
///
/// Every routine that needs a per-element phase goes through this helper.
struct ElementIndex {
    Eigen::Index x; ///< 0-based row (multiplies u)
    Eigen::Index y; ///< 0-based column (multiplies v)
};

/// Maps a 1-based element number to its grid position.
inline ElementIndex element_index(Eigen::Index j, Eigen::Index nx, Eigen::Index ny)
{
    if (nx < 1 || ny < 1) throw std::invalid_argument("element_index: grid dimensions must be positive");
    if (j < 1 || j > nx * ny) throw std::out_of_range("element_index: element number out of range");
    Eigen::Index column = j % ny;
    if (column == 0) column = ny;
    return {(j - column) / ny, column - 1};
}

/// Same as element_index() for a 0-based storage offset.
inline ElementIndex element_index0(Eigen::Index k, Eigen::Index nx, Eigen::Index ny)
{
    return element_index(k + 1, nx, ny);
}

} // namespace irswet
