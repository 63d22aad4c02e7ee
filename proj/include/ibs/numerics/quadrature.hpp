#pragma once

#include "ibs/numerics/errors.hpp"
#include "ibs/numerics/grid.hpp"

namespace ibs {

/// Tensor-product trapezoid weights: h^2 inside, h^2/2 on edges, h^2/4 at
/// the corners.
inline Eigen::VectorXd trapezoid_weights(const Grid2D& grid) {
    const int n = grid.n_cells();
    const double h2 = grid.h() * grid.h();
    Eigen::VectorXd w(grid.node_count());
    for (int l = 0; l <= n; ++l) {
        const double wl = (l == 0 || l == n) ? 0.5 : 1.0;
        for (int k = 0; k <= n; ++k) {
            const double wk = (k == 0 || k == n) ? 0.5 : 1.0;
            w[grid.node(k, l)] = h2 * wk * wl;
        }
    }
    return w;
}

/// Trapezoid approximation of the integral of f * g over the unit square.
/// Bilinear, not sesquilinear: no conjugation.
template <class VecF, class VecG>
cplx trapezoid_integral(const Grid2D& grid, const VecF& f, const VecG& g) {
    if (f.size() != g.size()) {
        throw GridMismatch("trapezoid_integral: grid functions have different sizes");
    }
    require_grid_function(grid, f.size(), "trapezoid_integral");
    const Eigen::VectorXd w = trapezoid_weights(grid);
    cplx sum = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        sum += w[i] * cplx(f[i]) * cplx(g[i]);
    }
    return sum;
}

}  // namespace ibs
