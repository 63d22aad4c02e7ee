#pragma once

#include <string>

#include "ibs/numerics/errors.hpp"
#include "ibs/numerics/grid.hpp"

namespace ibs {

/// Pointwise injection onto the coarse nodes, which coincide with every
/// (fine/coarse)-th fine node.
template <class Vec>
Vec restrict_fine_to_coarse(const Vec& f, const Grid2D& fine, const Grid2D& coarse) {
    if (fine.n_cells() % coarse.n_cells() != 0) {
        throw IncompatibleGrids("fine grid (" + std::to_string(fine.n_cells()) +
                                " cells) is not a multiple of the coarse grid (" +
                                std::to_string(coarse.n_cells()) + " cells)");
    }
    require_grid_function(fine, f.size(), "restrict_fine_to_coarse");
    const int ratio = fine.n_cells() / coarse.n_cells();
    Vec out(coarse.node_count());
    for (int l = 0; l <= coarse.n_cells(); ++l) {
        for (int k = 0; k <= coarse.n_cells(); ++k) {
            out[coarse.node(k, l)] = f[fine.node(k * ratio, l * ratio)];
        }
    }
    return out;
}

}  // namespace ibs
