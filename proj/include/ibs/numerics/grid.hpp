#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ibs/numerics/errors.hpp"
#include "ibs/numerics/types.hpp"

namespace ibs {

/// Uniform grid on the unit square with nodes (k h, l h), k, l = 0..n_cells.
///
/// Nodes are numbered row-major: node(k, l) = l * (n_cells + 1) + k, so a
/// GridFunction stores the rows y = const one after another.  The active
/// support (the region where perturbations live) is the set of interior nodes
/// whose distance to the boundary is at least `epsilon`.
class Grid2D {
public:
    Grid2D() : Grid2D(2, 0.0) {}

    explicit Grid2D(int n_cells, double epsilon = 0.0) : n_cells_(n_cells), epsilon_(epsilon) {
        if (n_cells < 2) {
            throw GridMismatch("grid needs at least 2 cells per side, got " + std::to_string(n_cells));
        }
        if (!(epsilon >= 0.0 && epsilon <= 0.25)) {
            throw GridMismatch("epsilon must lie in [0, 1/4], got " + std::to_string(epsilon));
        }
        build_support();
    }

    int n_cells() const { return n_cells_; }
    double h() const { return 1.0 / n_cells_; }
    double epsilon() const { return epsilon_; }
    int nodes_per_side() const { return n_cells_ + 1; }
    Eigen::Index node_count() const { return Eigen::Index(nodes_per_side()) * nodes_per_side(); }
    Eigen::Index interior_count() const { return Eigen::Index(n_cells_ - 1) * (n_cells_ - 1); }

    Eigen::Index node(int k, int l) const { return Eigen::Index(l) * nodes_per_side() + k; }
    Eigen::Index interior(int k, int l) const { return Eigen::Index(l - 1) * (n_cells_ - 1) + (k - 1); }
    double coord(int k) const { return k * h(); }

    bool is_interior(int k, int l) const {
        return k > 0 && l > 0 && k < n_cells_ && l < n_cells_;
    }

    /// Distance of node (k, l) to the boundary of the unit square.
    double boundary_distance(int k, int l) const {
        return std::min({coord(k), 1.0 - coord(k), coord(l), 1.0 - coord(l)});
    }

    bool in_support(int k, int l) const {
        return is_interior(k, l) && boundary_distance(k, l) >= epsilon_ - 1e-9 * h();
    }

    /// Node indices of the active support, row-major.
    const std::vector<Eigen::Index>& support_nodes() const { return support_nodes_; }
    /// Interior indices of the active support, same order as support_nodes().
    const std::vector<Eigen::Index>& support_interior() const { return support_interior_; }
    Eigen::Index support_size() const { return Eigen::Index(support_nodes_.size()); }

    /// Same nodes, different active support.
    Grid2D with_epsilon(double epsilon) const { return Grid2D(n_cells_, epsilon); }

    template <class F>
    GridFunction sample(F&& f) const {
        GridFunction out(node_count());
        for (int l = 0; l <= n_cells_; ++l) {
            for (int k = 0; k <= n_cells_; ++k) {
                out[node(k, l)] = cplx(f(coord(k), coord(l)));
            }
        }
        return out;
    }

    template <class F>
    RealGridFunction sample_real(F&& f) const {
        RealGridFunction out(node_count());
        for (int l = 0; l <= n_cells_; ++l) {
            for (int k = 0; k <= n_cells_; ++k) {
                out[node(k, l)] = f(coord(k), coord(l));
            }
        }
        return out;
    }

    friend bool operator==(const Grid2D& a, const Grid2D& b) {
        return a.n_cells_ == b.n_cells_ && a.epsilon_ == b.epsilon_;
    }

private:
    void build_support() {
        for (int l = 1; l < n_cells_; ++l) {
            for (int k = 1; k < n_cells_; ++k) {
                if (in_support(k, l)) {
                    support_nodes_.push_back(node(k, l));
                    support_interior_.push_back(interior(k, l));
                }
            }
        }
    }

    int n_cells_;
    double epsilon_;
    std::vector<Eigen::Index> support_nodes_;
    std::vector<Eigen::Index> support_interior_;
};

inline void require_grid_function(const Grid2D& grid, Eigen::Index size, const char* what) {
    if (size != grid.node_count()) {
        throw GridMismatch(std::string(what) + ": expected " + std::to_string(grid.node_count()) +
                           " node values, got " + std::to_string(size));
    }
}

/// Interior node values, dropping the boundary.
template <class Vec>
auto interior_values(const Grid2D& grid, const Vec& f) {
    require_grid_function(grid, f.size(), "interior_values");
    Eigen::Matrix<typename Vec::Scalar, Eigen::Dynamic, 1> out(grid.interior_count());
    for (int l = 1; l < grid.n_cells(); ++l) {
        for (int k = 1; k < grid.n_cells(); ++k) {
            out[grid.interior(k, l)] = f[grid.node(k, l)];
        }
    }
    return out;
}

/// Extends interior values by zero on the boundary.
inline GridFunction from_interior(const Grid2D& grid, const Eigen::VectorXcd& v) {
    GridFunction out = GridFunction::Zero(grid.node_count());
    for (int l = 1; l < grid.n_cells(); ++l) {
        for (int k = 1; k < grid.n_cells(); ++k) {
            out[grid.node(k, l)] = v[grid.interior(k, l)];
        }
    }
    return out;
}

/// Restriction of a grid function to the active support.
inline ParamVector support_values(const Grid2D& grid, const GridFunction& f) {
    require_grid_function(grid, f.size(), "support_values");
    const auto& nodes = grid.support_nodes();
    ParamVector out(Eigen::Index(nodes.size()));
    for (std::size_t p = 0; p < nodes.size(); ++p) {
        out[Eigen::Index(p)] = f[nodes[p]];
    }
    return out;
}

/// Grid function equal to `x` on the active support and zero elsewhere.
inline GridFunction embed_support(const Grid2D& grid, const ParamVector& x) {
    if (x.size() != grid.support_size()) {
        throw GridMismatch("embed_support: expected " + std::to_string(grid.support_size()) +
                           " support values, got " + std::to_string(x.size()));
    }
    GridFunction out = GridFunction::Zero(grid.node_count());
    const auto& nodes = grid.support_nodes();
    for (std::size_t p = 0; p < nodes.size(); ++p) {
        out[nodes[p]] = x[Eigen::Index(p)];
    }
    return out;
}

}  // namespace ibs
