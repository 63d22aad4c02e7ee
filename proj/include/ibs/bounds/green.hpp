#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "ibs/numerics/errors.hpp"
#include "ibs/numerics/grid.hpp"
#include "ibs/numerics/sparse.hpp"
#include "ibs/numerics/types.hpp"
#include "ibs/schrodinger/model.hpp"
#include "ibs/schrodinger/wells.hpp"

namespace ibs::bounds {

inline constexpr int kDefaultStride = 4;
inline constexpr Eigen::Index kColumnBlock = 64;

/// Calls `visit(p, g)` for every source row sources[p] with g = op^{-1}(source * e_row).
inline void for_each_green_column(const SparseOperator& op, const std::vector<Eigen::Index>& sources, double source,
                                  const std::function<void(std::size_t, const Eigen::VectorXcd&)>& visit) {
    for (std::size_t begin = 0; begin < sources.size(); begin += std::size_t(kColumnBlock)) {
        const std::size_t end = std::min(sources.size(), begin + std::size_t(kColumnBlock));
        Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(op.size(), Eigen::Index(end - begin));
        for (std::size_t p = begin; p < end; ++p) rhs(sources[p], Eigen::Index(p - begin)) = source;
        const Eigen::MatrixXcd g = op.solve(rhs);
        for (std::size_t p = begin; p < end; ++p) visit(p, g.col(Eigen::Index(p - begin)));
    }
}

/// Weighted L1 norms sum_y w(y) |g_p(y)| of the Green columns for each source.
inline std::vector<double> green_l1_columns(const SparseOperator& op, const std::vector<Eigen::Index>& sources,
                                            double source, const Eigen::VectorXd& weights) {
    if (weights.size() != op.size()) throw GridMismatch("weight vector does not match the operator");
    std::vector<double> out(sources.size(), 0.0);
    for_each_green_column(op, sources, source, [&](std::size_t p, const Eigen::VectorXcd& g) {
        out[p] = weights.dot(g.cwiseAbs());
    });
    return out;
}

/// Index range [lo, n - lo] of nodes at distance >= eps from the boundary.
inline int box_margin(const Grid2D& grid, double eps) {
    return int(std::ceil(eps / grid.h() - 1e-9));
}

/// Node indices k in [1, n-1] on the lattice through the center node with
/// spacing `stride`.
inline std::vector<int> sample_lattice(const Grid2D& grid, int stride) {
    if (stride < 1) throw ConfigError("stride must be at least 1");
    const int n = grid.n_cells();
    const int c = n / 2;
    std::vector<int> out;
    for (int k = 1; k < n; ++k)
        if ((k - c) % stride == 0) out.push_back(k);
    return out;
}

struct GreenSweep {
    std::vector<double> epsilons;
    std::vector<double> mu;
    std::vector<double> nu;
};

/// mu and nu for every epsilon from one set of Green columns.  Sources are
/// sampled on the center-anchored lattice; integrals over the box of nodes at
/// distance >= eps use tensor trapezoid weights (half weight on the box edges).
inline GreenSweep green_sweep(const Grid2D& grid, const GridFunction& q0, const std::vector<double>& epsilons,
                              const Eigen::MatrixXd& wells, int stride) {
    require_grid_function(grid, q0.size(), "green_sweep");
    if (epsilons.empty()) throw ConfigError("green_sweep needs at least one epsilon");
    for (double e : epsilons)
        if (!(e >= 0.0 && e <= 0.25)) throw ConfigError("epsilon must lie in [0, 1/4]");
    const bool with_wells = wells.cols() > 0;
    if (with_wells && wells.rows() != grid.node_count()) throw GridMismatch("well matrix has the wrong number of rows");

    const int n = grid.n_cells();
    const double h = grid.h();
    const SparseOperator op = schrodinger::assemble_operator(grid, q0);

    std::vector<int> lo(epsilons.size());
    for (std::size_t e = 0; e < epsilons.size(); ++e) lo[e] = box_margin(grid, epsilons[e]);
    const int lo_min = *std::min_element(lo.begin(), lo.end());

    std::vector<Eigen::Index> sources;
    std::vector<std::array<int, 2>> coords;
    const std::vector<int> lattice = sample_lattice(grid, stride);
    for (int l : lattice)
        for (int k : lattice)
            if (std::min({k, l, n - k, n - l}) >= lo_min) {
                sources.push_back(grid.interior(k, l));
                coords.push_back({k, l});
            }
    if (sources.empty()) throw ConfigError("no sampled nodes inside the active support; reduce the stride");

    struct WellNode {
        int k, l;
        double value;
    };
    std::vector<std::vector<WellNode>> well_nodes(std::size_t(wells.cols()));
    for (Eigen::Index i = 0; i < wells.cols(); ++i)
        for (int l = 1; l < n; ++l)
            for (int k = 1; k < n; ++k) {
                const double v = std::abs(wells(grid.node(k, l), i));
                if (v > 0.0) well_nodes[std::size_t(i)].push_back({k, l, v});
            }

    auto weight_1d = [&](int k, int a) { return (k == a || k == n - a) ? 0.5 * h : h; };

    GreenSweep out;
    out.epsilons = epsilons;
    out.mu.assign(epsilons.size(), 0.0);
    std::vector<double> nu_root(epsilons.size(), 0.0);
    Eigen::VectorXd abs_g(grid.interior_count());

    for_each_green_column(op, sources, 1.0 / (h * h), [&](std::size_t p, const Eigen::VectorXcd& g) {
        abs_g = g.cwiseAbs();
        const auto [xk, xl] = coords[p];
        for (std::size_t e = 0; e < epsilons.size(); ++e) {
            const int a = lo[e];
            if (std::min({xk, xl, n - xk, n - xl}) < a) continue;
            const int kb = std::max(a, 1), ke = std::min(n - a, n - 1);
            double mu_sum = 0.0;
            for (int l = kb; l <= ke; ++l) {
                const double wl = weight_1d(l, a);
                double row = 0.0;
                for (int k = kb; k <= ke; ++k) row += weight_1d(k, a) * abs_g[grid.interior(k, l)];
                mu_sum += wl * row;
            }
            out.mu[e] = std::max(out.mu[e], mu_sum);
            if (!with_wells) continue;
            for (const auto& nodes : well_nodes) {
                double s = 0.0;
                for (const auto& w : nodes) {
                    if (std::min({w.k, w.l, n - w.k, n - w.l}) < a) continue;
                    s += weight_1d(w.k, a) * weight_1d(w.l, a) * w.value * abs_g[grid.interior(w.k, w.l)];
                }
                nu_root[e] = std::max(nu_root[e], s);
            }
        }
    });
    constexpr double kDomainArea = 1.0;
    out.nu.resize(epsilons.size());
    for (std::size_t e = 0; e < epsilons.size(); ++e) out.nu[e] = nu_root[e] * nu_root[e] * kDomainArea;
    return out;
}

/// mu = sup_x ||G(x, .)||_{L1} over the active support of `grid`.
inline double estimate_mu(const Grid2D& grid, const GridFunction& q0, int stride = kDefaultStride) {
    return green_sweep(grid, q0, {grid.epsilon()}, Eigen::MatrixXd(), stride).mu[0];
}

/// nu = (sup_i sup_x int |G(x, y) phi_i(y)| dy)^2 |Omega| over the active support.
inline double estimate_nu(const Grid2D& grid, const GridFunction& q0, const Eigen::MatrixXd& wells,
                          int stride = kDefaultStride) {
    if (wells.cols() == 0) throw ConfigError("estimate_nu needs at least one well");
    return green_sweep(grid, q0, {grid.epsilon()}, wells, stride).nu[0];
}

inline double estimate_nu(const Grid2D& grid, const GridFunction& q0, const schrodinger::WellSet& wells,
                          int stride = kDefaultStride) {
    return estimate_nu(grid, q0, wells.node_values(grid), stride);
}

}  // namespace ibs::bounds
