#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "ibs/hydro/aquifer.hpp"
#include "ibs/numerics/errors.hpp"
#include "ibs/numerics/grid.hpp"
#include "ibs/numerics/quadrature.hpp"
#include "ibs/numerics/sparse.hpp"
#include "ibs/schrodinger/wells.hpp"

namespace ibs::hydro {

inline constexpr double kRootFloor = 1e-6;

struct SplitResult {
    RealGridFunction r1;
    RealGridFunction r2;
    double imag_residue = 0.0;  // max |Im| of the algebraic solutions
};

/// Pointwise solve of [1, i w1; 1, i w2] [r1; r2] = [Q1; Q2], keeping real
/// parts.
inline SplitResult two_freq_split(const GridFunction& Q1, const GridFunction& Q2, double omega1, double omega2) {
    if (omega1 == omega2) throw EqualFrequencies("two_freq_split needs distinct frequencies");
    if (Q1.size() != Q2.size()) throw GridMismatch("two_freq_split: potentials have different sizes");
    SplitResult out{RealGridFunction(Q1.size()), RealGridFunction(Q1.size()), 0.0};
    const cplx i_dw(0.0, omega1 - omega2);
    for (Eigen::Index n = 0; n < Q1.size(); ++n) {
        const cplx r2 = (Q1[n] - Q2[n]) / i_dw;
        const cplx r1 = Q1[n] - cplx(0.0, omega1) * r2;
        out.r1[n] = r1.real();
        out.r2[n] = r2.real();
        out.imag_residue = std::max({out.imag_residue, std::abs(r1.imag()), std::abs(r2.imag())});
    }
    return out;
}

/// Conductivity values assumed known: on the outer boundary and inside the
/// wells.  Elsewhere `sigma` is ignored.
struct KnownSigma {
    RealGridFunction sigma;
    std::vector<bool> known;

    static KnownSigma from_truth(const Grid2D& grid, const RealGridFunction& sigma_true,
                                 const schrodinger::WellSet& wells) {
        require_grid_function(grid, sigma_true.size(), "KnownSigma");
        KnownSigma k{sigma_true, wells.support_mask(grid)};
        for (int l = 0; l <= grid.n_cells(); ++l)
            for (int c = 0; c <= grid.n_cells(); ++c)
                if (!grid.is_interior(c, l)) k.known[std::size_t(grid.node(c, l))] = true;
        return k;
    }
};

struct SigmaRecovery {
    RealGridFunction sigma;
    bool negative_root = false;  // s fell below the floor somewhere
    int clamped_nodes = 0;
};

/// Solves Delta_h s - r1 s = 0 on the unknown nodes with s = sigma^{1/2}
/// prescribed on the known ones, and returns sigma = s^2.  Values of s
/// below 1e-6 are clamped and flagged.
inline SigmaRecovery recover_sigma(const Grid2D& grid, const RealGridFunction& r1, const KnownSigma& known) {
    require_grid_function(grid, r1.size(), "recover_sigma");
    require_grid_function(grid, known.sigma.size(), "recover_sigma");
    if (known.known.size() != std::size_t(grid.node_count())) throw GridMismatch("known-sigma mask has the wrong size");
    std::vector<Eigen::Index> unknown_index(std::size_t(grid.node_count()), -1);
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < grid.node_count(); ++i) {
        if (known.known[std::size_t(i)]) {
            if (!(known.sigma[i] > 0.0)) throw NonPositiveSigma("known conductivity must be positive");
        } else {
            unknown_index[std::size_t(i)] = count++;
        }
    }

    SigmaRecovery out;
    out.sigma = known.sigma;
    if (count == 0) return out;
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    std::vector<Eigen::Triplet<cplx>> t;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(count);
    for (int l = 1; l < grid.n_cells(); ++l) {
        for (int k = 1; k < grid.n_cells(); ++k) {
            const Eigen::Index node = grid.node(k, l);
            const Eigen::Index row = unknown_index[std::size_t(node)];
            if (row < 0) continue;
            t.emplace_back(row, row, 4.0 * inv_h2 + r1[node]);
            const std::array<Eigen::Index, 4> nb{grid.node(k + 1, l), grid.node(k - 1, l), grid.node(k, l + 1),
                                                 grid.node(k, l - 1)};
            for (Eigen::Index m : nb) {
                const Eigen::Index col = unknown_index[std::size_t(m)];
                if (col >= 0) {
                    t.emplace_back(row, col, -inv_h2);
                } else {
                    rhs[row] += inv_h2 * std::sqrt(known.sigma[m]);
                }
            }
        }
    }
    SparseMatrix a(count, count);
    a.setFromTriplets(t.begin(), t.end());
    const Eigen::VectorXcd s = SparseOperator(std::move(a)).solve(rhs);
    for (Eigen::Index i = 0; i < grid.node_count(); ++i) {
        const Eigen::Index u = unknown_index[std::size_t(i)];
        if (u < 0) continue;
        double v = s[u].real();
        if (v < kRootFloor) {
            v = kRootFloor;
            out.negative_root = true;
            ++out.clamped_nodes;
        }
        out.sigma[i] = v * v;
    }
    return out;
}

/// S = sigma r2, pointwise.
inline RealGridFunction recover_S(const RealGridFunction& sigma, const RealGridFunction& r2) {
    if (sigma.size() != r2.size()) throw GridMismatch("recover_S: fields have different sizes");
    if (!(sigma.array() > 0.0).all()) throw NonPositiveSigma("recover_S needs positive conductivity");
    return sigma.cwiseProduct(r2);
}

struct OneFreqRecovery {
    SigmaRecovery sigma;
    RealGridFunction S;
};

/// sigma from Re Q through the same Dirichlet solve, S = sigma Im(Q) / omega.
inline OneFreqRecovery one_freq_recover(const Grid2D& grid, const GridFunction& Q, double omega,
                                        const KnownSigma& known) {
    if (omega == 0.0) throw ConfigError("one_freq_recover needs a nonzero frequency");
    OneFreqRecovery out;
    out.sigma = recover_sigma(grid, Q.real(), known);
    out.S = recover_S(out.sigma.sigma, Q.imag() / omega);
    return out;
}

/// Relative discrete L2 error ||a - b|| / ||b|| with trapezoid weights.
inline double relative_l2(const Grid2D& grid, const RealGridFunction& a, const RealGridFunction& b) {
    require_grid_function(grid, a.size(), "relative_l2");
    require_grid_function(grid, b.size(), "relative_l2");
    const Eigen::ArrayXd w = trapezoid_weights(grid).array();
    const double num = (w * (a - b).array().square()).sum();
    const double den = (w * b.array().square()).sum();
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace ibs::hydro
