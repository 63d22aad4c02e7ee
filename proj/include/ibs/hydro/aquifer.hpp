#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ibs/numerics/errors.hpp"
#include "ibs/numerics/grid.hpp"
#include "ibs/numerics/noise.hpp"
#include "ibs/numerics/sparse.hpp"
#include "ibs/numerics/types.hpp"
#include "ibs/schrodinger/wells.hpp"

namespace ibs::hydro {

/// Nodal conductivity sigma and storage coefficient S.
struct AquiferParams {
    RealGridFunction sigma;
    RealGridFunction S;

    void validate(const Grid2D& grid) const {
        require_grid_function(grid, sigma.size(), "AquiferParams sigma");
        require_grid_function(grid, S.size(), "AquiferParams S");
        if (!(sigma.array() > 0.0).all()) throw NonPositiveSigma("conductivity must be positive at every node");
    }
};

/// Mhat_ij(omega) = int phi_j u_i for the frequency-domain head u_i.
struct FreqMeasurement {
    double omega = 0.0;
    DataMatrix Mhat;
};

/// Q = Delta sigma^{1/2} / sigma^{1/2} + i omega S / sigma at the nodes.
struct ComplexPotential {
    GridFunction Q;
    double omega = 0.0;
};

/// Smooth bump a * exp(1 - 1/(1 - r^2)), r = |x - c| / radius.
struct Bump {
    std::array<double, 2> center{0.5, 0.5};
    double radius = 0.2;
    double amplitude = 0.0;

    double operator()(double x, double y) const {
        return amplitude * schrodinger::bump_profile(std::hypot(x - center[0], y - center[1]) / radius);
    }
};

/// Continuous aquifer: sigma = 1 + sum of bumps, S = sum of bumps.  Both
/// equal their reference values (1 and 0) near the boundary.
struct AquiferField {
    std::vector<Bump> sigma_bumps;
    std::vector<Bump> S_bumps;

    double sigma(double x, double y) const {
        double v = 1.0;
        for (const auto& b : sigma_bumps) v += b(x, y);
        return v;
    }
    double S(double x, double y) const {
        double v = 0.0;
        for (const auto& b : S_bumps) v += b(x, y);
        return v;
    }

    AquiferParams sample(const Grid2D& grid) const {
        AquiferParams p{grid.sample_real([&](double x, double y) { return sigma(x, y); }),
                        grid.sample_real([&](double x, double y) { return S(x, y); })};
        p.validate(grid);
        return p;
    }

    /// Moderate-contrast field used by the demo runs.
    static AquiferField demo() {
        AquiferField f;
        f.sigma_bumps = {{{0.38, 0.6}, 0.22, 0.3}, {{0.64, 0.36}, 0.22, -0.3}};
        f.S_bumps = {{{0.35, 0.35}, 0.22, 3.0}, {{0.62, 0.62}, 0.22, -3.0}};
        return f;
    }

    /// Three sigma and three S bumps with centers in [0.3, 0.7]^2 and radii in
    /// [0.12, 0.2], rescaled so that |1 - sigma| <= sigma_dev and S lies in
    /// [s_min, s_max] on a 101 x 101 sample.
    static AquiferField random(std::uint64_t seed, double sigma_dev = 0.7, double s_min = -5.0, double s_max = 3.0) {
        NormalStream rng(seed);
        AquiferField f;
        auto draw = [&](std::vector<Bump>& out, double lo, double hi) {
            for (int k = 0; k < 3; ++k) {
                Bump b;
                b.center = {0.3 + 0.4 * rng.uniform(), 0.3 + 0.4 * rng.uniform()};
                b.radius = 0.12 + 0.08 * rng.uniform();
                b.amplitude = lo + (hi - lo) * rng.uniform();
                out.push_back(b);
            }
        };
        draw(f.sigma_bumps, -sigma_dev, sigma_dev);
        draw(f.S_bumps, s_min, s_max);
        const Grid2D probe(100);
        const auto p = probe.sample_real([&](double x, double y) { return f.sigma(x, y) - 1.0; });
        const auto s = probe.sample_real([&](double x, double y) { return f.S(x, y); });
        const double sigma_scale = std::min(1.0, sigma_dev / std::max(p.cwiseAbs().maxCoeff(), 1e-300));
        double s_scale = 1.0;
        if (s.maxCoeff() > s_max) s_scale = std::min(s_scale, s_max / s.maxCoeff());
        if (s.minCoeff() < s_min) s_scale = std::min(s_scale, s_min / s.minCoeff());
        for (auto& b : f.sigma_bumps) b.amplitude *= sigma_scale;
        for (auto& b : f.S_bumps) b.amplitude *= s_scale;
        return f;
    }
};

/// Interior matrix of div(sigma grad .) - i omega S with homogeneous
/// Dirichlet rows eliminated.  Edge conductivities are the means of the two
/// adjacent node values.
inline SparseMatrix hydro_matrix(const Grid2D& grid, const AquiferParams& params, double omega) {
    params.validate(grid);
    const int n = grid.n_cells();
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    const auto& sg = params.sigma;
    auto edge = [&](int k0, int l0, int k1, int l1) { return 0.5 * (sg[grid.node(k0, l0)] + sg[grid.node(k1, l1)]); };
    std::vector<Eigen::Triplet<cplx>> t;
    t.reserve(std::size_t(grid.interior_count()) * 5);
    for (int l = 1; l < n; ++l) {
        for (int k = 1; k < n; ++k) {
            const Eigen::Index row = grid.interior(k, l);
            const std::array<std::array<int, 2>, 4> nb{{{k + 1, l}, {k - 1, l}, {k, l + 1}, {k, l - 1}}};
            double diag = 0.0;
            for (const auto& [kk, ll] : nb) {
                const double s = edge(k, l, kk, ll) * inv_h2;
                diag -= s;
                if (grid.is_interior(kk, ll)) t.emplace_back(row, grid.interior(kk, ll), s);
            }
            t.emplace_back(row, row, cplx(diag, -omega * params.S[grid.node(k, l)]));
        }
    }
    SparseMatrix m(grid.interior_count(), grid.interior_count());
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

/// Solves div(sigma grad u_i) - i omega S u_i = phi_i with u_i = 0 on the
/// boundary and returns Mhat_ij = trapezoid integral of phi_j u_i.
inline FreqMeasurement hydro_forward(const Grid2D& grid, const AquiferParams& params, double omega,
                                     const schrodinger::WellSet& wells) {
    const SparseOperator op(hydro_matrix(grid, params, omega));
    Eigen::MatrixXcd phi(grid.interior_count(), wells.count());
    const Eigen::MatrixXd nodes = wells.node_values(grid);
    for (int l = 1; l < grid.n_cells(); ++l)
        for (int k = 1; k < grid.n_cells(); ++k) phi.row(grid.interior(k, l)) = nodes.row(grid.node(k, l)).cast<cplx>();
    const Eigen::MatrixXcd u = op.solve(phi);
    return {omega, grid.h() * grid.h() * (u.transpose() * phi)};
}

/// Q = (Delta_h s) / s + i omega S / sigma with s = sigma^{1/2}.  Boundary
/// nodes carry only the storage term.
inline ComplexPotential liouville_potential(const Grid2D& grid, const AquiferParams& params, double omega) {
    params.validate(grid);
    const RealGridFunction s = params.sigma.cwiseSqrt();
    const RealGridFunction lap = discrete_laplacian(grid, s);
    ComplexPotential out{GridFunction(grid.node_count()), omega};
    for (Eigen::Index i = 0; i < out.Q.size(); ++i)
        out.Q[i] = cplx(lap[i] / s[i], omega * params.S[i] / params.sigma[i]);
    return out;
}

/// Effective Schrodinger wells phi_i / sigma^{1/2} as a node_count x N matrix.
inline Eigen::MatrixXd liouville_wells(const Grid2D& grid, const RealGridFunction& sigma,
                                       const schrodinger::WellSet& wells) {
    require_grid_function(grid, sigma.size(), "liouville_wells");
    if (!(sigma.array() > 0.0).all()) throw NonPositiveSigma("conductivity must be positive at every node");
    Eigen::MatrixXd w = wells.node_values(grid);
    return sigma.cwiseSqrt().cwiseInverse().asDiagonal() * w;
}

}  // namespace ibs::hydro
