#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "ibs/bounds/green.hpp"
#include "ibs/numerics/errors.hpp"
#include "ibs/numerics/io.hpp"

namespace ibs::bounds {

/// Convergence constants of the inverse series for given mu, nu and ||b1||.
struct BoundsReport {
    double mu = 0.0;
    double nu = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double b1_norm = 0.0;
    double forward_radius = 0.0;
    double b1_condition = 0.0;
    double data_radius = 0.0;
    bool valid = false;

    /// (1 + alpha) mu ||b1||; the series coefficients are controlled when < 1.
    double contraction() const { return (1.0 + alpha) * mu * b1_norm; }

    /// Truncation error bound beta rho^{N+1} / (1 - rho), rho = contraction * ||d||.
    /// Infinite when the bound does not apply.
    double tail(int n_terms, double d_norm) const {
        const double rho = contraction() * d_norm;
        if (!valid || !(rho < 1.0)) return std::numeric_limits<double>::infinity();
        return beta * std::pow(rho, n_terms + 1) / (1.0 - rho);
    }

    void check() const {
        if (!valid) {
            throw ConditionViolated("(1 + alpha) mu ||b1|| = " + io::format_double(contraction()) +
                                    " is not below 1; the radii do not apply");
        }
    }
};

inline BoundsReport convergence_report(double mu, double nu, double b1_norm) {
    if (!(b1_norm > 0.0) || !std::isfinite(b1_norm)) throw ConditionViolated("||b1|| must be positive and finite");
    if (!(mu > 0.0) || !std::isfinite(mu) || !(nu >= 0.0) || !std::isfinite(nu)) {
        throw ConditionViolated("mu must be positive and nu nonnegative");
    }
    BoundsReport r;
    r.mu = mu;
    r.nu = nu;
    r.alpha = nu / mu;
    r.b1_norm = b1_norm;
    r.forward_radius = 1.0 / mu;
    r.b1_condition = 1.0 / ((1.0 + r.alpha) * mu);
    r.data_radius = r.b1_condition / b1_norm;
    const double c = r.contraction();
    r.valid = c < 1.0;
    r.beta = r.valid ? b1_norm * std::exp(1.0 / (1.0 - c)) : std::numeric_limits<double>::infinity();
    return r;
}

struct RadiusRow {
    double epsilon;
    double mu;
    double nu;
    double alpha;
    double data_radius;
};

struct RadiusOptions {
    int stride = kDefaultStride;
    double b1_norm = 1.0;
};

/// Data radius 1 / ((1 + alpha) mu ||b1||) for each epsilon on the grid's nodes.
inline std::vector<RadiusRow> radius_vs_epsilon(const Grid2D& grid, const GridFunction& q0,
                                                const std::vector<double>& eps_list, const Eigen::MatrixXd& wells,
                                                const RadiusOptions& opts = {}) {
    const GreenSweep sweep = green_sweep(grid, q0, eps_list, wells, opts.stride);
    std::vector<RadiusRow> rows;
    for (std::size_t e = 0; e < eps_list.size(); ++e) {
        const BoundsReport r = convergence_report(sweep.mu[e], sweep.nu[e], opts.b1_norm);
        rows.push_back({eps_list[e], r.mu, r.nu, r.alpha, r.data_radius});
    }
    return rows;
}

inline std::vector<RadiusRow> radius_vs_epsilon(const Grid2D& grid, const GridFunction& q0,
                                                const std::vector<double>& eps_list,
                                                const schrodinger::WellSet& wells = schrodinger::WellSet::standard(),
                                                const RadiusOptions& opts = {}) {
    return radius_vs_epsilon(grid, q0, eps_list, wells.node_values(grid), opts);
}

inline void write_radius_csv(std::ostream& os, const std::vector<RadiusRow>& rows) {
    os << "epsilon,mu,nu,alpha,data_radius\n";
    for (const auto& r : rows) {
        os << io::format_double(r.epsilon) << ',' << io::format_double(r.mu) << ',' << io::format_double(r.nu) << ','
           << io::format_double(r.alpha) << ',' << io::format_double(r.data_radius) << '\n';
    }
}

}  // namespace ibs::bounds
