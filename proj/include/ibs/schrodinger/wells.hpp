#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <vector>

#include "ibs/numerics/grid.hpp"

namespace ibs::schrodinger {

/// Standard mollifier exp(1 - 1/(1 - r^2)) for r < 1, else 0.  Peak value 1.
inline double bump_profile(double r) {
    const double r2 = r * r;
    return r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
}

/// Well functions phi_i(x) = scale * bump(|x - c_i| / radius).
struct WellSet {
    std::vector<std::array<double, 2>> centers;
    double radius = 0.05;
    double scale = 1.0;

    /// 16 wells at (0.2m, 0.2n), m, n = 1..4; n is the outer index.
    static WellSet standard(double radius = 0.05) {
        WellSet w;
        w.radius = radius;
        for (int n = 1; n <= 4; ++n)
            for (int m = 1; m <= 4; ++m) w.centers.push_back({0.2 * m, 0.2 * n});
        return w;
    }

    int count() const { return int(centers.size()); }

    double value(int i, double x, double y) const {
        const auto& c = centers[std::size_t(i)];
        return scale * bump_profile(std::hypot(x - c[0], y - c[1]) / radius);
    }

    /// node_count x N matrix of nodal well values.
    Eigen::MatrixXd node_values(const Grid2D& grid) const {
        Eigen::MatrixXd out(grid.node_count(), count());
        for (int i = 0; i < count(); ++i) {
            out.col(i) = grid.sample_real([&](double x, double y) { return value(i, x, y); });
        }
        return out;
    }

    /// Nodes where at least one well function is positive.
    std::vector<bool> support_mask(const Grid2D& grid) const {
        const Eigen::MatrixXd v = node_values(grid);
        std::vector<bool> mask(std::size_t(grid.node_count()), false);
        for (Eigen::Index r = 0; r < v.rows(); ++r) mask[std::size_t(r)] = (v.row(r).array() > 0.0).any();
        return mask;
    }
};

}  // namespace ibs::schrodinger
