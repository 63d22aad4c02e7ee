#pragma once

#include <cmath>
#include <string>

#include "ibs/born/methods.hpp"
#include "ibs/born/series.hpp"
#include "ibs/numerics/errors.hpp"
#include "ibs/numerics/noise.hpp"
#include "ibs/numerics/transfer.hpp"
#include "ibs/schrodinger/model.hpp"

namespace ibs::schrodinger {

enum class MethodKind { InverseSeries, GaussNewton, ChebyshevHalley, Ribs };

/// Inversion method: `ibs-K` (series order K), `gn`, `ch` or `ribs-k`.
/// Iterative methods run `iterations` outer steps.
struct Method {
    MethodKind kind = MethodKind::InverseSeries;
    int order = 5;
    int iterations = 10;

    static Method parse(const std::string& text, int iterations = 10) {
        Method m;
        m.iterations = iterations;
        auto order_after = [&](std::size_t prefix) {
            std::size_t used = 0;
            int k = 0;
            try {
                k = std::stoi(text.substr(prefix), &used);
            } catch (const std::exception&) {
                throw ConfigError("bad method order in '" + text + "'");
            }
            if (used != text.size() - prefix || k < 1) throw ConfigError("bad method order in '" + text + "'");
            return k;
        };
        if (text == "gn") {
            m.kind = MethodKind::GaussNewton;
            m.order = 1;
        } else if (text == "ch") {
            m.kind = MethodKind::ChebyshevHalley;
            m.order = 2;
        } else if (text.rfind("ibs-", 0) == 0) {
            m.kind = MethodKind::InverseSeries;
            m.order = order_after(4);
        } else if (text.rfind("ribs-", 0) == 0) {
            m.kind = MethodKind::Ribs;
            m.order = order_after(5);
        } else {
            throw ConfigError("unknown method '" + text + "' (expected ibs-K, gn, ch or ribs-k)");
        }
        if (m.iterations < 1) throw ConfigError("iteration count must be at least 1");
        return m;
    }

    std::string name() const {
        switch (kind) {
            case MethodKind::InverseSeries: return "ibs-" + std::to_string(order);
            case MethodKind::GaussNewton: return "gn";
            case MethodKind::ChebyshevHalley: return "ch";
            case MethodKind::Ribs: return "ribs-" + std::to_string(order);
        }
        return "?";
    }
};

/// SVD threshold for a relative noise level: 0.01 without noise, 0.02 up to
/// 1% and 0.06 above.
inline double default_tau(double noise) {
    if (noise < 0.0) throw ConfigError("noise level must be nonnegative");
    if (noise == 0.0) return 0.01;
    return noise <= 0.01 ? 0.02 : 0.06;
}

struct Reconstruction {
    std::string method;
    double tau = 0.0;
    GridFunction q;  // coarse node values
    born::IterationTrace trace;
    double initial_misfit = 0.0;
    double final_misfit = 0.0;

    double misfit_reduction() const { return initial_misfit > 0.0 ? 1.0 - final_misfit / initial_misfit : 0.0; }
};

/// d = f(q) - f(q0) on the synthesis grid.
template <class Wells>
DataMatrix synthesize_difference(const Grid2D& fine, const GridFunction& q, const GridFunction& q0,
                                 const Wells& wells) {
    return forward_map(fine, q, wells) - forward_map(fine, q0, wells);
}

/// Inverts the data difference `d` on `coarse` about the background q0.  The
/// target for iterative methods is F(q0) + d.
template <class Wells>
Reconstruction reconstruct(const Grid2D& coarse, const GridFunction& q0, const Wells& wells, const DataMatrix& d,
                           const Method& method, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must lie in (0, 1)");
    const SchrodingerModel model(coarse, q0, wells);
    const DataMatrix f0 = model.evaluate(model.expansion_point());
    const DataMatrix y = f0 + d;

    Reconstruction r;
    r.method = method.name();
    r.tau = tau;
    switch (method.kind) {
        case MethodKind::InverseSeries: {
            born::InverseSeriesOptions opts;
            opts.series.max_order = std::max(opts.series.max_order, method.order);
            opts.record_residuals = false;
            r.trace = born::inverse_series_sum(model, model.build_b1(tau), d, method.order, opts).trace;
            break;
        }
        case MethodKind::GaussNewton: r.trace = born::gauss_newton_run(model, y, method.iterations, tau); break;
        case MethodKind::ChebyshevHalley:
            r.trace = born::chebyshev_halley_run(model, y, method.iterations, tau);
            break;
        case MethodKind::Ribs: r.trace = born::ribs_run(model, method.order, y, method.iterations, tau); break;
    }
    ParamVector x = r.trace.final_iterate();
    if (method.kind == MethodKind::InverseSeries) {
        x += model.expansion_point();
        for (auto& s : r.trace.steps) s.residual_norm = data_norm(y - model.evaluate(model.expansion_point() + s.iterate));
    }
    r.q = model.potential(x);
    r.initial_misfit = data_norm(d);
    r.final_misfit = data_norm(y - model.evaluate(x));
    return r;
}

/// Two-grid protocol: data synthesized on `fine` (plus noise), inverted on
/// `coarse` with the background and wells sampled there.
struct TwoGridProblem {
    Grid2D fine, coarse;
    GridFunction q_true_fine, q0_fine;
    WellSet wells = WellSet::standard();
    double noise = 0.0;
    std::uint64_t seed = 1;

    DataMatrix data() const {
        return add_gaussian_noise(synthesize_difference(fine, q_true_fine, q0_fine, wells), noise, seed);
    }
    GridFunction q0_coarse() const { return restrict_fine_to_coarse(q0_fine, fine, coarse); }
    GridFunction q_true_coarse() const { return restrict_fine_to_coarse(q_true_fine, fine, coarse); }

    Reconstruction solve(const Method& method, double tau) const {
        return reconstruct(coarse, q0_coarse(), wells, data(), method, tau);
    }
};

/// Cosine similarity of two fields over the support of `grid`.
inline double support_cosine(const Grid2D& grid, const GridFunction& a, const GridFunction& b) {
    const ParamVector x = support_values(grid, a), y = support_values(grid, b);
    const double nx = x.norm(), ny = y.norm();
    if (nx == 0.0 || ny == 0.0) return 0.0;
    return std::real(x.dot(y)) / (nx * ny);
}

/// Smooth real test potential with values in [-14, 4], vanishing within
/// distance 0.1 of the boundary.
inline double smooth_test_potential(double x, double y) {
    return -14.0 * bump_profile(std::hypot(x - 0.4, y - 0.55) / 0.25) +
           4.0 * bump_profile(std::hypot(x - 0.68, y - 0.32) / 0.17);
}

/// Piecewise constant real test potential with values in {-6, 0, 12}: a
/// square of height 12 and a disk of depth -6, both inside [0.2, 0.8]^2.
inline double piecewise_test_potential(double x, double y) {
    if (x >= 0.25 && x <= 0.45 && y >= 0.5 && y <= 0.75) return 12.0;
    if (std::hypot(x - 0.65, y - 0.35) <= 0.12) return -6.0;
    return 0.0;
}

}  // namespace ibs::schrodinger
