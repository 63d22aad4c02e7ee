#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ibs/born/model.hpp"
#include "ibs/born/series.hpp"
#include "ibs/born/trace.hpp"

namespace ibs::born {

struct RunOptions {
    std::optional<ParamVector> truth;  // fills error_to_truth when present
    SeriesOptions series;
};

namespace detail {

template <ForwardModel M, class Step>
IterationTrace restarted_run(const M& model, const DataMatrix& y_meas, int iters, double tau, const RunOptions& opts,
                             Step&& step) {
    if (iters < 1) throw ConfigError("iteration count must be at least 1");
    IterationTrace trace;
    ParamVector x = model.expansion_point();
    M current = model.reexpand(x);
    DataMatrix fx = current.evaluate(x);
    trace.steps.push_back({0, x, data_norm(y_meas - fx), 0.0, current.solve_count(), std::nullopt});
    for (int n = 1; n <= iters; ++n) {
        const LinearInverse b1 = current.build_b1(tau);
        const DataMatrix r = y_meas - fx;
        const ParamVector dx = step(current, b1, r);
        x += dx;
        current = current.reexpand(x);
        fx = current.evaluate(x);
        trace.steps.push_back({n, x, data_norm(y_meas - fx), param_norm(dx), current.solve_count(), std::nullopt});
    }
    if (opts.truth) trace.set_truth(*opts.truth);
    return trace;
}

}  // namespace detail

/// Restarted inverse Born series RIBS(k): every outer step re-expands the
/// model at the current iterate and adds the order-k partial sum applied to
/// the current residual.
template <ForwardModel M>
IterationTrace ribs_run(const M& model, int k, const DataMatrix& y_meas, int iters, double tau,
                        const RunOptions& opts = {}) {
    if (k < 1) throw ConfigError("RIBS order must be at least 1");
    InverseSeriesOptions series_opts;
    series_opts.series = opts.series;
    series_opts.record_residuals = false;
    return detail::restarted_run(model, y_meas, iters, tau, opts, [&](const M& m, const LinearInverse& b1,
                                                                      const DataMatrix& r) {
        return inverse_series_sum(m, b1, r, k, series_opts).sum;
    });
}

template <ForwardModel M>
IterationTrace gauss_newton_run(const M& model, const DataMatrix& y_meas, int iters, double tau,
                                const RunOptions& opts = {}) {
    return detail::restarted_run(model, y_meas, iters, tau, opts,
                                 [](const M&, const LinearInverse& b1, const DataMatrix& r) { return b1.apply(r); });
}

/// Chebyshev-Halley in closed form: z = b1 r, x+ = x + z - b1 a_2(z, z).
template <ForwardModel M>
IterationTrace chebyshev_halley_run(const M& model, const DataMatrix& y_meas, int iters, double tau,
                                    const RunOptions& opts = {}) {
    return detail::restarted_run(model, y_meas, iters, tau, opts,
                                 [](const M& m, const LinearInverse& b1, const DataMatrix& r) {
                                     const ParamVector z = b1.apply(r);
                                     const std::vector<ParamVector> zz{z, z};
                                     return ParamVector(z - b1.apply(m.apply_a(std::span<const ParamVector>(zz))));
                                 });
}

}  // namespace ibs::born
