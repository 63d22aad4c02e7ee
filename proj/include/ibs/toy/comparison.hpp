#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "ibs/born/methods.hpp"
#include "ibs/born/series.hpp"
#include "ibs/born/trace.hpp"
#include "ibs/numerics/io.hpp"
#include "ibs/toy/model.hpp"

namespace ibs::toy {

struct MethodCurve {
    std::string method;
    std::vector<ParamVector> iterates;  // x_0 .. x_steps
    ParamVector limit_proxy;            // one extra step
    std::vector<double> iterate_error;  // ||x_n - x_*||
    std::vector<double> residual;       // ||f(x_n) - f(x_true)||
};

struct ComparisonResult {
    MethodCurve ibs, gn, ch;
    born::IterationTrace ibs_trace, gn_trace, ch_trace;

    void write_csv(std::ostream& os) const {
        os << "method,step,iterate_error,residual\n";
        for (const MethodCurve* c : {&ibs, &gn, &ch})
            for (std::size_t n = 0; n < c->residual.size(); ++n)
                os << c->method << ',' << n << ',' << io::format_double(c->iterate_error[n]) << ','
                   << io::format_double(c->residual[n]) << '\n';
    }
};

namespace detail {

inline MethodCurve make_curve(const std::string& name, const ToyModel& model, const DataMatrix& f_true,
                              const std::vector<ParamVector>& path, int steps) {
    MethodCurve c;
    c.method = name;
    c.iterates.assign(path.begin(), path.begin() + steps + 1);
    c.limit_proxy = path[std::size_t(steps) + 1];
    for (const auto& x : c.iterates) {
        c.iterate_error.push_back(param_norm(x - c.limit_proxy));
        c.residual.push_back(data_norm(toy_forward(model.data(), x) - f_true));
    }
    return c;
}

inline std::vector<ParamVector> trace_path(const born::IterationTrace& t) {
    std::vector<ParamVector> out;
    for (const auto& s : t.steps) out.push_back(s.iterate);
    return out;
}

}  // namespace detail

/// Inverse series orders 1..steps, Gauss-Newton and Chebyshev-Halley with
/// `steps` iterations each, all from x_0 = 0 with noiseless data f(x_true).
/// The limit x_* of each method is proxied by one more step of that method.
inline ComparisonResult three_method_comparison(const ToyModel& model, double tau = 1e-6, int steps = 8) {
    if (steps < 1) throw ConfigError("the comparison needs at least one step");
    const ToyModel base = model.reexpand(ParamVector::Zero(model.param_dim()));
    const DataMatrix f_true = toy_forward(model.data(), model.x_true());
    const DataMatrix d = f_true - base.evaluate(base.expansion_point());
    const born::LinearInverse b1 = base.build_b1(tau);

    ComparisonResult r;
    born::InverseSeriesOptions series;
    series.series.max_order = std::max(born::kDefaultMaxOrder, steps + 1);
    r.ibs_trace = born::inverse_series_sum(base, b1, d, steps + 1, series).trace;
    r.gn_trace = born::gauss_newton_run(base, f_true, steps + 1, tau);
    r.ch_trace = born::chebyshev_halley_run(base, f_true, steps + 1, tau);
    r.ibs = detail::make_curve("ibs", base, f_true, detail::trace_path(r.ibs_trace), steps);
    r.gn = detail::make_curve("gn", base, f_true, detail::trace_path(r.gn_trace), steps);
    r.ch = detail::make_curve("ch", base, f_true, detail::trace_path(r.ch_trace), steps);
    return r;
}

/// Least-squares slope of log e_{n+1} against log e_n over consecutive pairs
/// that both lie above `floor`.  NaN when fewer than two pairs qualify.
inline double fitted_order(const std::vector<double>& e, double floor) {
    std::vector<double> xs, ys;
    for (std::size_t n = 0; n + 1 < e.size(); ++n) {
        if (e[n] > floor && e[n + 1] > floor) {
            xs.push_back(std::log(e[n]));
            ys.push_back(std::log(e[n + 1]));
        }
    }
    if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double k = double(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

/// Sample variance of log(v_{n+1} / v_n) over entries above `floor`.
inline double log_ratio_variance(const std::vector<double>& v, double floor) {
    std::vector<double> r;
    for (std::size_t n = 0; n + 1 < v.size(); ++n)
        if (v[n] > floor && v[n + 1] > floor) r.push_back(std::log(v[n + 1] / v[n]));
    if (r.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : r) mean += x;
    mean /= double(r.size());
    double var = 0.0;
    for (double x : r) var += (x - mean) * (x - mean);
    return var / double(r.size() - 1);
}

}  // namespace ibs::toy
