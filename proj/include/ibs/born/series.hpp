#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ibs/born/model.hpp"
#include "ibs/born/trace.hpp"
#include "ibs/numerics/errors.hpp"

namespace ibs::born {

inline constexpr int kDefaultMaxOrder = 8;

using Composition = std::vector<int>;

/// Every ordered composition of n except the all-ones one, in lexicographic
/// order.
inline std::vector<Composition> series_compositions(int n) {
    std::vector<Composition> out;
    Composition cur;
    auto rec = [&](auto&& self, int remaining) -> void {
        if (remaining == 0) {
            if (int(cur.size()) != n) out.push_back(cur);
            return;
        }
        for (int s = 1; s <= remaining; ++s) {
            cur.push_back(s);
            self(self, remaining - s);
            cur.pop_back();
        }
    };
    if (n >= 1) rec(rec, n);
    return out;
}

struct SeriesOptions {
    int max_order = kDefaultMaxOrder;
    bool memoize = true;
};

struct SeriesCounters {
    std::int64_t b1_applications = 0;
    std::int64_t a_applications = 0;
    std::int64_t b_applications = 0;       // b_m evaluations with m >= 2, at any depth
    std::int64_t top_level_b_calls = 0;    // inner b_m calls issued directly by the outermost b_n
};

/// Evaluates the multilinear inverse coefficients b_n.  Every data matrix and
/// parameter vector seen during one evaluator's lifetime is interned, and
/// with memoization on, b1, a_s and b_m applications are cached by the ids of
/// their arguments.
template <ForwardModel M>
class SeriesEvaluator {
public:
    SeriesEvaluator(const M& model, const LinearInverse& b1, SeriesOptions opts = {})
        : model_(model), b1_(b1), opts_(opts) {}

    int intern(const DataMatrix& d) {
        data_.push_back(d);
        return int(data_.size()) - 1;
    }

    const DataMatrix& data(int id) const { return data_[std::size_t(id)]; }
    const ParamVector& param(int id) const { return params_[std::size_t(id)]; }
    const SeriesCounters& counters() const { return counters_; }

    /// b_n applied to the interned data arguments; returns a parameter id.
    int b(const std::vector<int>& args) { return b_impl(args, 0); }

    ParamVector apply(const std::vector<int>& args) { return param(b(args)); }

private:
    int new_param(ParamVector p) {
        params_.push_back(std::move(p));
        return int(params_.size()) - 1;
    }

    int b1_of(int data_id) {
        if (opts_.memoize) {
            if (auto it = b1_memo_.find(data_id); it != b1_memo_.end()) return it->second;
        }
        ++counters_.b1_applications;
        const int id = new_param(b1_.apply(data(data_id)));
        if (opts_.memoize) b1_memo_[data_id] = id;
        return id;
    }

    int a_of(const std::vector<int>& param_ids) {
        if (opts_.memoize) {
            if (auto it = a_memo_.find(param_ids); it != a_memo_.end()) return it->second;
        }
        ++counters_.a_applications;
        std::vector<ParamVector> args;
        args.reserve(param_ids.size());
        for (int id : param_ids) args.push_back(param(id));
        const int id = intern(model_.apply_a(std::span<const ParamVector>(args)));
        if (opts_.memoize) a_memo_[param_ids] = id;
        return id;
    }

    int b_impl(const std::vector<int>& args, int depth) {
        const int n = int(args.size());
        if (n < 1) throw CompositionOverflow("b_n needs at least one argument");
        if (n > opts_.max_order) {
            throw CompositionOverflow("series order " + std::to_string(n) + " exceeds the maximum " +
                                      std::to_string(opts_.max_order));
        }
        if (n == 1) return b1_of(args[0]);
        if (opts_.memoize) {
            if (auto it = b_memo_.find(args); it != b_memo_.end()) return it->second;
        }
        ++counters_.b_applications;
        std::vector<int> z(args.size());
        for (std::size_t i = 0; i < args.size(); ++i) z[i] = b1_of(args[i]);

        ParamVector sum = ParamVector::Zero(b1_.param_dim());
        for (const auto& comp : compositions(n)) {
            std::vector<int> y;
            y.reserve(comp.size());
            std::size_t offset = 0;
            for (int s : comp) {
                y.push_back(a_of(std::vector<int>(z.begin() + std::ptrdiff_t(offset),
                                                  z.begin() + std::ptrdiff_t(offset + std::size_t(s)))));
                offset += std::size_t(s);
            }
            if (depth == 0) ++counters_.top_level_b_calls;
            sum += param(b_impl(y, depth + 1));
        }
        const int id = new_param(-sum);
        if (opts_.memoize) b_memo_[args] = id;
        return id;
    }

    const std::vector<Composition>& compositions(int n) {
        auto it = comp_cache_.find(n);
        if (it == comp_cache_.end()) it = comp_cache_.emplace(n, series_compositions(n)).first;
        return it->second;
    }

    const M& model_;
    const LinearInverse& b1_;
    SeriesOptions opts_;
    SeriesCounters counters_;
    std::vector<DataMatrix> data_;
    std::vector<ParamVector> params_;
    std::map<int, int> b1_memo_;
    std::map<std::vector<int>, int> a_memo_;
    std::map<std::vector<int>, int> b_memo_;
    std::map<int, std::vector<Composition>> comp_cache_;
};

/// Sum of the first N forward Born terms a_n(h, ..., h).
template <ForwardModel M>
DataMatrix forward_series_sum(const M& model, const ParamVector& h, int N) {
    if (N < 1) throw CompositionOverflow("forward_series_sum needs N >= 1");
    DataMatrix sum = DataMatrix::Zero(model.data_rows(), model.data_cols());
    for (int n = 1; n <= N; ++n) {
        std::vector<ParamVector> args(std::size_t(n), h);
        sum += model.apply_a(std::span<const ParamVector>(args));
    }
    return sum;
}

/// b_n applied to n data matrices.
template <ForwardModel M>
ParamVector apply_b_n(const M& model, const LinearInverse& b1, std::span<const DataMatrix> args,
                      SeriesOptions opts = {}, SeriesCounters* counters = nullptr) {
    SeriesEvaluator<M> ev(model, b1, opts);
    std::vector<int> ids;
    for (const auto& d : args) ids.push_back(ev.intern(d));
    ParamVector out = ev.apply(ids);
    if (counters) *counters = ev.counters();
    return out;
}

template <ForwardModel M>
ParamVector apply_b_n(const M& model, const LinearInverse& b1, const std::vector<DataMatrix>& args,
                      SeriesOptions opts = {}, SeriesCounters* counters = nullptr) {
    return apply_b_n(model, b1, std::span<const DataMatrix>(args), opts, counters);
}

struct InverseSeriesResult {
    ParamVector sum;
    std::vector<ParamVector> terms;  // b_n(d, ..., d), n = 1..K
    IterationTrace trace;            // step n holds the partial sum of order n
    SeriesCounters counters;
};

struct InverseSeriesOptions {
    SeriesOptions series;
    /// Evaluate ||d - (f(x0 + x_n) - f(x0))|| for every partial sum.
    bool record_residuals = true;
    /// Always evaluate b_n(d, ..., d) through SeriesEvaluator.
    bool force_recursion = false;
};

/// True when b1 a_1 b1 = b1 holds on b1(d) and on a random probe, to 1e-9
/// relative.
template <ForwardModel M>
bool is_reflexive_inverse(const M& model, const LinearInverse& b1, const DataMatrix& d) {
    NormalStream rng(17);
    DataMatrix probe(b1.data_rows(), b1.data_cols());
    for (Eigen::Index c = 0; c < probe.cols(); ++c)
        for (Eigen::Index r = 0; r < probe.rows(); ++r) probe(r, c) = cplx(rng.normal(), rng.normal());
    for (const DataMatrix* y : {&d, static_cast<const DataMatrix*>(&probe)}) {
        const ParamVector v = b1.apply(*y);
        const std::vector<ParamVector> arg{v};
        const ParamVector w = b1.apply(model.apply_a(std::span<const ParamVector>(arg)));
        if (param_norm(w - v) > 1e-9 * std::max(param_norm(v), 1e-300)) return false;
    }
    return true;
}

/// Terms x_n = b_n(d, ..., d), n = 1..K, for a reflexive b1 (b1 a_1 b1 = b1):
/// x_1 = b1 d and x_n = -b1 sum a_m(x_{k_1}, ..., x_{k_m}) over the ordered
/// compositions (k_1, ..., k_m) of n with m >= 2.  Each composition is
/// evaluated once.
template <ForwardModel M>
std::vector<ParamVector> diagonal_series_terms(const M& model, const LinearInverse& b1, const DataMatrix& d, int K,
                                               SeriesCounters& counters) {
    std::vector<ParamVector> x;
    x.push_back(b1.apply(d));
    ++counters.b1_applications;
    std::vector<ParamVector> args;
    for (int n = 2; n <= K; ++n) {
        std::vector<Composition> comps = series_compositions(n);
        comps.erase(comps.end() - 1);            // drop (n)
        comps.push_back(Composition(std::size_t(n), 1));
        DataMatrix acc = DataMatrix::Zero(model.data_rows(), model.data_cols());
        for (const auto& comp : comps) {
            args.clear();
            for (int k : comp) args.push_back(x[std::size_t(k - 1)]);
            acc += model.apply_a(std::span<const ParamVector>(args));
            ++counters.a_applications;
        }
        x.push_back(-b1.apply(acc));
        ++counters.b1_applications;
    }
    return x;
}

/// Partial sums of the inverse Born series sum_{n<=K} b_n(d, ..., d) about the
/// model's expansion point.
template <ForwardModel M>
InverseSeriesResult inverse_series_sum(const M& model, const LinearInverse& b1, const DataMatrix& d, int K,
                                       InverseSeriesOptions opts = {}) {
    if (K < 1) throw CompositionOverflow("inverse_series_sum needs K >= 1");
    if (K > opts.series.max_order) {
        throw CompositionOverflow("series order " + std::to_string(K) + " exceeds the maximum " +
                                  std::to_string(opts.series.max_order));
    }
    InverseSeriesResult res;
    SeriesEvaluator<M> ev(model, b1, opts.series);
    const int did = ev.intern(d);
    std::vector<ParamVector> direct;
    if (!opts.force_recursion && K > 2 && is_reflexive_inverse(model, b1, d)) {
        direct = diagonal_series_terms(model, b1, d, K, res.counters);
    }
    const ParamVector x0 = model.expansion_point();
    DataMatrix f0;
    if (opts.record_residuals) f0 = model.evaluate(x0);

    res.sum = ParamVector::Zero(model.param_dim());
    res.trace.steps.push_back({0, res.sum, data_norm(d), 0.0, model.solve_count(), std::nullopt});
    for (int n = 1; n <= K; ++n) {
        ParamVector term = direct.empty() ? ev.apply(std::vector<int>(std::size_t(n), did)) : direct[std::size_t(n - 1)];
        res.sum += term;
        TraceStep step;
        step.step = n;
        step.iterate = res.sum;
        step.step_norm = param_norm(term);
        if (opts.record_residuals) step.residual_norm = data_norm(d - (model.evaluate(x0 + res.sum) - f0));
        step.solve_count = model.solve_count();
        res.terms.push_back(std::move(term));
        res.trace.steps.push_back(std::move(step));
    }
    if (direct.empty()) res.counters = ev.counters();
    return res;
}

}  // namespace ibs::born
