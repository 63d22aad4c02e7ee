#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "ibs/born/model.hpp"
#include "ibs/numerics/errors.hpp"
#include "ibs/numerics/noise.hpp"

namespace ibs::bounds {

template <class M>
concept HasSlotGradient = requires(const M& m, std::span<const ParamVector> args, int slot, Eigen::Index i) {
    { m.slot_gradient(args, slot, i, i) } -> std::convertible_to<ParamVector>;
};

struct ProbeOptions {
    int refine_sweeps = 3;  // phase-alignment sweeps when the model exposes slot gradients
};

/// Randomized lower bound on the operator norm of a_n from sup-norm tuples to
/// the entrywise max-modulus norm.  Each trial draws unit-modulus entries with
/// random phases.  For models with slot gradients, the best trial is refined
/// by coordinate ascent: each slot is replaced by the phase-conjugate of the
/// gradient of the largest entry, which never decreases that entry.
template <born::ForwardModel M>
double operator_norm_probe(const M& model, int n, int trials, std::uint64_t seed, const ProbeOptions& opts = {}) {
    if (n < 1) throw ConfigError("probe order must be at least 1");
    if (trials < 1) throw ConfigError("probe needs at least one trial");
    const Eigen::Index p = model.param_dim();
    NormalStream rng(seed);
    std::vector<ParamVector> best;
    double best_value = -1.0;
    Eigen::Index bi = 0, bj = 0;
    for (int t = 0; t < trials; ++t) {
        std::vector<ParamVector> args(static_cast<std::size_t>(n), ParamVector(p));
        for (auto& a : args)
            for (Eigen::Index k = 0; k < p; ++k) a[k] = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
        const DataMatrix v = model.apply_a(std::span<const ParamVector>(args));
        Eigen::Index i = 0, j = 0;
        const double value = v.cwiseAbs().maxCoeff(&i, &j);
        if (value > best_value) {
            best_value = value;
            best = std::move(args);
            bi = i;
            bj = j;
        }
    }
    if constexpr (HasSlotGradient<M>) {
        for (int sweep = 0; sweep < opts.refine_sweeps; ++sweep) {
            for (int s = 0; s < n; ++s) {
                const ParamVector g = model.slot_gradient(std::span<const ParamVector>(best), s, bi, bj);
                ParamVector next(p);
                for (Eigen::Index k = 0; k < p; ++k) {
                    const double m = std::abs(g[k]);
                    next[k] = m > 0.0 ? std::conj(g[k]) / m : cplx(1.0, 0.0);
                }
                best[std::size_t(s)] = std::move(next);
            }
        }
        const DataMatrix v = model.apply_a(std::span<const ParamVector>(best));
        best_value = std::max(best_value, v.cwiseAbs().maxCoeff());
    }
    return best_value;
}

}  // namespace ibs::bounds
