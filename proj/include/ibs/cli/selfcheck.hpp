#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "ibs/hydro/aquifer.hpp"
#include "ibs/hydro/recovery.hpp"
#include "ibs/numerics/io.hpp"
#include "ibs/numerics/noise.hpp"
#include "ibs/schrodinger/model.hpp"
#include "ibs/toy/comparison.hpp"

namespace ibs::cli {

struct CheckResult {
    std::string name;
    double value;
    double limit;
    bool passed() const { return value <= limit; }
};

namespace detail {

inline double rel_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    const double s = std::max(a.norm(), b.norm());
    return s == 0.0 ? 0.0 : (a - b).norm() / s;
}

inline ParamVector random_params(Eigen::Index n, std::uint64_t seed, double scale) {
    NormalStream rng(seed);
    ParamVector x(n);
    for (auto& v : x) v = scale * rng.normal();
    return x;
}

}  // namespace detail

/// Fast structural invariants of every model.  Each check reports a
/// nonnegative defect and the largest value it accepts.
inline std::vector<CheckResult> selfcheck() {
    std::vector<CheckResult> out;

    const toy::ComparisonResult cmp = toy::three_method_comparison(toy::ToyModel(toy::ToyData::generate()), 1e-6, 3);
    out.push_back({"toy gauss-newton step equals first-order series",
                   param_norm(cmp.gn.iterates[1] - cmp.ibs.iterates[1]) / param_norm(cmp.ibs.iterates[1]), 1e-10});
    out.push_back({"toy chebyshev-halley step equals second-order series",
                   param_norm(cmp.ch.iterates[1] - cmp.ibs.iterates[2]) / param_norm(cmp.ibs.iterates[2]), 1e-10});

    {
        const Grid2D g(10, 0.1);
        const schrodinger::SchrodingerModel m(g, GridFunction::Zero(g.node_count()), schrodinger::WellSet::standard());
        const ParamVector x = detail::random_params(m.param_dim(), 3, 2.0);
        const ParamVector v = detail::random_params(m.param_dim(), 4, 1.0);
        const auto mx = m.reexpand(x);
        const Eigen::VectorXcd jv = mx.jacobian() * v;
        const double t = 1e-4;
        const DataMatrix fd = (m.evaluate(x + t * v) - m.evaluate(x - t * v)) / (2.0 * t);
        out.push_back({"schrodinger jacobian matches central differences",
                       (born::flatten(fd) - jv).norm() / jv.norm(), 1e-6});
    }
    {
        const Grid2D g(20, 0.1);
        const GridFunction q = embed_support(g, detail::random_params(g.support_size(), 5, 5.0).real().cast<cplx>());
        const DataMatrix d = schrodinger::forward_map(g, q, schrodinger::WellSet::standard().node_values(g));
        out.push_back({"schrodinger data are symmetric", detail::rel_diff(d, d.transpose()), 1e-12});
    }
    {
        const Grid2D g(40);
        const hydro::AquiferParams p = hydro::AquiferField::demo().sample(g);
        const auto wells = schrodinger::WellSet::standard();
        const hydro::FreqMeasurement m = hydro::hydro_forward(g, p, 10.0, wells);
        const DataMatrix d = schrodinger::forward_map(g, hydro::liouville_potential(g, p, 10.0).Q,
                                                      hydro::liouville_wells(g, p.sigma, wells));
        out.push_back({"liouville transform reproduces hydraulic data", detail::rel_diff(-m.Mhat, d), 1e-2});

        const hydro::SplitResult s = hydro::two_freq_split(hydro::liouville_potential(g, p, 1.0).Q,
                                                           hydro::liouville_potential(g, p, 10.0).Q, 1.0, 10.0);
        const RealGridFunction S = hydro::recover_S(p.sigma, s.r2);
        out.push_back({"two-frequency split recovers storage", (S - p.S).cwiseAbs().maxCoeff(), 1e-10});
        const hydro::SigmaRecovery sg =
            hydro::recover_sigma(g, s.r1, hydro::KnownSigma::from_truth(g, p.sigma, wells));
        out.push_back({"conductivity recovery inverts the transform", (sg.sigma - p.sigma).cwiseAbs().maxCoeff(), 1e-8});
    }
    return out;
}

inline bool print_selfcheck(std::ostream& os, const std::vector<CheckResult>& checks) {
    bool ok = true;
    for (const auto& c : checks) {
        os << (c.passed() ? "PASS " : "FAIL ") << c.name << "  defect=" << io::format_double(c.value)
           << " limit=" << io::format_double(c.limit) << '\n';
        ok = ok && c.passed();
    }
    return ok;
}

}  // namespace ibs::cli
