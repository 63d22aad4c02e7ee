// One line per criterion: PASS/FAIL, the measured quantities, wall time and
// the time budget.  Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ibs/born.hpp"
#include "ibs/bounds.hpp"
#include "ibs/hydro.hpp"
#include "ibs/schrodinger.hpp"
#include "ibs/toy.hpp"

using namespace ibs;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<Outcome()> run;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

bool nondecreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[i - 1]) return false;
    return true;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
    return s;
}

GridFunction zero(const Grid2D& g) { return GridFunction::Zero(g.node_count()); }

// Reversion of h + h^2: b_n = (-1)^(n-1) Catalan(n-1) from the closed form
// of the root h = (sqrt(1 + 4d) - 1) / 2.
Outcome reversion_oracle() {
    const auto m = born::PolynomialModel::scalar({1.0, 1.0});
    const auto b1 = m.build_b1(0.5);
    const double d = 0.7;
    double worst = 0.0;
    double catalan = 1.0;
    std::vector<double> got;
    for (int n = 1; n <= 6; ++n) {
        const double expected = (n % 2 ? 1.0 : -1.0) * catalan;
        std::vector<DataMatrix> args(std::size_t(n), DataMatrix::Constant(1, 1, d));
        const double b = born::apply_b_n(m, b1, args)[0].real() / std::pow(d, n);
        got.push_back(b);
        worst = std::max(worst, std::abs(b - expected));
        catalan = catalan * 2.0 * (2.0 * n - 1.0) / (n + 1.0);
    }
    return {worst <= 1e-12, "b = (" + join(got) + "), max error " + fmt(worst)};
}

Outcome left_inverse_order() {
    const auto m = born::PolynomialModel::random(4, 2, 2, 3, 0.5, 2024);
    const auto b1 = m.build_b1(1e-12);
    NormalStream rng(5);
    ParamVector dir(4);
    for (auto& e : dir) e = cplx(rng.normal(), rng.normal());
    dir /= param_norm(dir);
    const DataMatrix f0 = m.evaluate(ParamVector::Zero(4));
    bool ok = true;
    std::vector<double> slopes;
    for (int K = 1; K <= 4; ++K) {
        std::vector<double> lx, ly;
        for (double t : {0.08, 0.04, 0.02, 0.01}) {
            const ParamVector h = t * dir;
            const DataMatrix d = m.evaluate(h) - f0;
            born::InverseSeriesOptions opts;
            opts.record_residuals = false;
            lx.push_back(std::log(t));
            ly.push_back(std::log(param_norm(born::inverse_series_sum(m, b1, d, K, opts).sum - h)));
        }
        slopes.push_back(slope(lx, ly));
        ok = ok && std::abs(slopes.back() - (K + 1)) <= 0.2;
    }
    return {ok, "slopes K=1..4: " + join(slopes)};
}

Outcome toy_comparison() {
    const toy::ComparisonResult r = toy::three_method_comparison(toy::ToyModel(toy::ToyData::generate()));
    const double gn = param_norm(r.gn.iterates[1] - r.ibs.iterates[1]);
    const double ch = param_norm(r.ch.iterates[1] - r.ibs.iterates[2]);
    const double var = toy::log_ratio_variance(r.ibs.residual, 1e-12 * r.ibs.residual.front());
    const double pg = toy::fitted_order(r.gn.iterate_error, 1e-12 * r.gn.iterate_error.front());
    const double pc = toy::fitted_order(r.ch.iterate_error, 1e-12 * r.ch.iterate_error.front());
    const bool ok = gn <= 1e-10 && ch <= 1e-10 && var < 0.5 && pg >= 1.8 && pc >= 2.5;
    return {ok, "|gn1-ibs1| " + fmt(gn) + ", |ch1-ibs2| " + fmt(ch) + ", log-ratio variance " + fmt(var) +
                    ", order gn " + fmt(pg) + " ch " + fmt(pc)};
}

Outcome multilinear_bounds() {
    const Grid2D g(40, 0.1);
    const auto wells = schrodinger::WellSet::standard();
    const double mu = bounds::estimate_mu(g, zero(g), 2);
    const double nu = bounds::estimate_nu(g, zero(g), wells, 2);
    const schrodinger::SchrodingerModel model(g, zero(g), wells);
    bool ok = true;
    std::vector<double> ratios;
    for (int n = 1; n <= 4; ++n) {
        const double probe = bounds::operator_norm_probe(model, n, 6, 100 + std::uint64_t(n));
        const double bound = nu * std::pow(mu, n - 1);
        ratios.push_back(probe / bound);
        ok = ok && probe > 0.0 && probe <= bound;
    }
    return {ok, "mu " + fmt(mu) + ", nu " + fmt(nu) + ", probe/bound n=1..4: " + join(ratios)};
}

Outcome radius_table() {
    const std::vector<double> eps{0.0, 0.05, 0.1, 0.15, 0.2, 0.25};
    auto table = [&](int n) {
        const Grid2D g(n);
        bounds::RadiusOptions opts;
        opts.stride = n / 20;
        std::vector<double> r;
        for (const auto& row : bounds::radius_vs_epsilon(g, zero(g), eps, schrodinger::WellSet::standard(), opts))
            r.push_back(row.data_radius);
        return r;
    };
    const auto r1 = table(100), r2 = table(200);
    double worst = 0.0;
    for (std::size_t e = 0; e < eps.size(); ++e) worst = std::max(worst, std::abs(r2[e] - r1[e]) / r1[e]);
    const bool ok = nondecreasing(r1) && nondecreasing(r2) && worst <= 0.1;
    return {ok, "radius(100) " + join(r1) + "; radius(200) " + join(r2) + "; max change " + fmt(worst)};
}

Outcome jacobian_fd() {
    const Grid2D g(40, 0.1);
    const Eigen::MatrixXd w = schrodinger::WellSet::standard().node_values(g);
    const GridFunction q0 = zero(g);
    const Eigen::MatrixXcd jac = schrodinger::assemble_jacobian(g, q0, w);
    const double t = 1e-2;
    double worst = 0.0;
    const auto& nodes = g.support_nodes();
    for (std::size_t c = 0; c < nodes.size(); ++c) {
        GridFunction e = zero(g);
        e[nodes[c]] = t;
        const Eigen::VectorXcd fd = born::flatten(
            (schrodinger::forward_map(g, q0 + e, w) - schrodinger::forward_map(g, q0 - e, w)) / (2 * t));
        const auto col = jac.col(Eigen::Index(c));
        worst = std::max(worst, (fd - col).cwiseAbs().maxCoeff() / col.cwiseAbs().maxCoeff());
    }
    return {worst <= 1e-5, "max relative column error " + fmt(worst) + " over " + std::to_string(nodes.size()) + " columns"};
}

Outcome schrodinger_reconstruction() {
    schrodinger::TwoGridProblem p{Grid2D(100, 0.1), Grid2D(20, 0.1)};
    p.q_true_fine = embed_support(p.fine, support_values(p.fine, p.fine.sample(&schrodinger::smooth_test_potential)));
    p.q0_fine = zero(p.fine);
    const double tau = schrodinger::default_tau(0.0);
    const auto ibs5 = p.solve(schrodinger::Method::parse("ibs-5"), tau);
    const auto gn = p.solve(schrodinger::Method::parse("gn", 10), tau);
    const auto ch = p.solve(schrodinger::Method::parse("ch", 10), tau);
    const std::vector<double> red{ibs5.misfit_reduction(), gn.misfit_reduction(), ch.misfit_reduction()};
    const std::vector<double> cos{schrodinger::support_cosine(p.coarse, ibs5.q, gn.q),
                                  schrodinger::support_cosine(p.coarse, ibs5.q, ch.q),
                                  schrodinger::support_cosine(p.coarse, gn.q, ch.q)};
    bool ok = true;
    for (double r : red) ok = ok && r >= 0.9;
    for (double c : cos) ok = ok && c >= 0.9;
    return {ok, "misfit reduction ibs-5/gn/ch " + join(red) + "; cosines ibs-gn/ibs-ch/gn-ch " + join(cos)};
}

Outcome liouville_consistency() {
    const Grid2D g(100);
    const auto wells = schrodinger::WellSet::standard();
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const hydro::AquiferParams p = hydro::AquiferField::random(seed).sample(g);
        for (double omega : {1.0, 10.0}) {
            const DataMatrix m = -hydro::hydro_forward(g, p, omega, wells).Mhat;
            const DataMatrix d = schrodinger::forward_map(g, hydro::liouville_potential(g, p, omega).Q,
                                                          hydro::liouville_wells(g, p.sigma, wells));
            worst = std::max(worst, (m - d).norm() / m.norm());
        }
    }
    return {worst <= 1e-2, "max relative gap over 5 fields x 2 frequencies " + fmt(worst)};
}

Outcome oracle_recovery() {
    const hydro::AquiferField field = hydro::AquiferField::demo();
    const auto wells = schrodinger::WellSet::standard();
    std::vector<double> es, eS;
    for (int n : {100, 200}) {
        const Grid2D g(n), oracle(5 * n);
        const hydro::AquiferParams fine = field.sample(oracle), truth = field.sample(g);
        const GridFunction Q1 = restrict_fine_to_coarse(hydro::liouville_potential(oracle, fine, 1.0).Q, oracle, g);
        const GridFunction Q2 = restrict_fine_to_coarse(hydro::liouville_potential(oracle, fine, 10.0).Q, oracle, g);
        const hydro::SplitResult s = hydro::two_freq_split(Q1, Q2, 1.0, 10.0);
        const hydro::SigmaRecovery sg = hydro::recover_sigma(g, s.r1, hydro::KnownSigma::from_truth(g, truth.sigma, wells));
        es.push_back(hydro::relative_l2(g, sg.sigma, truth.sigma));
        eS.push_back(hydro::relative_l2(g, hydro::recover_S(sg.sigma, s.r2), truth.S));
    }
    const bool ok = es[0] <= 0.02 && eS[0] <= 0.02 && es[1] <= 0.5 * es[0] && eS[1] <= 0.5 * eS[0];
    return {ok, "sigma error 100/200 cells " + join(es) + "; S error " + join(eS)};
}

Outcome noise_monotonicity() {
    bool ok = true;
    std::string detail;
    for (const char* m : {"ibs-5", "gn", "ch"}) {
        std::vector<double> es, eS;
        for (double noise : {0.0, 0.01, 0.05}) {
            hydro::HydroExperiment ex;
            ex.fine = Grid2D(200, 0.1);
            ex.coarse = Grid2D(40, 0.1);
            ex.noise = noise;
            ex.tau = schrodinger::default_tau(noise);
            ex.method = schrodinger::Method::parse(m, 10);
            const hydro::HydroResult r = hydro::run_hydro(ex);
            es.push_back(r.sigma_error);
            eS.push_back(r.S_error);
        }
        ok = ok && nondecreasing(es) && nondecreasing(eS);
        detail += std::string(detail.empty() ? "" : "; ") + m + " sigma " + join(es) + " S " + join(eS);
    }
    return {ok, detail};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "reversion oracle equivalence", 1, reversion_oracle},
        {2, "left-inverse order", 5, left_inverse_order},
        {3, "toy three-method comparison", 30, toy_comparison},
        {4, "multilinear norm bounds", 120, multilinear_bounds},
        {5, "data radius versus epsilon", 300, radius_table},
        {6, "jacobian against finite differences", 60, jacobian_fd},
        {7, "schrodinger two-grid reconstruction", 600, schrodinger_reconstruction},
        {8, "liouville consistency", 300, liouville_consistency},
        {9, "hydraulic recovery from exact potentials", 300, oracle_recovery},
        {10, "noise monotonicity of the hydraulic pipeline", 900, noise_monotonicity},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.pass && secs <= c.budget_s;
        failed += pass ? 0 : 1;
        std::printf("%s [%d] %s: %s (%.1f s of %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    o.detail.c_str(), secs, c.budget_s);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
    return failed;
}
