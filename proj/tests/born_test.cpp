#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "ibs/born.hpp"

using namespace ibs;
using namespace ibs::born;

namespace {

DataMatrix scalar_data(double v) { return DataMatrix::Constant(1, 1, v); }

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
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

ParamVector rand_param(NormalStream& rng, Eigen::Index p) {
    ParamVector v(p);
    for (auto& e : v) e = cplx(rng.normal(), rng.normal());
    return v;
}

DataMatrix rand_data(NormalStream& rng, Eigen::Index r, Eigen::Index c) {
    DataMatrix d(r, c);
    for (auto& e : d.reshaped()) e = cplx(rng.normal(), rng.normal());
    return d;
}

}  // namespace

TEST(Compositions, CountAndLexicographicOrder) {
    for (int n = 1; n <= 8; ++n) EXPECT_EQ(series_compositions(n).size(), (std::size_t(1) << (n - 1)) - 1);
    const auto c4 = series_compositions(4);
    const std::vector<Composition> expect{{1, 1, 2}, {1, 2, 1}, {1, 3}, {2, 1, 1}, {2, 2}, {3, 1}, {4}};
    EXPECT_EQ(c4, expect);
}

TEST(Reversion, SignedCatalan) {
    const auto b = scalar_reversion_oracle<double>({1.0, 1.0}, 6);
    const std::vector<double> expect{1, -1, 2, -5, 14, -42};
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(b[std::size_t(i)], expect[std::size_t(i)], 1e-14);
}

TEST(Reversion, LinearAndCubic) {
    const auto lin = scalar_reversion_oracle<double>({4.0}, 1);
    EXPECT_DOUBLE_EQ(lin[0], 0.25);
    const auto cub = scalar_reversion_oracle<double>({1.0, 0.0, 1.0}, 3);
    EXPECT_DOUBLE_EQ(cub[1], 0.0);
    EXPECT_DOUBLE_EQ(cub[2], -1.0);
    EXPECT_THROW(scalar_reversion_oracle<double>({0.0, 1.0}, 3), ZeroLinearCoefficient);
}

TEST(ForwardSeries, ZeroAndTerminatingPolynomial) {
    const auto m = PolynomialModel::scalar({1.0, 1.0});
    EXPECT_EQ(data_norm(forward_series_sum(m, ParamVector::Zero(1), 5)), 0.0);
    ParamVector h = ParamVector::Constant(1, 0.3);
    EXPECT_NEAR(std::abs(forward_series_sum(m, h, 2)(0, 0) - cplx(0.3 + 0.09)), 0.0, 1e-15);
    // Re-expanded at x = 0.5: f(0.5 + h) - f(0.5) = 2h + h^2.
    const auto m2 = m.reexpand(ParamVector::Constant(1, 0.5));
    EXPECT_NEAR(std::abs(forward_series_sum(m2, h, 3)(0, 0) - cplx(0.6 + 0.09)), 0.0, 1e-15);
}

TEST(ApplyBn, ScalarCoefficientsMatchReversion) {
    const auto m = PolynomialModel::scalar({1.0, 1.0});
    const auto b1 = m.build_b1(0.5);
    const auto oracle = scalar_reversion_oracle<double>({1.0, 1.0}, 6);
    const double d = 0.7;
    for (int n = 1; n <= 6; ++n) {
        std::vector<DataMatrix> args(std::size_t(n), scalar_data(d));
        const cplx got = apply_b_n(m, b1, args)[0];
        EXPECT_NEAR(std::abs(got - oracle[std::size_t(n - 1)] * std::pow(d, n)), 0.0, 1e-12) << "n=" << n;
    }
    std::vector<DataMatrix> two{scalar_data(0.3), scalar_data(0.3)};
    EXPECT_NEAR(apply_b_n(m, b1, two)[0].real(), -0.09, 1e-15);
    std::vector<DataMatrix> three(3, scalar_data(0.3));
    EXPECT_NEAR(apply_b_n(m, b1, three)[0].real(), 2 * 0.027, 1e-15);
}

TEST(ApplyBn, MultilinearInEachSlot) {
    const auto m = PolynomialModel::random(4, 2, 2, 3, 0.5, 11).reexpand(ParamVector::Constant(4, 0.1));
    const auto b1 = m.build_b1(1e-10);
    NormalStream rng(3);
    for (int n = 2; n <= 4; ++n) {
        std::vector<DataMatrix> args;
        for (int i = 0; i < n; ++i) args.push_back(rand_data(rng, 2, 2));
        const ParamVector base = apply_b_n(m, b1, args);
        for (int slot = 0; slot < n; ++slot) {
            const cplx c(1.7, -0.4);
            auto scaled = args;
            scaled[std::size_t(slot)] *= c;
            EXPECT_LT(param_norm(apply_b_n(m, b1, scaled) - c * base), 1e-10 * param_norm(base));
            auto other = args;
            other[std::size_t(slot)] = rand_data(rng, 2, 2);
            auto sum = args;
            sum[std::size_t(slot)] += other[std::size_t(slot)];
            EXPECT_LT(param_norm(apply_b_n(m, b1, sum) - base - apply_b_n(m, b1, other)), 1e-10 * param_norm(base));
            auto zero = args;
            zero[std::size_t(slot)].setZero();
            EXPECT_EQ(param_norm(apply_b_n(m, b1, zero)), 0.0);
        }
    }
}

TEST(ApplyBn, UnmemoizedCostIsTwoToTheNMinusOneMinusOne) {
    const auto m = PolynomialModel::scalar({1.0, 1.0, 0.5});
    const auto b1 = m.build_b1(0.5);
    for (int n = 2; n <= 8; ++n) {
        std::vector<DataMatrix> args(std::size_t(n), scalar_data(0.2));
        SeriesCounters plain, memo;
        const auto x = apply_b_n(m, b1, args, SeriesOptions{8, false}, &plain);
        const auto y = apply_b_n(m, b1, args, SeriesOptions{8, true}, &memo);
        EXPECT_EQ(plain.top_level_b_calls, (std::int64_t(1) << (n - 1)) - 1);
        EXPECT_LT(std::abs(x[0] - y[0]), 1e-14 * std::abs(x[0]));
    }
}

TEST(ApplyBn, OrderAboveMaximumOverflows) {
    const auto m = PolynomialModel::scalar({1.0, 1.0});
    const auto b1 = m.build_b1(0.5);
    std::vector<DataMatrix> args(9, scalar_data(0.1));
    EXPECT_THROW(apply_b_n(m, b1, args), CompositionOverflow);
    EXPECT_NO_THROW(apply_b_n(m, b1, args, SeriesOptions{9, true}));
    EXPECT_THROW(inverse_series_sum(m, b1, scalar_data(0.1), 9), CompositionOverflow);
}

TEST(InverseSeries, ZeroDataAndScalarPartialSum) {
    const auto m = PolynomialModel::scalar({1.0, 1.0});
    const auto b1 = m.build_b1(0.5);
    EXPECT_EQ(param_norm(inverse_series_sum(m, b1, scalar_data(0.0), 4).sum), 0.0);
    const auto res = inverse_series_sum(m, b1, scalar_data(0.1), 4);
    EXPECT_NEAR(res.sum[0].real(), 0.0915, 1e-15);
    ASSERT_EQ(res.trace.size(), 5u);
    EXPECT_NEAR(res.trace.steps[2].iterate[0].real(), 0.09, 1e-15);
    // Residuals of partial sums shrink toward the exact root of h + h^2 = 0.1.
    for (std::size_t i = 1; i < res.trace.size(); ++i) {
        EXPECT_LT(res.trace.steps[i].residual_norm, res.trace.steps[i - 1].residual_norm);
    }
}

TEST(InverseSeries, LeftInverseOrder) {
    const auto m = PolynomialModel::random(4, 2, 2, 3, 0.5, 2024);
    const auto b1 = m.build_b1(1e-12);
    NormalStream rng(5);
    ParamVector dir = rand_param(rng, 4);
    dir /= param_norm(dir);
    const DataMatrix f0 = m.evaluate(ParamVector::Zero(4));
    for (int K = 1; K <= 4; ++K) {
        std::vector<double> lx, ly;
        for (double t : {0.08, 0.04, 0.02, 0.01}) {
            const ParamVector h = t * dir;
            const DataMatrix d = m.evaluate(h) - f0;
            const double err = param_norm(inverse_series_sum(m, b1, d, K, {{}, false}).sum - h);
            lx.push_back(std::log(t));
            ly.push_back(std::log(err));
        }
        EXPECT_NEAR(least_squares_slope(lx, ly), K + 1, 0.2) << "K=" << K;
    }
}

TEST(InverseSeries, CompositionWithForwardSeries) {
    const auto m = PolynomialModel::random(4, 2, 2, 3, 0.5, 99);
    const auto b1 = m.build_b1(1e-12);
    NormalStream rng(8);
    ParamVector dir = rand_param(rng, 4);
    dir /= param_norm(dir);
    // The composition is exact through order K, so the error is O(t^{K+1}):
    // either at round-off level or dropping by ~2^{K+1} per halving of t.
    for (int K = 1; K <= 4; ++K) {
        double prev = -1.0;
        for (double t : {0.04, 0.02, 0.01}) {
            const ParamVector h = t * dir;
            const double err =
                param_norm(inverse_series_sum(m, b1, forward_series_sum(m, h, K), K, {{}, false}).sum - h);
            if (prev > 1e-13) EXPECT_GT(prev / err, 0.8 * std::pow(2.0, K + 1)) << "K=" << K << " t=" << t;
            EXPECT_LT(err, 1e3 * std::pow(t, K + 1) + 1e-15);
            prev = err;
        }
    }
}

TEST(InverseSeries, SeriesLimitRecoversPerturbation) {
    // b1 a_1 = I exactly, so the converged series inverts f.
    const auto m = PolynomialModel::random(4, 2, 2, 2, 0.3, 17);
    const auto b1 = m.build_b1(1e-12);
    NormalStream rng(21);
    ParamVector h = rand_param(rng, 4);
    h *= 0.02 / param_norm(h);
    const DataMatrix d = m.evaluate(h) - m.evaluate(ParamVector::Zero(4));
    const auto res = inverse_series_sum(m, b1, d, 8, {{}, false});
    EXPECT_LT(param_norm(res.sum - h), 1e-11);
}

TEST(InverseSeries, StableUnderDataPerturbation) {
    const auto m = PolynomialModel::random(4, 2, 2, 3, 0.5, 31);
    const auto b1 = m.build_b1(1e-12);
    NormalStream rng(44);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        DataMatrix d1 = rand_data(rng, 2, 2);
        d1 *= 0.01 / data_norm(d1);
        DataMatrix d2 = d1 + 1e-3 * rand_data(rng, 2, 2);
        const auto g1 = inverse_series_sum(m, b1, d1, 6, {{}, false}).sum;
        const auto g2 = inverse_series_sum(m, b1, d2, 6, {{}, false}).sum;
        worst = std::max(worst, param_norm(g1 - g2) / data_norm(d1 - d2));
    }
    EXPECT_LT(worst, 2.0 * b1.norm());
}

TEST(InverseSeries, CompositionShapePathMatchesRecursion) {
    // Truncated pseudoinverse of a rank-deficient a_1: b1 a_1 is not the identity.
    const auto m = PolynomialModel::random(6, 2, 2, 4, 0.4, 77).reexpand(ParamVector::Constant(6, 0.1));
    const auto b1 = m.build_b1(1e-12);
    ASSERT_LT(b1.svd().rank(), 6);
    NormalStream rng(3);
    DataMatrix d = rand_data(rng, 2, 2);
    d *= 0.05 / data_norm(d);
    ASSERT_TRUE(is_reflexive_inverse(m, b1, d));
    InverseSeriesOptions slow;
    slow.record_residuals = false;
    slow.force_recursion = true;
    InverseSeriesOptions fast;
    fast.record_residuals = false;
    const auto a = inverse_series_sum(m, b1, d, 7, slow);
    const auto b = inverse_series_sum(m, b1, d, 7, fast);
    for (std::size_t n = 0; n < a.terms.size(); ++n) {
        EXPECT_LE(param_norm(a.terms[n] - b.terms[n]), 1e-11 * std::max(param_norm(a.terms[n]), 1e-30)) << n;
    }
    EXPECT_EQ(b.counters.a_applications, (1 << 7) - 7 - 1);
    EXPECT_LT(b.counters.a_applications, a.counters.a_applications);
}

TEST(InverseSeries, NonReflexiveInverseUsesRecursion) {
    const auto m = PolynomialModel::random(4, 2, 2, 3, 0.5, 12);
    const LinearInverse half(2.0 * m.jacobian(), 0.5e-12, 2, 2);
    NormalStream rng(4);
    DataMatrix d = rand_data(rng, 2, 2);
    d *= 0.01 / data_norm(d);
    EXPECT_FALSE(is_reflexive_inverse(m, half, d));
    InverseSeriesOptions slow;
    slow.record_residuals = false;
    slow.force_recursion = true;
    InverseSeriesOptions fast;
    fast.record_residuals = false;
    const auto a = inverse_series_sum(m, half, d, 5, slow);
    const auto b = inverse_series_sum(m, half, d, 5, fast);
    EXPECT_EQ(a.sum, b.sum);
}

TEST(Methods, ExactDataIsAFixedPoint) {
    const auto m = PolynomialModel::random(4, 2, 2, 3, 0.5, 7).reexpand(ParamVector::Constant(4, 0.05));
    const DataMatrix y = m.evaluate(m.expansion_point());
    for (const auto& tr : {gauss_newton_run(m, y, 3, 1e-10), chebyshev_halley_run(m, y, 3, 1e-10),
                           ribs_run(m, 3, y, 3, 1e-10)}) {
        ASSERT_EQ(tr.size(), 4u);
        for (const auto& s : tr.steps) EXPECT_LT(param_norm(s.iterate - m.expansion_point()), 1e-15);
    }
}

TEST(Methods, RibsOneIsGaussNewton) {
    const auto m = PolynomialModel::random(4, 2, 2, 3, 0.5, 9);
    NormalStream rng(1);
    ParamVector x = rand_param(rng, 4) * 0.05;
    const DataMatrix y = m.evaluate(x);
    const auto a = ribs_run(m, 1, y, 5, 1e-10);
    const auto b = gauss_newton_run(m, y, 5, 1e-10);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a.steps[i].iterate, b.steps[i].iterate);
        EXPECT_EQ(a.steps[i].residual_norm, b.steps[i].residual_norm);
    }
}

TEST(Methods, ScalarConvergenceOrders) {
    const auto m = PolynomialModel::scalar({1.0, 1.0});
    const DataMatrix y = scalar_data(0.11);
    const ParamVector root = ParamVector::Constant(1, 0.1);
    auto errors = [&](const IterationTrace& tr) {
        std::vector<double> e;
        for (const auto& s : tr.steps) e.push_back(param_norm(s.iterate - root));
        return e;
    };
    const auto gn = errors(gauss_newton_run(m, y, 6, 0.5));
    for (std::size_t i = 0; i + 1 < gn.size() && gn[i + 1] > 1e-15; ++i) EXPECT_LT(gn[i + 1], 2.0 * gn[i] * gn[i]);
    for (const auto& e : {errors(chebyshev_halley_run(m, y, 4, 0.5)), errors(ribs_run(m, 2, y, 4, 0.5))}) {
        for (std::size_t i = 0; i + 1 < e.size() && e[i + 1] > 1e-15; ++i) {
            EXPECT_LT(e[i + 1], 3.0 * e[i] * e[i] * e[i]);
        }
        EXPECT_LT(e.back(), 1e-15);
    }
}

TEST(Methods, LinearModelConvergesInOneStep) {
    Eigen::MatrixXcd a(4, 3);
    a << 1, 2, 0, 0, 1, 1, 3, 0, 1, 1, 1, 1;
    const PolynomialModel m(3, 2, 2, DataMatrix::Zero(2, 2), {a});
    const ParamVector x_true = (ParamVector(3) << 0.3, -1.0, 2.0).finished();
    const DataMatrix y = m.evaluate(x_true);
    const auto gn = gauss_newton_run(m, y, 3, 1e-12);
    EXPECT_LT(param_norm(gn.steps[1].iterate - x_true), 1e-12);
    const auto ch = chebyshev_halley_run(m, y, 3, 1e-12);
    for (std::size_t i = 0; i < gn.size(); ++i) EXPECT_LT(param_norm(gn.steps[i].iterate - ch.steps[i].iterate), 1e-14);
}

TEST(Methods, ChebyshevHalleyMatchesRibsTwo) {
    const auto m = PolynomialModel::random(4, 2, 2, 3, 0.5, 12);
    NormalStream rng(6);
    const DataMatrix y = m.evaluate(rand_param(rng, 4) * 0.05);
    const auto a = chebyshev_halley_run(m, y, 4, 1e-10);
    const auto b = ribs_run(m, 2, y, 4, 1e-10);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LT(param_norm(a.steps[i].iterate - b.steps[i].iterate), 1e-13);
}

TEST(Trace, SolveCountIncreasesAndCsvHeader) {
    const auto m = PolynomialModel::scalar({1.0, 1.0});
    auto tr = gauss_newton_run(m, scalar_data(0.11), 3, 0.5, {ParamVector::Constant(1, 0.1), {}});
    for (std::size_t i = 1; i < tr.size(); ++i) EXPECT_GT(tr.steps[i].solve_count, tr.steps[i - 1].solve_count);
    std::ostringstream os;
    tr.write_csv(os);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "step,residual_norm,step_norm,solve_count,error_to_truth");
}

TEST(LinearInverse, NormsOfDiagonalMap) {
    Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(4, 2);
    j(0, 0) = 2.0;
    j(3, 1) = 0.5;
    LinearInverse b1(j, 1e-6, 2, 2);
    EXPECT_NEAR(b1.norm(), 2.0, 1e-14);
    EXPECT_NEAR(b1.spectral_norm_estimate(), 2.0, 1e-10);
    DataMatrix d(2, 2);
    d << 4.0, 0.0, 0.0, 1.0;
    EXPECT_NEAR(std::abs(b1.apply(d)[0] - cplx(2.0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(b1.apply(d)[1] - cplx(2.0)), 0.0, 1e-14);
}
