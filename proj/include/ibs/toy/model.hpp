#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ibs/born/model.hpp"
#include "ibs/numerics/errors.hpp"
#include "ibs/numerics/noise.hpp"
#include "ibs/numerics/sparse.hpp"
#include "ibs/numerics/types.hpp"

namespace ibs::toy {

inline constexpr Eigen::Index kToySize = 256;
inline constexpr Eigen::Index kToyMeasurements = 8;
inline constexpr std::uint64_t kToySeed = 1234;

/// Fixed ingredients of the toy problem f(x) = M^T (L - diag(x))^{-1} M.
struct ToyData {
    SparseMatrix L;       // tridiagonal: -3 on the diagonal, 1 off it
    Eigen::MatrixXd M;    // size x measurements, standard normal
    Eigen::VectorXd x_true;
    std::uint64_t seed = kToySeed;

    /// M is drawn column by column first, then x_true with std 0.1.
    static ToyData generate(std::uint64_t seed = kToySeed, Eigen::Index size = kToySize,
                            Eigen::Index measurements = kToyMeasurements, double x_scale = 0.1) {
        ToyData d;
        d.seed = seed;
        std::vector<Eigen::Triplet<cplx>> t;
        for (Eigen::Index i = 0; i < size; ++i) {
            t.emplace_back(i, i, -3.0);
            if (i > 0) t.emplace_back(i, i - 1, 1.0);
            if (i + 1 < size) t.emplace_back(i, i + 1, 1.0);
        }
        d.L.resize(size, size);
        d.L.setFromTriplets(t.begin(), t.end());
        NormalStream rng(seed);
        d.M.resize(size, measurements);
        for (Eigen::Index c = 0; c < measurements; ++c)
            for (Eigen::Index r = 0; r < size; ++r) d.M(r, c) = rng.normal();
        d.x_true.resize(size);
        for (Eigen::Index r = 0; r < size; ++r) d.x_true[r] = x_scale * rng.normal();
        return d;
    }

    Eigen::Index size() const { return L.rows(); }
    Eigen::Index measurements() const { return M.cols(); }
};

/// L - diag(x) as a factorized operator.
inline SparseOperator shifted_operator(const ToyData& data, const ParamVector& x) {
    if (x.size() != data.size()) throw GridMismatch("toy parameter has the wrong length");
    SparseMatrix k = data.L;
    for (Eigen::Index i = 0; i < x.size(); ++i) k.coeffRef(i, i) -= x[i];
    return SparseOperator(std::move(k));
}

/// M^T (L - diag(h))^{-1} M.
inline DataMatrix toy_forward(const ToyData& data, const ParamVector& h) {
    const Eigen::MatrixXcd m = data.M.cast<cplx>();
    return m.transpose() * shifted_operator(data, h).solve(m);
}

/// Expansion of the toy map about a point x0.  With K = L - diag(x0) and
/// W = K^{-1} M, a_n(eta_1, ..., eta_n) = W^T D_1 K^{-1} D_2 ... K^{-1} D_n W,
/// D_k = diag(eta_k), evaluated right to left by repeated solves.
class ToyModel {
public:
    explicit ToyModel(std::shared_ptr<const ToyData> data)
        : ToyModel(data, born::make_counter(), ParamVector::Zero(data->size())) {}
    explicit ToyModel(ToyData data) : ToyModel(std::make_shared<const ToyData>(std::move(data))) {}

    DataMatrix evaluate(const ParamVector& x) const {
        if (x == x0_) return state_->f0;
        counter_->add(data_->measurements());
        return toy_forward(*data_, x);
    }

    DataMatrix apply_a(std::span<const ParamVector> args) const {
        const int n = int(args.size());
        if (n < 1) throw CompositionOverflow("apply_a needs at least one argument");
        for (const auto& a : args)
            if (a.size() != param_dim()) throw GridMismatch("toy parameter has the wrong length");
        Eigen::MatrixXcd t = state_->w;
        for (int k = n - 1; k >= 1; --k) t = state_->op.solve(args[std::size_t(k)].asDiagonal() * t);
        counter_->add(std::int64_t(n - 1) * data_->measurements());
        return state_->w.transpose() * (args[0].asDiagonal() * t);
    }

    ToyModel reexpand(const ParamVector& x) const {
        return ToyModel(data_, counter_, x);
    }

    /// Column k, flattened column-major: entry (i, j) = W(k, i) W(k, j).
    Eigen::MatrixXcd jacobian() const {
        const Eigen::MatrixXcd& w = state_->w;
        const Eigen::Index m = w.cols();
        Eigen::MatrixXcd jac(m * m, w.rows());
        for (Eigen::Index k = 0; k < w.rows(); ++k)
            for (Eigen::Index j = 0; j < m; ++j)
                for (Eigen::Index i = 0; i < m; ++i) jac(i + m * j, k) = w(k, i) * w(k, j);
        return jac;
    }

    born::LinearInverse build_b1(double tau) const {
        return born::LinearInverse(jacobian(), tau, data_rows(), data_cols());
    }

    const ParamVector& expansion_point() const { return x0_; }
    Eigen::Index param_dim() const { return data_->size(); }
    Eigen::Index data_rows() const { return data_->measurements(); }
    Eigen::Index data_cols() const { return data_->measurements(); }
    std::int64_t solve_count() const { return counter_->value(); }
    const ToyData& data() const { return *data_; }
    ParamVector x_true() const { return data_->x_true.cast<cplx>(); }

private:
    struct State {
        SparseOperator op;
        Eigen::MatrixXcd w;
        DataMatrix f0;
    };

    ToyModel(std::shared_ptr<const ToyData> data, std::shared_ptr<born::SolveCounter> counter, const ParamVector& x)
        : data_(std::move(data)), counter_(std::move(counter)) {
        SparseOperator op = shifted_operator(*data_, x);
        const Eigen::MatrixXcd m = data_->M.cast<cplx>();
        Eigen::MatrixXcd w = op.solve(m);
        DataMatrix f0 = m.transpose() * w;
        counter_->add(data_->measurements());
        state_ = std::make_shared<const State>(State{std::move(op), std::move(w), std::move(f0)});
        x0_ = x;
    }

    std::shared_ptr<const ToyData> data_;
    std::shared_ptr<born::SolveCounter> counter_;
    std::shared_ptr<const State> state_;
    ParamVector x0_;
};

static_assert(born::ForwardModel<ToyModel>);

/// a_n at the model's expansion point applied to n perturbations.
inline DataMatrix toy_apply_a(const ToyModel& model, int n, const std::vector<ParamVector>& etas) {
    if (n < 1 || etas.size() != std::size_t(n)) throw CompositionOverflow("toy_apply_a needs exactly n >= 1 arguments");
    return model.apply_a(std::span<const ParamVector>(etas));
}

}  // namespace ibs::toy
