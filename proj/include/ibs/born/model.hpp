#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "ibs/numerics/errors.hpp"
#include "ibs/numerics/noise.hpp"
#include "ibs/numerics/svd.hpp"
#include "ibs/numerics/types.hpp"

namespace ibs::born {

/// Shared tally of forward solves.  A model and every model obtained from it
/// by re-expansion hold the same counter.
class SolveCounter {
public:
    void add(std::int64_t n = 1) { count_.fetch_add(n, std::memory_order_relaxed); }
    std::int64_t value() const { return count_.load(std::memory_order_relaxed); }

private:
    std::atomic<std::int64_t> count_{0};
};

inline std::shared_ptr<SolveCounter> make_counter() { return std::make_shared<SolveCounter>(); }

/// Column-major flattening of a data matrix, the ordering used by Jacobians.
inline Eigen::VectorXcd flatten(const DataMatrix& d) {
    return Eigen::Map<const Eigen::VectorXcd>(d.data(), d.size());
}

inline DataMatrix unflatten(const Eigen::VectorXcd& v, Eigen::Index rows, Eigen::Index cols) {
    if (v.size() != rows * cols) throw GridMismatch("unflatten: size mismatch");
    return Eigen::Map<const DataMatrix>(v.data(), rows, cols);
}

/// Regularized pseudoinverse b1 of a linear map from parameters to
/// (flattened) data.
class LinearInverse {
public:
    LinearInverse(const Eigen::MatrixXcd& jacobian, double tau, Eigen::Index data_rows, Eigen::Index data_cols)
        : svd_(std::make_shared<TruncatedSvd>(jacobian, tau)), rows_(data_rows), cols_(data_cols) {
        if (jacobian.rows() != data_rows * data_cols) {
            throw GridMismatch("LinearInverse: Jacobian rows do not match the data shape");
        }
    }

    ParamVector apply(const DataMatrix& d) const {
        if (d.rows() != rows_ || d.cols() != cols_) throw GridMismatch("LinearInverse: data shape mismatch");
        return svd_->pinv_apply(flatten(d));
    }

    const TruncatedSvd& svd() const { return *svd_; }
    Eigen::Index data_rows() const { return rows_; }
    Eigen::Index data_cols() const { return cols_; }
    Eigen::Index param_dim() const { return svd_->cols(); }

    /// Induced norm from the data max-modulus norm to the parameter sup norm:
    /// the largest absolute row sum of the dense pseudoinverse.
    double norm() const {
        if (norm_ < 0.0) norm_ = svd_->pinv().rowwise().lpNorm<1>().maxCoeff();
        return norm_;
    }

    /// Spectral norm estimate by power iteration on b1^H b1.
    double spectral_norm_estimate(int iterations = 50, std::uint64_t seed = 7) const {
        const auto& u = svd_->u();
        const Eigen::VectorXd inv = svd_->singular_values().head(svd_->rank()).cwiseInverse();
        NormalStream rng(seed);
        Eigen::VectorXcd y(u.rows());
        for (auto& e : y) e = cplx(rng.normal(), rng.normal());
        double lambda = 0.0;
        for (int it = 0; it < iterations; ++it) {
            y.normalize();
            // b1 y = V S^-1 U^H y, b1^H b1 y = U S^-2 U^H y since V^H V = I.
            Eigen::VectorXcd c = u.adjoint() * y;
            c.array() *= inv.array().square();
            Eigen::VectorXcd next = u * c;
            lambda = next.norm();
            y = next;
        }
        return std::sqrt(lambda);
    }

private:
    std::shared_ptr<const TruncatedSvd> svd_;
    Eigen::Index rows_;
    Eigen::Index cols_;
    mutable double norm_ = -1.0;
};

/// Capability set every forward model provides.  `apply_a` receives n
/// parameter vectors and evaluates the multilinear coefficient a_n at the
/// current expansion point.
template <class M>
concept ForwardModel = std::copy_constructible<M> && requires(const M& m, const ParamVector& x,
                                                              std::span<const ParamVector> args, double tau) {
    { m.evaluate(x) } -> std::convertible_to<DataMatrix>;
    { m.apply_a(args) } -> std::convertible_to<DataMatrix>;
    { m.reexpand(x) } -> std::convertible_to<M>;
    { m.build_b1(tau) } -> std::convertible_to<LinearInverse>;
    { m.expansion_point() } -> std::convertible_to<ParamVector>;
    { m.param_dim() } -> std::convertible_to<Eigen::Index>;
    { m.data_rows() } -> std::convertible_to<Eigen::Index>;
    { m.data_cols() } -> std::convertible_to<Eigen::Index>;
    { m.solve_count() } -> std::convertible_to<std::int64_t>;
};

template <ForwardModel M>
DataMatrix apply_a(const M& model, std::initializer_list<ParamVector> args) {
    std::vector<ParamVector> v(args);
    return model.apply_a(std::span<const ParamVector>(v));
}

/// Dense a_1 matrix built column by column from unit vectors.
template <ForwardModel M>
Eigen::MatrixXcd dense_jacobian(const M& model) {
    const Eigen::Index p = model.param_dim();
    Eigen::MatrixXcd jac(model.data_rows() * model.data_cols(), p);
    std::vector<ParamVector> arg(1, ParamVector::Zero(p));
    for (Eigen::Index j = 0; j < p; ++j) {
        arg[0].setZero();
        arg[0][j] = 1.0;
        jac.col(j) = flatten(model.apply_a(std::span<const ParamVector>(arg)));
    }
    return jac;
}

}  // namespace ibs::born
