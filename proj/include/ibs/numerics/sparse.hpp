#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "ibs/numerics/errors.hpp"
#include "ibs/numerics/grid.hpp"
#include "ibs/numerics/types.hpp"

namespace ibs {

using SparseMatrix = Eigen::SparseMatrix<cplx>;

namespace detail {
inline std::atomic<int>& worker_slot() {
    static std::atomic<int> workers{[] {
        if (const char* env = std::getenv("IBS_WORKERS")) {
            int n = std::atoi(env);
            if (n > 0) return n;
        }
        return 1;
    }()};
    return workers;
}
}  // namespace detail

/// Number of threads used for multi right-hand-side solves.  Initialized from
/// the IBS_WORKERS environment variable (default 1).
inline int worker_count() { return detail::worker_slot().load(); }
inline void set_worker_count(int n) { detail::worker_slot().store(std::max(1, n)); }

/// Square sparse operator with a direct LU factorization computed once at
/// construction.  Copies share the factorization, which is only read by
/// solve(), so a single operator can serve concurrent solves.
class SparseOperator {
public:
    using Factorization = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;

    /// Solutions whose implied condition number exceeds this are rejected as
    /// numerically singular.
    static constexpr double kConditionLimit = 1e11;
    static constexpr double kResidualTolerance = 1e-10;

    explicit SparseOperator(SparseMatrix matrix) : matrix_(std::move(matrix)) {
        if (matrix_.rows() != matrix_.cols()) {
            throw GridMismatch("SparseOperator needs a square matrix");
        }
        matrix_.makeCompressed();
        norm_inf_ = 0.0;
        Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(matrix_.rows());
        for (int c = 0; c < matrix_.outerSize(); ++c) {
            for (SparseMatrix::InnerIterator it(matrix_, c); it; ++it) {
                row_sums[it.row()] += std::abs(it.value());
            }
        }
        if (row_sums.size() > 0) norm_inf_ = row_sums.maxCoeff();

        auto lu = std::make_shared<Factorization>();
        lu->analyzePattern(matrix_);
        lu->factorize(matrix_);
        if (lu->info() != Eigen::Success) {
            throw SingularOperator("sparse LU factorization failed: " + lu->lastErrorMessage());
        }
        lu_ = std::move(lu);
    }

    Eigen::Index size() const { return matrix_.rows(); }
    const SparseMatrix& matrix() const { return matrix_; }
    double norm_inf() const { return norm_inf_; }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const { return matrix_ * x; }

    /// Solves for every column of `rhs`.  Each column is checked against the
    /// residual bound ||A x - b||_inf <= 1e-10 ||b||_inf.
    Eigen::MatrixXcd solve(const Eigen::MatrixXcd& rhs) const {
        if (rhs.rows() != size()) {
            throw GridMismatch("right-hand side has " + std::to_string(rhs.rows()) + " rows, operator has " +
                               std::to_string(size()));
        }
        Eigen::MatrixXcd out(rhs.rows(), rhs.cols());
        const int workers = std::min<int>(worker_count(), int(rhs.cols()));
        if (workers <= 1) {
            solve_block(rhs, out, 0, rhs.cols());
        } else {
            std::vector<std::thread> pool;
            std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
            const Eigen::Index chunk = (rhs.cols() + workers - 1) / workers;
            for (int w = 0; w < workers; ++w) {
                const Eigen::Index begin = w * chunk;
                const Eigen::Index end = std::min(rhs.cols(), begin + chunk);
                pool.emplace_back([&, w, begin, end] {
                    try {
                        if (begin < end) solve_block(rhs, out, begin, end);
                    } catch (...) {
                        errors[std::size_t(w)] = std::current_exception();
                    }
                });
            }
            for (auto& t : pool) t.join();
            for (auto& e : errors) {
                if (e) std::rethrow_exception(e);
            }
        }
        return out;
    }

    Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const {
        Eigen::MatrixXcd m = rhs;
        return solve(m).col(0);
    }

    template <class Derived>
    auto solve(const Eigen::MatrixBase<Derived>& rhs) const {
        if constexpr (Derived::ColsAtCompileTime == 1) {
            return solve(Eigen::VectorXcd(rhs));
        } else {
            return solve(Eigen::MatrixXcd(rhs));
        }
    }

private:
    void solve_block(const Eigen::MatrixXcd& rhs, Eigen::MatrixXcd& out, Eigen::Index begin, Eigen::Index end) const {
        const Eigen::Index count = end - begin;
        Eigen::MatrixXcd block = lu_->solve(rhs.middleCols(begin, count));
        for (Eigen::Index c = 0; c < count; ++c) {
            const auto b = rhs.col(begin + c);
            const auto x = block.col(c);
            const double b_norm = b.cwiseAbs().maxCoeff();
            if (!x.allFinite()) {
                throw SingularOperator("solve produced non-finite values");
            }
            if (b_norm == 0.0) {
                block.col(c).setZero();
                continue;
            }
            const double x_norm = x.cwiseAbs().maxCoeff();
            if (norm_inf_ * x_norm > kConditionLimit * b_norm) {
                throw SingularOperator("operator is numerically singular (resonant potential?)");
            }
            const double residual = (matrix_ * x - b).cwiseAbs().maxCoeff();
            if (residual > kResidualTolerance * b_norm) {
                throw SingularOperator("solve residual " + std::to_string(residual / b_norm) +
                                       " exceeds tolerance");
            }
        }
        out.middleCols(begin, count) = block;
    }

    SparseMatrix matrix_;
    std::shared_ptr<const Factorization> lu_;
    double norm_inf_ = 0.0;
};

/// Solves op x = b for each right-hand side, reusing the factorization.
inline std::vector<Eigen::VectorXcd> factorize_and_solve(const SparseOperator& op,
                                                         const std::vector<Eigen::VectorXcd>& rhs_list) {
    if (rhs_list.empty()) return {};
    Eigen::MatrixXcd rhs(op.size(), Eigen::Index(rhs_list.size()));
    for (std::size_t i = 0; i < rhs_list.size(); ++i) {
        if (rhs_list[i].size() != op.size()) throw GridMismatch("right-hand side size mismatch");
        rhs.col(Eigen::Index(i)) = rhs_list[i];
    }
    const Eigen::MatrixXcd sol = op.solve(rhs);
    std::vector<Eigen::VectorXcd> out;
    out.reserve(rhs_list.size());
    for (Eigen::Index c = 0; c < sol.cols(); ++c) out.emplace_back(sol.col(c));
    return out;
}

/// 5-point discretization of -Laplacian on the interior nodes of `grid` with
/// homogeneous Dirichlet rows eliminated.
inline SparseMatrix negative_laplacian(const Grid2D& grid) {
    const int n = grid.n_cells();
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    std::vector<Eigen::Triplet<cplx>> triplets;
    triplets.reserve(std::size_t(grid.interior_count()) * 5);
    for (int l = 1; l < n; ++l) {
        for (int k = 1; k < n; ++k) {
            const Eigen::Index row = grid.interior(k, l);
            triplets.emplace_back(row, row, 4.0 * inv_h2);
            if (k > 1) triplets.emplace_back(row, grid.interior(k - 1, l), -inv_h2);
            if (k < n - 1) triplets.emplace_back(row, grid.interior(k + 1, l), -inv_h2);
            if (l > 1) triplets.emplace_back(row, grid.interior(k, l - 1), -inv_h2);
            if (l < n - 1) triplets.emplace_back(row, grid.interior(k, l + 1), -inv_h2);
        }
    }
    SparseMatrix m(grid.interior_count(), grid.interior_count());
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

/// 5-point Laplacian of a grid function at the interior nodes (boundary
/// values are used as given).  Boundary entries of the result are zero.
template <class Vec>
Vec discrete_laplacian(const Grid2D& grid, const Vec& f) {
    require_grid_function(grid, f.size(), "discrete_laplacian");
    const int n = grid.n_cells();
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    Vec out = Vec::Zero(f.size());
    for (int l = 1; l < n; ++l) {
        for (int k = 1; k < n; ++k) {
            out[grid.node(k, l)] = (f[grid.node(k + 1, l)] + f[grid.node(k - 1, l)] + f[grid.node(k, l + 1)] +
                                    f[grid.node(k, l - 1)] - 4.0 * f[grid.node(k, l)]) *
                                   inv_h2;
        }
    }
    return out;
}

}  // namespace ibs
