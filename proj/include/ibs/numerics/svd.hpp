#pragma once

#include <Eigen/SVD>

#include <string>

#include "ibs/numerics/errors.hpp"
#include "ibs/numerics/types.hpp"

namespace ibs {

/// Thin SVD of a dense matrix together with a relative truncation threshold.
/// Singular values below tau * sigma_max are treated as zero by the
/// pseudoinverse.
class TruncatedSvd {
public:
    TruncatedSvd(const Eigen::MatrixXcd& a, double tau) : tau_(tau), rows_(a.rows()), cols_(a.cols()) {
        if (!(tau > 0.0 && tau < 1.0)) {
            throw EmptySpectrum("truncation threshold must lie in (0, 1), got " + std::to_string(tau));
        }
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        singular_values_ = svd.singularValues();
        const double smax = singular_values_.size() > 0 ? singular_values_[0] : 0.0;
        rank_ = 0;
        if (smax > 0.0) {
            while (rank_ < singular_values_.size() && singular_values_[rank_] >= tau * smax) ++rank_;
        }
        if (rank_ == 0) {
            throw EmptySpectrum("every singular value falls below the truncation threshold");
        }
        u_ = svd.matrixU().leftCols(rank_);
        v_ = svd.matrixV().leftCols(rank_);
        inv_sigma_ = singular_values_.head(rank_).cwiseInverse();
    }

    double tau() const { return tau_; }
    Eigen::Index rank() const { return rank_; }
    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }
    /// All singular values, nonincreasing (including the truncated ones).
    const Eigen::VectorXd& singular_values() const { return singular_values_; }
    /// Retained left/right singular vectors.
    const Eigen::MatrixXcd& u() const { return u_; }
    const Eigen::MatrixXcd& v() const { return v_; }

    /// V diag(1/sigma) U^H y over the retained modes.
    Eigen::VectorXcd pinv_apply(const Eigen::VectorXcd& y) const {
        if (y.size() != rows_) {
            throw GridMismatch("pinv_apply: vector has " + std::to_string(y.size()) + " entries, expected " +
                               std::to_string(rows_));
        }
        Eigen::VectorXcd coeffs = u_.adjoint() * y;
        coeffs.array() *= inv_sigma_.array();
        return v_ * coeffs;
    }

    /// Dense pseudoinverse (cols x rows).
    Eigen::MatrixXcd pinv() const { return v_ * inv_sigma_.asDiagonal() * u_.adjoint(); }

private:
    double tau_;
    Eigen::Index rows_;
    Eigen::Index cols_;
    Eigen::Index rank_ = 0;
    Eigen::VectorXd singular_values_;
    Eigen::MatrixXcd u_;
    Eigen::MatrixXcd v_;
    Eigen::VectorXd inv_sigma_;
};

inline Eigen::VectorXcd svd_pinv_apply(const TruncatedSvd& svd, const Eigen::VectorXcd& y) {
    return svd.pinv_apply(y);
}

}  // namespace ibs
