#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <vector>

#include "ibs/born/model.hpp"
#include "ibs/numerics/errors.hpp"
#include "ibs/numerics/noise.hpp"

namespace ibs::born {

/// Finite-dimensional polynomial map f(x) = f0 + sum_m T_m(x, ..., x) with
/// symmetric m-linear coefficient tensors T_m.  Tensor T_m is stored as a
/// (rows*cols) x p^m matrix; slot 1 is the fastest-varying column index.
class PolynomialModel {
public:
    PolynomialModel(Eigen::Index param_dim, Eigen::Index rows, Eigen::Index cols, DataMatrix f0,
                    std::vector<Eigen::MatrixXcd> tensors)
        : p_(param_dim), rows_(rows), cols_(cols), f0_(std::move(f0)),
          tensors_(std::make_shared<std::vector<Eigen::MatrixXcd>>()), x0_(ParamVector::Zero(param_dim)),
          counter_(make_counter()) {
        if (f0_.rows() != rows || f0_.cols() != cols) throw GridMismatch("PolynomialModel: f0 shape mismatch");
        for (std::size_t m = 1; m <= tensors.size(); ++m) {
            const auto& t = tensors[m - 1];
            if (t.rows() != rows * cols || t.cols() != ipow(p_, int(m))) {
                throw GridMismatch("PolynomialModel: tensor of order " + std::to_string(m) + " has wrong shape");
            }
            tensors_->push_back(symmetrize(t, int(m)));
        }
    }

    /// Scalar map sum_n coeffs[n-1] h^n.
    static PolynomialModel scalar(const std::vector<double>& coeffs) {
        std::vector<Eigen::MatrixXcd> t;
        for (double c : coeffs) t.push_back(Eigen::MatrixXcd::Constant(1, 1, c));
        return PolynomialModel(1, 1, 1, DataMatrix::Zero(1, 1), std::move(t));
    }

    /// Random model with a_1 = I + 0.3 G (G standard normal) on a square
    /// p -> p data layout and higher tensors of standard normal entries
    /// scaled by `scale`.
    static PolynomialModel random(Eigen::Index p, Eigen::Index rows, Eigen::Index cols, int degree, double scale,
                                  std::uint64_t seed) {
        NormalStream rng(seed);
        std::vector<Eigen::MatrixXcd> t;
        for (int m = 1; m <= degree; ++m) {
            Eigen::MatrixXcd tm(rows * cols, ipow(p, m));
            for (Eigen::Index j = 0; j < tm.cols(); ++j)
                for (Eigen::Index i = 0; i < tm.rows(); ++i) tm(i, j) = cplx(rng.normal(), 0.0);
            if (m == 1) {
                tm *= 0.3;
                for (Eigen::Index i = 0; i < std::min(tm.rows(), tm.cols()); ++i) tm(i, i) += 1.0;
            } else {
                tm *= scale;
            }
            t.push_back(std::move(tm));
        }
        return PolynomialModel(p, rows, cols, DataMatrix::Zero(rows, cols), std::move(t));
    }

    DataMatrix evaluate(const ParamVector& x) const {
        check_param(x);
        counter_->add();
        DataMatrix out = f0_;
        for (int m = 1; m <= degree(); ++m) {
            std::vector<ParamVector> args(std::size_t(m), x);
            out += contract(m, args);
        }
        return out;
    }

    /// a_n[x0](args) = sum_{m>=n} C(m, n) T_m(args, x0, ..., x0).
    DataMatrix apply_a(std::span<const ParamVector> args) const {
        const int n = int(args.size());
        if (n < 1) throw CompositionOverflow("apply_a needs at least one argument");
        for (const auto& a : args) check_param(a);
        counter_->add();
        DataMatrix out = DataMatrix::Zero(rows_, cols_);
        for (int m = n; m <= degree(); ++m) {
            std::vector<ParamVector> slots(args.begin(), args.end());
            slots.resize(std::size_t(m), x0_);
            out += binomial(m, n) * contract(m, slots);
        }
        return out;
    }

    PolynomialModel reexpand(const ParamVector& x) const {
        check_param(x);
        PolynomialModel copy = *this;
        copy.x0_ = x;
        return copy;
    }

    Eigen::MatrixXcd jacobian() const {
        Eigen::MatrixXcd jac = Eigen::MatrixXcd::Zero(rows_ * cols_, p_);
        std::vector<ParamVector> slots;
        for (Eigen::Index j = 0; j < p_; ++j) {
            ParamVector e = ParamVector::Zero(p_);
            e[j] = 1.0;
            for (int m = 1; m <= degree(); ++m) {
                slots.assign(std::size_t(m), x0_);
                slots[0] = e;
                jac.col(j) += double(m) * flatten(contract(m, slots));
            }
        }
        return jac;
    }

    LinearInverse build_b1(double tau) const { return LinearInverse(jacobian(), tau, rows_, cols_); }

    const ParamVector& expansion_point() const { return x0_; }
    Eigen::Index param_dim() const { return p_; }
    Eigen::Index data_rows() const { return rows_; }
    Eigen::Index data_cols() const { return cols_; }
    std::int64_t solve_count() const { return counter_->value(); }
    int degree() const { return int(tensors_->size()); }

private:
    static Eigen::Index ipow(Eigen::Index b, int e) {
        Eigen::Index r = 1;
        for (int i = 0; i < e; ++i) r *= b;
        return r;
    }

    static double binomial(int m, int n) {
        double r = 1.0;
        for (int i = 1; i <= n; ++i) r = r * double(m - n + i) / double(i);
        return r;
    }

    void check_param(const ParamVector& x) const {
        if (x.size() != p_) throw GridMismatch("PolynomialModel: parameter has wrong dimension");
    }

    /// Average of the tensor over all permutations of its m slots.
    Eigen::MatrixXcd symmetrize(const Eigen::MatrixXcd& t, int m) const {
        if (m == 1) return t;
        std::vector<int> perm(static_cast<std::size_t>(m));
        std::iota(perm.begin(), perm.end(), 0);
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(t.rows(), t.cols());
        int count = 0;
        std::vector<Eigen::Index> digits(static_cast<std::size_t>(m));
        do {
            for (Eigen::Index c = 0; c < t.cols(); ++c) {
                Eigen::Index rem = c;
                for (int s = 0; s < m; ++s) {
                    digits[std::size_t(s)] = rem % p_;
                    rem /= p_;
                }
                Eigen::Index target = 0;
                for (int s = m - 1; s >= 0; --s) target = target * p_ + digits[std::size_t(perm[std::size_t(s)])];
                out.col(target) += t.col(c);
            }
            ++count;
        } while (std::next_permutation(perm.begin(), perm.end()));
        return out / double(count);
    }

    /// T_m(slots[0], ..., slots[m-1]), contracting the slowest slot first.
    DataMatrix contract(int m, const std::vector<ParamVector>& slots) const {
        Eigen::MatrixXcd cur = (*tensors_)[std::size_t(m - 1)];
        for (int s = m - 1; s >= 0; --s) {
            const Eigen::Index block = cur.cols() / p_;
            Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(cur.rows(), block);
            for (Eigen::Index i = 0; i < p_; ++i) next += slots[std::size_t(s)][i] * cur.middleCols(i * block, block);
            cur = std::move(next);
        }
        return unflatten(cur.col(0), rows_, cols_);
    }

    Eigen::Index p_;
    Eigen::Index rows_;
    Eigen::Index cols_;
    DataMatrix f0_;
    std::shared_ptr<std::vector<Eigen::MatrixXcd>> tensors_;
    ParamVector x0_;
    std::shared_ptr<SolveCounter> counter_;
};

static_assert(ForwardModel<PolynomialModel>);

}  // namespace ibs::born
