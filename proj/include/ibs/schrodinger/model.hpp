#pragma once

#include <Eigen/Dense>

#include <memory>
#include <span>
#include <type_traits>
#include <vector>

#include "ibs/born/model.hpp"
#include "ibs/numerics/errors.hpp"
#include "ibs/numerics/grid.hpp"
#include "ibs/numerics/sparse.hpp"
#include "ibs/numerics/types.hpp"
#include "ibs/schrodinger/wells.hpp"

namespace ibs::schrodinger {

/// -Delta_h + diag(q) on the interior nodes, Dirichlet rows eliminated.
/// `q` holds node values (boundary entries are ignored).
inline SparseOperator assemble_operator(const Grid2D& grid, const GridFunction& q) {
    require_grid_function(grid, q.size(), "assemble_operator");
    SparseMatrix m = negative_laplacian(grid);
    const Eigen::VectorXcd qi = interior_values(grid, q);
    for (Eigen::Index r = 0; r < qi.size(); ++r) m.coeffRef(r, r) += qi[r];
    return SparseOperator(std::move(m));
}

/// Interior rows of a node_count x N matrix.
template <class Derived>
Eigen::MatrixXcd interior_rows(const Grid2D& grid, const Eigen::MatrixBase<Derived>& nodes) {
    if (nodes.rows() != grid.node_count()) throw GridMismatch("well matrix has the wrong number of rows");
    Eigen::MatrixXcd out(grid.interior_count(), nodes.cols());
    for (int l = 1; l < grid.n_cells(); ++l)
        for (int k = 1; k < grid.n_cells(); ++k) out.row(grid.interior(k, l)) = nodes.row(grid.node(k, l)).template cast<cplx>();
    return out;
}

/// Interior vector holding `x` at the active-support nodes and zero elsewhere.
inline Eigen::VectorXcd support_to_interior(const Grid2D& grid, const ParamVector& x) {
    if (x.size() != grid.support_size()) throw GridMismatch("parameter vector does not match the support");
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(grid.interior_count());
    const auto& idx = grid.support_interior();
    for (std::size_t p = 0; p < idx.size(); ++p) out[idx[p]] = x[Eigen::Index(p)];
    return out;
}

inline ParamVector interior_to_support(const Grid2D& grid, const Eigen::VectorXcd& v) {
    const auto& idx = grid.support_interior();
    ParamVector out(Eigen::Index(idx.size()));
    for (std::size_t p = 0; p < idx.size(); ++p) out[Eigen::Index(p)] = v[idx[p]];
    return out;
}

/// Factorized operator and well fields u_i = A^{-1} phi_i at one potential.
struct ForwardState {
    ForwardState(const Grid2D& g, GridFunction potential, const Eigen::MatrixXcd& wells)
        : grid(g), q(std::move(potential)), op(assemble_operator(g, q)), phi(interior_rows(g, wells)),
          u(op.solve(phi)) {}

    Grid2D grid;
    GridFunction q;
    SparseOperator op;
    Eigen::MatrixXcd phi;  // interior x N
    Eigen::MatrixXcd u;    // interior x N

    Eigen::Index wells() const { return phi.cols(); }
    double weight() const { return grid.h() * grid.h(); }

    /// D_ij = sum_y w u_i(y) phi_j(y): trapezoid rule, u vanishing on the boundary.
    DataMatrix measurements() const { return weight() * (u.transpose() * phi); }

    /// Entry (i,j) = (-1)^n w u_j^T E_1 A^{-1} E_2 ... A^{-1} E_n u_i with
    /// E_k = diag(eta_k) on interior nodes.
    DataMatrix apply_a(std::span<const Eigen::VectorXcd> etas_interior) const {
        const int n = int(etas_interior.size());
        if (n < 1) throw CompositionOverflow("apply_a needs at least one argument");
        Eigen::MatrixXcd t = u;
        for (int k = n - 1; k >= 1; --k) t = op.solve(etas_interior[std::size_t(k)].asDiagonal() * t);
        // Last factor E_1 pairs with w u_j.
        t = etas_interior[0].asDiagonal() * t;
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        return sign * weight() * (t.transpose() * u);
    }

    /// Rows i + N j, columns over the active support: -w u_i(y) u_j(y).
    Eigen::MatrixXcd jacobian() const {
        const auto& idx = grid.support_interior();
        const Eigen::Index N = wells();
        Eigen::MatrixXcd jac(N * N, Eigen::Index(idx.size()));
        for (std::size_t c = 0; c < idx.size(); ++c) {
            const Eigen::RowVectorXcd ur = u.row(idx[c]);
            for (Eigen::Index j = 0; j < N; ++j)
                for (Eigen::Index i = 0; i < N; ++i) jac(i + N * j, Eigen::Index(c)) = -weight() * (ur[i] * ur[j]);
        }
        return jac;
    }
};

template <class Wells>
Eigen::MatrixXcd well_matrix(const Grid2D& grid, const Wells& wells) {
    if constexpr (std::is_same_v<Wells, WellSet>) {
        return wells.node_values(grid).template cast<cplx>();
    } else {
        return wells.template cast<cplx>();
    }
}

/// Measurement matrix D(q) for wells given as a WellSet or node-value matrix.
template <class Wells>
DataMatrix forward_map(const Grid2D& grid, const GridFunction& q, const Wells& wells) {
    return ForwardState(grid, q, well_matrix(grid, wells)).measurements();
}

/// a_n at q0 applied to node-valued perturbations (interior values are used).
template <class Wells>
DataMatrix apply_a_n(const Grid2D& grid, const GridFunction& q0, const Wells& wells,
                     const std::vector<GridFunction>& etas) {
    ForwardState st(grid, q0, well_matrix(grid, wells));
    std::vector<Eigen::VectorXcd> inner;
    for (const auto& e : etas) inner.push_back(interior_values(grid, e));
    return st.apply_a(inner);
}

template <class Wells>
Eigen::MatrixXcd assemble_jacobian(const Grid2D& grid_coarse, const GridFunction& q0, const Wells& wells) {
    return ForwardState(grid_coarse, q0, well_matrix(grid_coarse, wells)).jacobian();
}

inline born::LinearInverse build_b1(const Eigen::MatrixXcd& jacobian, double tau, Eigen::Index wells) {
    return born::LinearInverse(jacobian, tau, wells, wells);
}

/// The Schrodinger map restricted to potentials that agree with a fixed
/// background outside the active support.  Parameters are the potential
/// values at the support nodes, in Grid2D::support_nodes() order.
class SchrodingerModel {
public:
    SchrodingerModel(const Grid2D& grid, GridFunction background, Eigen::MatrixXcd wells)
        : grid_(grid), background_(std::move(background)),
          wells_(std::make_shared<const Eigen::MatrixXcd>(std::move(wells))), counter_(born::make_counter()) {
        require_grid_function(grid_, background_.size(), "SchrodingerModel");
        x0_ = support_values(grid_, background_);
        state_ = std::make_shared<const ForwardState>(grid_, background_, *wells_);
        counter_->add(state_->wells());
    }

    SchrodingerModel(const Grid2D& grid, GridFunction background, const WellSet& wells)
        : SchrodingerModel(grid, std::move(background), well_matrix(grid, wells)) {}

    /// Node potential equal to the background off the support and x on it.
    GridFunction potential(const ParamVector& x) const {
        if (x.size() != grid_.support_size()) throw GridMismatch("parameter vector does not match the support");
        GridFunction q = background_;
        const auto& nodes = grid_.support_nodes();
        for (std::size_t p = 0; p < nodes.size(); ++p) q[nodes[p]] = x[Eigen::Index(p)];
        return q;
    }

    DataMatrix evaluate(const ParamVector& x) const {
        if (x == x0_) return state_->measurements();
        ForwardState st(grid_, potential(x), *wells_);
        counter_->add(st.wells());
        return st.measurements();
    }

    DataMatrix apply_a(std::span<const ParamVector> args) const {
        std::vector<Eigen::VectorXcd> inner;
        for (const auto& a : args) inner.push_back(support_to_interior(grid_, a));
        counter_->add(std::int64_t(args.size() > 0 ? args.size() - 1 : 0) * state_->wells());
        return state_->apply_a(inner);
    }

    SchrodingerModel reexpand(const ParamVector& x) const {
        SchrodingerModel copy = *this;
        copy.x0_ = x;
        copy.state_ = std::make_shared<const ForwardState>(grid_, potential(x), *wells_);
        counter_->add(state_->wells());
        return copy;
    }

    Eigen::MatrixXcd jacobian() const { return state_->jacobian(); }
    born::LinearInverse build_b1(double tau) const { return build_b1_impl(tau); }

    /// Gradient of entry (i, j) of a_n(args) with respect to args[slot]:
    /// a_n(args)_{ij} = sum_y g(y) args[slot](y).
    ParamVector slot_gradient(std::span<const ParamVector> args, int slot, Eigen::Index i, Eigen::Index j) const {
        const int n = int(args.size());
        std::vector<Eigen::VectorXcd> e;
        for (const auto& a : args) e.push_back(support_to_interior(grid_, a));
        const auto& op = state_->op;
        Eigen::VectorXcd left = state_->weight() * state_->u.col(j);
        for (int k = 0; k < slot; ++k) left = op.solve(Eigen::VectorXcd(e[std::size_t(k)].cwiseProduct(left)));
        Eigen::VectorXcd right = state_->u.col(i);
        for (int k = n - 1; k > slot; --k) right = op.solve(Eigen::VectorXcd(e[std::size_t(k)].cwiseProduct(right)));
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        counter_->add(n - 1);
        return sign * interior_to_support(grid_, left.cwiseProduct(right));
    }

    const ParamVector& expansion_point() const { return x0_; }
    Eigen::Index param_dim() const { return grid_.support_size(); }
    Eigen::Index data_rows() const { return state_->wells(); }
    Eigen::Index data_cols() const { return state_->wells(); }
    std::int64_t solve_count() const { return counter_->value(); }
    const Grid2D& grid() const { return grid_; }
    const ForwardState& state() const { return *state_; }
    const GridFunction& background() const { return background_; }

private:
    born::LinearInverse build_b1_impl(double tau) const {
        return schrodinger::build_b1(state_->jacobian(), tau, state_->wells());
    }

    Grid2D grid_;
    GridFunction background_;
    std::shared_ptr<const Eigen::MatrixXcd> wells_;
    std::shared_ptr<born::SolveCounter> counter_;
    ParamVector x0_;
    std::shared_ptr<const ForwardState> state_;
};

static_assert(born::ForwardModel<SchrodingerModel>);

}  // namespace ibs::schrodinger
