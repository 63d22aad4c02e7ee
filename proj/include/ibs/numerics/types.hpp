#pragma once

#include <Eigen/Core>
#include <complex>

namespace ibs {

using cplx = std::complex<double>;

/// Element of the parameter space: values on the active support, in the
/// order fixed by the owning model.
using ParamVector = Eigen::VectorXcd;

/// Element of the data space.
using DataMatrix = Eigen::MatrixXcd;

/// Node values of a field on a Grid2D, row-major in (l, k).
using GridFunction = Eigen::VectorXcd;
using RealGridFunction = Eigen::VectorXd;

/// Sup norm used on the parameter space.
inline double param_norm(const ParamVector& x) {
    return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

/// Entrywise maximum modulus, the data-space norm.
inline double data_norm(const DataMatrix& d) {
    return d.size() == 0 ? 0.0 : d.cwiseAbs().maxCoeff();
}

}  // namespace ibs
