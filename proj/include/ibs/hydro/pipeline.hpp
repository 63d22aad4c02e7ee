#pragma once

#include <cstdint>

#include "ibs/hydro/aquifer.hpp"
#include "ibs/hydro/recovery.hpp"
#include "ibs/numerics/noise.hpp"
#include "ibs/numerics/transfer.hpp"
#include "ibs/schrodinger/model.hpp"
#include "ibs/schrodinger/reconstruct.hpp"

namespace ibs::hydro {

/// Data difference f(Q) - f(Q0 = 0) in the Schrodinger convention.  The
/// Schrodinger operator is -Delta + Q, so f(Q) = -Mhat for wells
/// phi / sigma^{1/2}.
inline DataMatrix schrodinger_difference(const Grid2D& grid, const FreqMeasurement& meas,
                                         const RealGridFunction& sigma_at_wells, const schrodinger::WellSet& wells) {
    const Eigen::MatrixXd w = liouville_wells(grid, sigma_at_wells, wells);
    const DataMatrix reference = schrodinger::forward_map(grid, GridFunction::Zero(grid.node_count()), w);
    return -meas.Mhat - reference;
}

/// Reconstruction of Q(.; omega) on `coarse` from a data difference, with
/// reference potential 0 and wells phi / sigma^{1/2}.
inline schrodinger::Reconstruction reconstruct_Q(const Grid2D& coarse, const DataMatrix& d,
                                                 const RealGridFunction& sigma_at_wells,
                                                 const schrodinger::WellSet& wells, const schrodinger::Method& method,
                                                 double tau) {
    const Eigen::MatrixXd w = liouville_wells(coarse, sigma_at_wells, wells);
    return schrodinger::reconstruct(coarse, GridFunction::Zero(coarse.node_count()), w, d, method, tau);
}

/// Full two-frequency experiment: synthesis on `fine`, Q reconstruction and
/// sigma/S recovery on `coarse`.  Known conductivity (boundary and wells) is
/// taken from the truth.
struct HydroExperiment {
    Grid2D fine{100, 0.1};
    Grid2D coarse{20, 0.1};
    AquiferField truth = AquiferField::demo();
    schrodinger::WellSet wells = schrodinger::WellSet::standard();
    double omega1 = 1.0;
    double omega2 = 10.0;
    double noise = 0.0;
    std::uint64_t seed = 1;
    schrodinger::Method method = schrodinger::Method::parse("ibs-5");
    double tau = 0.01;
};

struct HydroResult {
    ComplexPotential Q1, Q2;
    schrodinger::Reconstruction rec1, rec2;
    SplitResult split;
    SigmaRecovery sigma;
    RealGridFunction S;
    AquiferParams truth;  // on the coarse grid
    double sigma_error = 0.0;
    double S_error = 0.0;
};

inline HydroResult run_hydro(const HydroExperiment& ex) {
    if (ex.noise < 0.0) throw ConfigError("noise level must be nonnegative");
    if (ex.omega1 == ex.omega2) throw EqualFrequencies("the two frequencies must differ");
    const AquiferParams fine = ex.truth.sample(ex.fine);
    HydroResult r;
    r.truth = ex.truth.sample(ex.coarse);
    auto one = [&](double omega, std::uint64_t seed, schrodinger::Reconstruction& rec, ComplexPotential& Q) {
        const FreqMeasurement meas = hydro_forward(ex.fine, fine, omega, ex.wells);
        const DataMatrix d =
            add_gaussian_noise(schrodinger_difference(ex.fine, meas, fine.sigma, ex.wells), ex.noise, seed);
        rec = reconstruct_Q(ex.coarse, d, r.truth.sigma, ex.wells, ex.method, ex.tau);
        Q = {rec.q, omega};
    };
    one(ex.omega1, ex.seed, r.rec1, r.Q1);
    one(ex.omega2, ex.seed + 1, r.rec2, r.Q2);
    r.split = two_freq_split(r.Q1.Q, r.Q2.Q, ex.omega1, ex.omega2);
    r.sigma = recover_sigma(ex.coarse, r.split.r1, KnownSigma::from_truth(ex.coarse, r.truth.sigma, ex.wells));
    r.S = recover_S(r.sigma.sigma, r.split.r2);
    r.sigma_error = relative_l2(ex.coarse, r.sigma.sigma, r.truth.sigma);
    r.S_error = relative_l2(ex.coarse, r.S, r.truth.S);
    return r;
}

}  // namespace ibs::hydro
