#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ibs/numerics/types.hpp"

namespace ibs {

/// Portable standard-normal stream: std::mt19937_64 (whose output sequence is
/// fixed by the standard) feeding the Marsaglia polar method.  The standard
/// library distributions are implementation-defined, so they are not used.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        has_spare_ = true;
        return u * factor;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Adds zero-mean Gaussian noise with standard deviation level * max|d_ij|,
/// drawn independently for the real and imaginary part of every entry
/// (column-major order).  Deterministic for a fixed seed.
inline DataMatrix add_gaussian_noise(const DataMatrix& d, double level, std::uint64_t seed) {
    if (level <= 0.0) return d;
    const double sd = level * data_norm(d);
    NormalStream rng(seed);
    DataMatrix out = d;
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
        for (Eigen::Index r = 0; r < out.rows(); ++r) {
            const double re = rng.normal();
            const double im = rng.normal();
            out(r, c) += cplx(sd * re, sd * im);
        }
    }
    return out;
}

}  // namespace ibs
