#pragma once

#include <complex>
#include <vector>

#include "ibs/numerics/errors.hpp"

namespace ibs::born {

/// Coefficients b_1..b_{n_max} of the compositional inverse of
/// A(h) = sum_n a_n h^n, where a_coeffs[0] = a_1.  Classical recurrence
/// b_n = -(sum_{m<n} b_m [h^n] A^m) / a_1^n over truncated powers of A.
template <class T = double>
std::vector<T> scalar_reversion_oracle(const std::vector<T>& a_coeffs, int n_max) {
    if (a_coeffs.empty() || a_coeffs[0] == T(0)) throw ZeroLinearCoefficient("reversion needs a_1 != 0");
    const int N = n_max;
    // powers[m][k] = [h^k] A(h)^m for k <= N
    std::vector<std::vector<T>> powers(std::size_t(N + 1), std::vector<T>(std::size_t(N + 1), T(0)));
    powers[0][0] = T(1);
    auto a = [&](int k) { return k >= 1 && k <= int(a_coeffs.size()) ? a_coeffs[std::size_t(k - 1)] : T(0); };
    for (int m = 1; m <= N; ++m) {
        for (int k = m; k <= N; ++k) {
            T acc(0);
            for (int j = 1; j <= k - (m - 1); ++j) acc += a(j) * powers[std::size_t(m - 1)][std::size_t(k - j)];
            powers[std::size_t(m)][std::size_t(k)] = acc;
        }
    }
    std::vector<T> b(std::size_t(N), T(0));
    const T a1 = a_coeffs[0];
    T a1_pow = T(1);
    for (int n = 1; n <= N; ++n) {
        a1_pow *= a1;
        if (n == 1) {
            b[0] = T(1) / a1;
            continue;
        }
        T acc(0);
        for (int m = 1; m < n; ++m) acc += b[std::size_t(m - 1)] * powers[std::size_t(m)][std::size_t(n)];
        b[std::size_t(n - 1)] = -acc / a1_pow;
    }
    return b;
}

}  // namespace ibs::born
