#pragma once

#include <algorithm>
#include <cstddef>
#include <span>

namespace resmpc {

namespace detail {

inline double pairwise_sum_range(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum_range(v, half) + pairwise_sum_range(v + half, n - half);
}

inline double split_mean_range(const double* v, std::size_t n) {
    if (n == 1) return v[0];
    const std::size_t nl = n / 2;
    const std::size_t nr = n - nl;
    const double ml = split_mean_range(v, nl);
    const double mr = split_mean_range(v + nl, nr);
    // Incremental combine: exact when ml == mr, so a bank of identical
    // values averages to that value bit-for-bit regardless of count.
    return ml + (double(nr) / double(n)) * (mr - ml);
}

}  // namespace detail

/// Fixed-order pairwise summation.
inline double pairwise_sum(std::span<const double> values) {
    if (values.empty()) return 0.0;
    return detail::pairwise_sum_range(values.data(), values.size());
}

/// Mean by recursive splitting. Fixed evaluation order, and exact when all
/// inputs are equal (a bank of identical values reduces to that value
/// bit-for-bit, any count). Combined with a canonical ordering of scenario
/// columns this is what makes the solver's scenario average permutation-
/// invariant and makes K identical columns collapse onto the K = 1 problem.
inline double split_mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    return detail::split_mean_range(values.data(), values.size());
}

}  // namespace resmpc
