#include "redfront/oracles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace redfront {

namespace {

// Sum of pmf(j) for j in [lo, hi] in linear space. Valid while exp(-mean)
// does not underflow (mean < ~700); callers guard larger means.
double pmf_sum_linear(double mean, int64_t lo, int64_t hi) {
    double term = std::exp(-mean);  // pmf(0)
    double acc = (lo <= 0) ? term : 0.0;
    for (int64_t j = 1; j <= hi; ++j) {
        term *= mean / double(j);
        if (j >= lo) acc += term;
    }
    return acc;
}

// Upper tail P(N >= k) summed upward from k until terms are negligible.
double upper_tail_direct(double mean, int64_t k) {
    double lt = -mean + double(k) * std::log(mean) - std::lgamma(double(k) + 1.0);
    double term = std::exp(lt);
    double acc = 0.0;
    int64_t j = k;
    while (true) {
        acc += term;
        ++j;
        term *= mean / double(j);
        if (term < 1e-18 && double(j) > mean) break;
        if (j > k + 100000000) break;
    }
    return acc;
}

// Lower tail P(N <= k) in log space (for very large means).
double lower_tail_log(double mean, int64_t k) {
    if (k < 0) return 0.0;
    // Sum downward from k; terms shrink fast when k << mean.
    double lt = -mean + double(k) * std::log(mean) - std::lgamma(double(k) + 1.0);
    double term = std::exp(lt);
    double acc = 0.0;
    for (int64_t j = k; j >= 0; --j) {
        acc += term;
        if (term < 1e-18 && double(j) < mean) break;
        term *= double(j) / mean;
    }
    return acc;
}

}  // namespace

double exact_poisson_tail(double mean, int64_t threshold, TailSide side) {
    if (mean < 0 || !std::isfinite(mean))
        throw std::invalid_argument("exact_poisson_tail: mean must be finite and >= 0");
    if (mean == 0.0) {
        bool hit = (side == TailSide::Ge) ? (threshold <= 0) : (threshold >= 0);
        return hit ? 1.0 : 0.0;
    }

    if (side == TailSide::Ge) {
        if (threshold <= 0) return 1.0;
        if (double(threshold) > mean) return upper_tail_direct(mean, threshold);
        // Large lower complement: compute P(N <= k-1) and subtract.
        double lower = (mean < 700.0) ? pmf_sum_linear(mean, 0, threshold - 1)
                                      : lower_tail_log(mean, threshold - 1);
        return 1.0 - lower;
    }
    if (threshold < 0) return 0.0;
    if (double(threshold) < mean)
        return (mean < 700.0) ? pmf_sum_linear(mean, 0, threshold)
                              : lower_tail_log(mean, threshold);
    return 1.0 - upper_tail_direct(mean, threshold + 1);
}

double ctrw_kernel_1d(int64_t x, double t, double rate) {
    if (t < 0) throw std::invalid_argument("ctrw_kernel_1d: t must be >= 0");
    x = std::llabs(x);
    const double u = rate * t;  // expected jump count for this coordinate
    if (u == 0.0) return x == 0 ? 1.0 : 0.0;

    // term(k) = e^{-u} u^k / k! * C(k, (k+x)/2) / 2^k, summed over k = x, x+2, ...
    // Recurrence in k -> k+2: factor u^2 / (4 (a+1)(b+1)) with a=(k+x)/2, b=(k-x)/2.
    double lt = -u + double(x) * std::log(u) - std::lgamma(double(x) + 1.0) -
                double(x) * std::log(2.0);
    double term = std::exp(lt);
    double acc = 0.0;
    int64_t k = x;
    while (true) {
        acc += term;
        double a = double((k + x) / 2);
        double b = double((k - x) / 2);
        term *= u * u / (4.0 * (a + 1.0) * (b + 1.0));
        k += 2;
        if (double(k) > u && term < 1e-16 * (acc + 1e-300)) break;
        if (term == 0.0) break;
        if (k > x + 10000000) break;
    }
    return acc;
}

double exact_ctrw_kernel(Site z, double t, int dim) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("exact_ctrw_kernel: dim in {1,2,3}");
    if (t < 0) throw std::invalid_argument("exact_ctrw_kernel: t must be >= 0");
    const double rate = 1.0 / double(dim);
    double p = ctrw_kernel_1d(z.x, t, rate);
    if (dim >= 2) p *= ctrw_kernel_1d(z.y, t, rate);
    if (dim >= 3) p *= ctrw_kernel_1d(z.z, t, rate);
    return p;
}

}  // namespace redfront
