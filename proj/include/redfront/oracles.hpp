#pragma once

#include <cstdint>

#include "redfront/lattice.hpp"

namespace redfront {

enum class TailSide { Ge, Le };

/// Exact Poisson tail P(N >= k) or P(N <= k) for N ~ Poisson(mean),
/// by direct pmf summation of the smaller tail. Absolute error < 1e-12.
double exact_poisson_tail(double mean, int64_t threshold, TailSide side);

/// Exact transition kernel P_0(zeta(t) = z) of the rate-1 continuous-time
/// simple random walk on Z^d, as a product of per-coordinate rate-(1/d)
/// kernels, each summed by uniformization with certified truncation < 1e-12.
double exact_ctrw_kernel(Site z, double t, int dim);

/// One-coordinate kernel P(x, t) for a 1-D continuous-time walk with jump
/// rate `rate` (used both by exact_ctrw_kernel and directly in tests).
double ctrw_kernel_1d(int64_t x, double t, double rate);

}  // namespace redfront
