#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace redfront {

/// Lattice point on Z^d, d in {1,2,3}. Unused coordinates stay 0.
struct Site {
    int32_t x = 0;
    int32_t y = 0;
    int32_t z = 0;

    friend bool operator==(const Site&, const Site&) = default;
};

inline Site operator+(Site a, Site b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Site operator-(Site a, Site b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

inline int64_t norm_sq(Site s) {
    return int64_t(s.x) * s.x + int64_t(s.y) * s.y + int64_t(s.z) * s.z;
}

inline double euclidean_norm(Site s) { return std::sqrt(double(norm_sq(s))); }

inline int32_t norm_linf(Site s) {
    int32_t m = std::abs(s.x);
    if (std::abs(s.y) > m) m = std::abs(s.y);
    if (std::abs(s.z) > m) m = std::abs(s.z);
    return m;
}

/// Axis-aligned cube on Z^d: corner is the minimal-coordinate vertex.
struct Box {
    Site corner;
    int64_t side = 1;
};

/// Point on the 2-D periodic torus of side L; coordinates in [0, L).
struct TorusSite {
    int32_t x = 0;
    int32_t y = 0;

    friend bool operator==(const TorusSite&, const TorusSite&) = default;
};

/// Square box on the torus; may wrap around the boundary.
struct TorusBox {
    TorusSite corner;
    int32_t side = 1;
};

class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline int32_t wrap_coord(int64_t raw, int32_t L) {
    int64_t m = raw % L;
    if (m < 0) m += L;
    return int32_t(m);
}

inline TorusSite torus_wrap(int64_t rx, int64_t ry, int32_t L) {
    if (L < 1) throw std::invalid_argument("torus_wrap: L must be >= 1");
    return {wrap_coord(rx, L), wrap_coord(ry, L)};
}

/// Minimal Euclidean distance over periodic images. Coordinates are
/// independent, so minimizing per axis minimizes the full distance.
inline double torus_distance(TorusSite a, TorusSite b, int32_t L) {
    int32_t dx = std::abs(a.x - b.x);
    int32_t dy = std::abs(a.y - b.y);
    if (L - dx < dx) dx = L - dx;
    if (L - dy < dy) dy = L - dy;
    return std::sqrt(double(dx) * dx + double(dy) * dy);
}

inline constexpr std::size_t kDefaultBallBudget = 20'000'000;

/// All sites within Euclidean distance r of center (closed ball).
std::vector<Site> ball_sites(Site center, double r, int dim,
                             std::size_t site_budget = kDefaultBallBudget);

// --- packed keys -----------------------------------------------------------
//
// Sites are packed into 64-bit keys for the open-addressing tables. Each
// coordinate is biased into an unsigned range so the top bit of the key is
// always 0; ~0ull can then serve as the empty-slot sentinel. Valid range is
// |coord| < 2^30 for d<=2 and |coord| < 2^20 for d=3.

inline uint64_t pack_site(Site s, int dim) {
    switch (dim) {
        case 1:
            return uint64_t(uint32_t(s.x)) + (uint64_t(1) << 31);
        case 2:
            return ((uint64_t(s.x + (int64_t(1) << 30)) & 0x7FFFFFFFull) << 31) |
                   (uint64_t(s.y + (int64_t(1) << 30)) & 0x7FFFFFFFull);
        default:
            return ((uint64_t(s.x + (1 << 20)) & 0x1FFFFFull) << 42) |
                   ((uint64_t(s.y + (1 << 20)) & 0x1FFFFFull) << 21) |
                   (uint64_t(s.z + (1 << 20)) & 0x1FFFFFull);
    }
}

inline Site unpack_site(uint64_t k, int dim) {
    switch (dim) {
        case 1:
            return {int32_t(int64_t(k) - (int64_t(1) << 31)), 0, 0};
        case 2:
            return {int32_t(int64_t((k >> 31) & 0x7FFFFFFFull) - (int64_t(1) << 30)),
                    int32_t(int64_t(k & 0x7FFFFFFFull) - (int64_t(1) << 30)), 0};
        default:
            return {int32_t(int64_t((k >> 42) & 0x1FFFFFull) - (1 << 20)),
                    int32_t(int64_t((k >> 21) & 0x1FFFFFull) - (1 << 20)),
                    int32_t(int64_t(k & 0x1FFFFFull) - (1 << 20))};
    }
}

}  // namespace redfront
