#include "redfront/lattice.hpp"

namespace redfront {

std::vector<Site> ball_sites(Site center, double r, int dim, std::size_t site_budget) {
    if (r < 0) throw std::invalid_argument("ball_sites: r must be >= 0");
    if (dim < 1 || dim > 3) throw std::invalid_argument("ball_sites: dim must be 1, 2 or 3");

    const int64_t R = int64_t(std::floor(r));
    const double r2 = r * r;
    std::vector<Site> out;

    auto push = [&](int64_t dx, int64_t dy, int64_t dz) {
        if (out.size() >= site_budget)
            throw CapacityError("ball_sites: enumeration exceeds site budget");
        out.push_back({int32_t(center.x + dx), int32_t(center.y + dy), int32_t(center.z + dz)});
    };

    for (int64_t dx = -R; dx <= R; ++dx) {
        if (dim == 1) {
            if (double(dx) * dx <= r2) push(dx, 0, 0);
            continue;
        }
        for (int64_t dy = -R; dy <= R; ++dy) {
            if (dim == 2) {
                if (double(dx) * dx + double(dy) * dy <= r2) push(dx, dy, 0);
                continue;
            }
            for (int64_t dz = -R; dz <= R; ++dz)
                if (double(dx) * dx + double(dy) * dy + double(dz) * dz <= r2) push(dx, dy, dz);
        }
    }
    return out;
}

}  // namespace redfront
