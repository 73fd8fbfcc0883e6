#include "redfront/poisson_field.hpp"

#include <stdexcept>
#include <tuple>

namespace redfront {

PoissonField sample_poisson_field(double rho, Box window, int dim, RngStream& rng) {
    if (rho < 0) throw std::invalid_argument("sample_poisson_field: rho must be >= 0");
    if (window.side < 1) throw std::invalid_argument("sample_poisson_field: degenerate window");
    if (dim < 1 || dim > 3) throw std::invalid_argument("sample_poisson_field: dim in {1,2,3}");

    PoissonField f;
    f.window = window;
    f.dim = dim;
    f.rho = rho;
    if (rho == 0) return f;

    const int64_t s = window.side;
    const Site c = window.corner;
    const int64_t ny = dim >= 2 ? s : 1;
    const int64_t nz = dim >= 3 ? s : 1;
    for (int64_t dx = 0; dx < s; ++dx)
        for (int64_t dy = 0; dy < ny; ++dy)
            for (int64_t dz = 0; dz < nz; ++dz) {
                const uint64_t n = rng.poisson(rho);
                if (n == 0) continue;
                f.occupancy.push_back(
                    {{int32_t(c.x + dx), int32_t(c.y + dy), int32_t(c.z + dz)}, uint32_t(n)});
                f.total += n;
            }
    return f;
}

InitialCondition seed_particle_and_recenter(const PoissonField& field, SeedRule rule,
                                            RngStream& rng) {
    if (field.total == 0) throw std::runtime_error("seed_particle_and_recenter: empty field");

    Site seed_site{};
    if (rule == SeedRule::UniformParticle) {
        // Unbiased pick: redraw if in the truncated top range.
        const uint64_t limit = UINT64_MAX - UINT64_MAX % field.total;
        uint64_t x = rng.u64();
        while (x >= limit) x = rng.u64();
        const uint64_t target = x % field.total;
        uint64_t acc = 0;
        for (const auto& [site, n] : field.occupancy) {
            acc += n;
            if (target < acc) {
                seed_site = site;
                break;
            }
        }
    } else {
        bool first = true;
        int64_t best = 0;
        for (const auto& [site, n] : field.occupancy) {
            const int64_t d2 = norm_sq(site);
            if (first || d2 < best ||
                (d2 == best && std::tie(site.x, site.y, site.z) <
                                   std::tie(seed_site.x, seed_site.y, seed_site.z))) {
                best = d2;
                seed_site = site;
                first = false;
            }
        }
    }

    InitialCondition ic;
    for (const auto& [site, n] : field.occupancy) {
        const Site p = site - seed_site;
        auto& bucket = (p == Site{}) ? ic.reds : ic.blues;
        for (uint32_t k = 0; k < n; ++k) bucket.push_back(p);
    }
    return ic;
}

}  // namespace redfront
