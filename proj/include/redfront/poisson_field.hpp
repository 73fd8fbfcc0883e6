#pragma once

#include <cstdint>
#include <vector>

#include "redfront/lattice.hpp"
#include "redfront/rng.hpp"

namespace redfront {

/// Site occupancy sampled i.i.d. Poisson(rho) over a finite window of Z^d.
/// Only occupied sites are stored.
struct PoissonField {
    Box window;
    int dim = 1;
    double rho = 0;
    std::vector<std::pair<Site, uint32_t>> occupancy;  // window scan order
    uint64_t total = 0;
};

PoissonField sample_poisson_field(double rho, Box window, int dim, RngStream& rng);

enum class SeedRule { UniformParticle, NearestOrigin };

/// Initial condition after seeding: every red sits at the origin.
struct InitialCondition {
    std::vector<Site> reds;   // all {0,0,0} when produced by seeding
    std::vector<Site> blues;
};

/// Picks the seed particle (uniformly among particles, or the one nearest
/// the origin with lexicographic tie-break), shifts all positions so the
/// seed lands at 0, and colors the full origin stack red.
InitialCondition seed_particle_and_recenter(const PoissonField& field, SeedRule rule,
                                            RngStream& rng);

}  // namespace redfront
