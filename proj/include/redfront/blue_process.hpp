#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "redfront/lattice.hpp"
#include "redfront/rng.hpp"

namespace redfront {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class BlueKind { Frozen, SimpleWalk, TimeVaryingWalk, LongRangeDrift, DeterministicShift };

std::string to_string(BlueKind k);

/// Blue-particle dynamics. Every kind induces a bistochastic transition
/// kernel (translation invariant walks and deterministic translations
/// preserve the counting measure).
struct BlueProcessSpec {
    BlueKind kind = BlueKind::Frozen;

    // SimpleWalk / TimeVaryingWalk / LongRangeDrift: jump rate D_B (for the
    // time-varying kind this is the base of rate_fn, and rate_env bounds it).
    double rate = 0.0;

    // TimeVaryingWalk only: instantaneous rate and a finite envelope.
    std::function<double(double)> rate_fn;
    double rate_env = 0.0;

    // LongRangeDrift only: finite-support displacement law.
    std::vector<std::pair<Site, double>> jump_law;

    // DeterministicShift only: displacement applied at t = 1, 2, 3, ...
    Site shift{};

    void validate(int dim) const;

    /// Expected-rate envelope (events per unit time); 0 for Frozen.
    double rate_envelope() const;

    /// Crude high-probability reach of one blue over [0, t] in L-inf norm,
    /// used only to size sampling windows and wake halos.
    double reach(double t) const;
};

struct BlueEvent {
    double time = std::numeric_limits<double>::infinity();
    Site displacement{};
};

/// Next jump of a blue particle after t_now: Frozen never fires; SimpleWalk
/// fires at Exp(D_B) with a uniform nearest-neighbor step; TimeVaryingWalk
/// thins proposals against rate_env; LongRangeDrift draws from jump_law;
/// DeterministicShift fires at the next integer time.
BlueEvent blue_step(const BlueProcessSpec& spec, double t_now, int dim, RngStream& rng);

/// Next jump of a red particle: Exp(1) waiting time, uniform among the 2d
/// nearest-neighbor displacements.
BlueEvent red_step(double t_now, int dim, RngStream& rng);

/// Uniform nearest-neighbor displacement among the 2*dim options.
Site nn_displacement(int dim, RngStream& rng);

}  // namespace redfront
