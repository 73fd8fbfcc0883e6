#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "redfront/blue_process.hpp"
#include "redfront/event_heap.hpp"
#include "redfront/lattice.hpp"
#include "redfront/poisson_field.hpp"
#include "redfront/rng.hpp"
#include "redfront/site_hash.hpp"

namespace redfront {

struct SampleGridSpec {
    double t_min = 1.0;
    int points_per_decade = 16;
};

struct RbConfig {
    int dim = 1;
    double rho = 0.1;
    BlueProcessSpec blue;
    double t_max = 100.0;
    SeedRule seed_rule = SeedRule::UniformParticle;
    SampleGridSpec grid;

    // Sampling window half-width for the initial Poisson field; 0 derives it
    // from window_safety * max(rho, sqrt(rho)) * t_max plus diffusion margins.
    int64_t window_halfwidth = 0;
    double window_safety = 2.0;

    uint64_t max_events = 0;  // 0 = unlimited; exceeding throws CapacityError

    // Sleep/wake scheme for simple-walk blues: distant blues stay out of the
    // event loop until the red zone approaches within a halo sized so that a
    // sleeping blue has vanishing probability of having already interacted.
    // Exactness is kept by the anomaly abort flag, mirroring the window rule.
    bool lazy_blue = true;

    bool paranoid = false;  // O(n_red) containment checks at every sample time

    int64_t resolved_window(double) const;
};

struct RbTrajectory {
    std::vector<double> times;
    std::vector<double> max_radius;
    std::vector<uint32_t> n_red;
    std::vector<uint64_t> visited;

    double final_time = 0;
    RbConfig config;
    uint64_t seed = 0;
    uint64_t stream = 0;

    bool aborted = false;
    double abort_time = 0;
    std::string abort_reason;

    uint64_t events = 0;
    uint64_t total_particles = 0;
};

struct RedZoneSample {
    uint64_t visited = 0;
    double max_radius = 0;
    uint32_t n_red = 0;
};

/// Values at the nearest sample-grid point <= t; throws std::out_of_range
/// for t outside [first grid point, final_time].
RedZoneSample sample_red_zone(const RbTrajectory& traj, double t);

/// Event-driven RB simulation on Z^d. Positions change only at jump events,
/// so infection is checked exactly at landings: a red landing recolors every
/// blue on its site; a blue landing on a red-occupied site recolors itself.
class RbEngine {
public:
    RbEngine(const RbConfig& cfg, const InitialCondition& ic, RngStream& rng);

    /// Processes one event; returns false once no event remains before t_max
    /// or the run aborted.
    bool step();

    /// Runs to t_max (or abort) and finalizes the trace.
    void run();

    /// Recolors every blue particle at `site` with generation
    /// infector_generation + 1; returns the newly red particle ids.
    std::vector<uint32_t> infect_site(Site site, uint32_t infector_generation);

    uint32_t red_count() const { return n_red_; }
    uint64_t visited_count() const { return visited_.size(); }
    double max_radius() const { return std::sqrt(double(max_r2_)); }
    double now() const { return now_; }
    bool aborted() const { return aborted_; }
    uint64_t events() const { return events_; }
    std::size_t particle_count() const { return px_.size() + (asleep_.size() - asleep_cursor_); }

    Site particle_pos(uint32_t id) const { return {px_[id], py_[id], pz_[id]}; }
    uint32_t particle_gen(uint32_t id) const { return gen_[id]; }
    bool particle_red(uint32_t id) const { return gen_[id] > 0; }
    bool site_visited(Site s) const { return visited_.contains(pack_site(s, dim_)); }

    RbTrajectory take_trajectory();

private:
    void insert_occ(uint32_t id);
    void remove_occ(uint32_t id);
    void add_visited(Site s);
    void wake_sleepers();
    void wake_one(Site origin_pos);
    double schedule_blue(double from);
    void recolor(uint32_t id, uint32_t generation);
    void flush_trace_before(double t);
    void finish_trace();
    void check_containment();
    void abort_run(const std::string& reason);

    // config
    int dim_;
    double t_max_;
    BlueProcessSpec blue_;
    int64_t window_;
    uint64_t max_events_;
    bool paranoid_;
    RngStream* rng_;

    // particles (structure-of-arrays; gen 0 = blue, >= 1 = red generation)
    std::vector<int32_t> px_, py_, pz_;
    std::vector<uint32_t> gen_;
    std::vector<int32_t> snext_;

    SiteMap occ_;
    SiteSet visited_;
    EventHeap heap_;

    // sleeping simple-walk blues, sorted by L-inf distance from origin
    std::vector<Site> asleep_;
    std::size_t asleep_cursor_ = 0;
    int64_t halo_ = 0;
    double blue_rate_ = 0;

    double now_ = 0;
    uint32_t n_red_ = 0;
    uint64_t events_ = 0;
    int64_t max_r2_ = 0;
    int64_t max_linf_ = 0;
    bool aborted_ = false;
    double abort_time_ = 0;
    std::string abort_reason_;
    bool finished_ = false;

    std::vector<double> grid_;
    std::size_t grid_cursor_ = 0;
    RbTrajectory traj_;
};

/// Samples a Poisson field over the configured window, seeds it, runs the
/// engine and returns the trajectory.
RbTrajectory run_rb(const RbConfig& cfg, RngStream& rng);

/// Same, from an explicit initial condition (tests, custom occupancies).
RbTrajectory run_rb_initial(const RbConfig& cfg, const InitialCondition& ic, RngStream& rng);

std::vector<double> build_sample_grid(const SampleGridSpec& g, double t_max);

}  // namespace redfront
