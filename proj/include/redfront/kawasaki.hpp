#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "redfront/event_heap.hpp"
#include "redfront/lattice.hpp"
#include "redfront/poisson_field.hpp"
#include "redfront/rng.hpp"

namespace redfront {

struct KawasakiConfig {
    double beta = 2.0;
    double U = 1.0;       // binding energy (enters H as -U per occupied bond)
    double Delta = 1.0;   // density exponent: rho = e^{-Delta beta}
    double Theta = 1.8;   // volume exponent: |torus| = e^{Theta beta}
    double alpha = 0.4;   // concentration/QRW parameter, 0 < alpha < Delta

    enum class LambdaFn { SqrtLogBeta, Constant };
    LambdaFn lambda_fn = LambdaFn::SqrtLogBeta;
    double lambda_const = 0.0;

    double t_max = 100.0;
    SeedRule seed_rule = SeedRule::UniformParticle;
    uint64_t conc_check_every = 0;  // events between concentration scans; 0 = N

    // Test overrides for desk-size instances; <= 0 keeps the derived values.
    int32_t L_override = 0;
    int64_t N_override = -1;

    double rho() const;
    int32_t side() const;      // L = round(e^{Theta beta / 2})
    uint32_t particles() const;  // N = round(rho L^2)
    double lambda() const;
    double box_volume_limit() const;  // e^{beta (Delta - alpha/4)}
    int32_t conc_box_side() const;    // floor(sqrt(volume limit)), clamped to L
    double t_alpha() const;           // e^{(Delta - alpha) beta}
    double cloud_radius() const;      // e^{alpha beta / 4} sqrt(T_alpha)

    void validate() const;
};

/// Torus occupancy plus particle registry; grid holds the particle index or
/// -1. Colors: 0 blue, 1 red (tagging modes reuse the array with other ids).
struct KawasakiState {
    int32_t L = 0;
    std::vector<int32_t> grid;
    std::vector<TorusSite> pos;
    std::vector<uint8_t> color;

    int32_t& at(int32_t x, int32_t y) { return grid[std::size_t(y) * L + x]; }
    int32_t at(int32_t x, int32_t y) const { return grid[std::size_t(y) * L + x]; }
    uint32_t particles() const { return uint32_t(pos.size()); }
};

/// -U times the number of occupied nearest-neighbor pairs (torus adjacency).
double energy(const KawasakiState& s, double U);

struct ClusterDecomposition {
    std::vector<int32_t> labels;  // per particle, root-normalized
    std::vector<uint32_t> sizes;  // per cluster id
    uint32_t count = 0;
};

/// Connected components of occupied sites under |x-y| = 1 adjacency
/// (union-find over the occupancy grid).
ClusterDecomposition clusters(const KawasakiState& s);

/// Every particle sharing a cluster with a red particle becomes red.
void propagate_red(KawasakiState& s, const ClusterDecomposition& d);

struct ConcentrationReport {
    bool triggered = false;
    std::optional<double> first_time;
    std::optional<TorusBox> witness_box;
    int32_t box_side = 0;
    double threshold = 0;  // lambda(beta) / 4
};

/// Scans all L^2 wrapped square boxes of the admissible side via 2-D prefix
/// sums; monotonicity of counts in box inclusion makes the largest side
/// sufficient. Triggered when some box holds more than lambda/4 particles.
ConcentrationReport detect_concentration(const KawasakiState& s, double t_now,
                                         const KawasakiConfig& cfg);

struct CloudPartition {
    std::vector<int32_t> labels;
    uint32_t count = 0;
    uint32_t largest = 0;
};

/// Union-find over particle pairs within torus distance 2r of each other,
/// r = e^{alpha beta / 4} sqrt(T_alpha): connected components of the union
/// of radius-r balls around particle positions.
CloudPartition cloud_partition(const KawasakiState& s, const KawasakiConfig& cfg);

struct RbkTrajectory {
    std::vector<double> times;
    std::vector<double> radius;  // max torus distance of the red zone from the seed site
    std::vector<uint32_t> n_red;
    std::vector<uint32_t> n_clusters;
    std::vector<uint32_t> max_cluster;
    ConcentrationReport concentration;
    double final_time = 0;
    uint64_t events = 0;
    uint64_t accepted = 0;
    uint64_t seed = 0;
    uint64_t stream = 0;
};

/// Kawasaki dynamics with RBK coloring. One event: pop the earliest clock,
/// pick one of the 4 neighbor sites uniformly; occupied target means no
/// move, otherwise the move is accepted with e^{-beta [H' - H]_+}. Clocks
/// are rate-1 exponential. Red propagates through clusters after every
/// accepted move (clusters change only then).
class KawasakiEngine {
public:
    KawasakiEngine(const KawasakiConfig& cfg, RngStream& rng);

    /// Explicit small-instance constructor (tests): positions must be
    /// distinct; reds propagate through the seed cluster when seed >= 0.
    KawasakiEngine(int32_t L, const std::vector<TorusSite>& positions, double beta, double U,
                   int32_t seed_particle, RngStream& rng);

    /// Processes one clock ring; returns true if the move was accepted.
    bool step();

    void run_to(double t);

    const KawasakiState& state() const { return st_; }
    KawasakiState& mutable_state() { return st_; }
    double now() const { return now_; }
    uint64_t events() const { return events_; }
    uint64_t accepted() const { return accepted_; }
    uint32_t red_count() const { return n_red_; }
    TorusSite seed_site() const { return seed_site_; }
    double red_zone_radius() const { return red_radius_; }

    double next_event_time() const;
    void advance_clock(double t) { now_ = t; }

    /// Last particle whose clock rang (diagnostics).
    uint32_t last_mover() const { return last_mover_; }

    double energy_now() const { return energy(st_, U_); }

    void assert_invariants() const;

private:
    void propagate_from(uint32_t particle);

    KawasakiState st_;
    double beta_, U_;
    RngStream* rng_;
    EventHeap heap_;
    double now_ = 0;
    uint64_t events_ = 0;
    uint64_t accepted_ = 0;
    uint32_t n_red_ = 0;
    TorusSite seed_site_{};
    double red_radius_ = 0;
    std::vector<uint8_t> red_zone_;  // per site: ever occupied by a red
    uint32_t last_mover_ = 0;
    std::vector<int32_t> bfs_stack_;
    std::vector<int32_t> bfs_members_;
    std::vector<uint32_t> bfs_seen_;
    uint32_t bfs_epoch_ = 0;
};

RbkTrajectory run_rbk(const KawasakiConfig& cfg, RngStream& rng);

// --- two-box decorrelation experiment ---------------------------------------

struct EventSpec {
    enum class Kind { Enter, Exceed } kind = Kind::Enter;
    int32_t k = 0;  // Exceed: occupancy must exceed k at some time
};

struct TwoBoxResult {
    double p1 = 0, p2 = 0, p12 = 0;
    double se1 = 0, se2 = 0, se12 = 0;  // binomial standard errors
    double discrepancy = 0;             // p12 - p1 p2
    double se_discrepancy = 0;          // influence-function standard error
    uint32_t replicas = 0;
    // Tagging mode: fraction of replicas where black and white zones met.
    std::optional<double> zones_met_fraction;
};

struct TwoBoxOptions {
    uint32_t replicas = 1000;
    bool tagging = false;
    double tag_delta = 0.5;  // delta in the white-region offset e^{-delta beta / 2}
    bool inject_independent_coins = false;  // calibration mode: events are fair coins
};

/// Monte Carlo estimate of P(A1), P(A2), P(A1 and A2) for events of the
/// stopped process restricted to two disjoint boxes, run up to T wedge
/// T_{alpha,lambda}.
TwoBoxResult two_box_experiment(const KawasakiConfig& cfg, TorusBox box1, TorusBox box2,
                                EventSpec e1, EventSpec e2, double T, const TwoBoxOptions& opt,
                                RngStream& rng);

/// True if the wrapped box contains the site.
bool torus_box_contains(const TorusBox& b, TorusSite s, int32_t L);

/// Minimal torus distance between two boxes (0 if they touch or overlap).
double torus_box_distance(const TorusBox& a, const TorusBox& b, int32_t L);

}  // namespace redfront
