#include "redfront/rb_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace redfront {

std::vector<double> build_sample_grid(const SampleGridSpec& g, double t_max) {
    std::vector<double> ts;
    ts.push_back(0.0);
    if (t_max > 0 && g.t_min > 0 && g.points_per_decade > 0) {
        const double factor = std::pow(10.0, 1.0 / g.points_per_decade);
        for (double t = std::min(g.t_min, t_max); t < t_max; t *= factor) ts.push_back(t);
    }
    ts.push_back(t_max);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return ts;
}

int64_t RbConfig::resolved_window(double) const {
    if (window_halfwidth > 0) return window_halfwidth;
    const double front = window_safety * std::max(rho, std::sqrt(rho)) * t_max;
    const double w = front + blue.reach(t_max) + 8.0 * std::sqrt(std::max(1.0, t_max)) + 48.0;
    return int64_t(std::ceil(w));
}

RedZoneSample sample_red_zone(const RbTrajectory& traj, double t) {
    if (traj.times.empty() || t < traj.times.front() || t > traj.final_time)
        throw std::out_of_range("sample_red_zone: t outside the sampled range");
    auto it = std::upper_bound(traj.times.begin(), traj.times.end(), t);
    const std::size_t i = std::size_t(it - traj.times.begin()) - 1;
    return {traj.visited[i], traj.max_radius[i], traj.n_red[i]};
}

RbEngine::RbEngine(const RbConfig& cfg, const InitialCondition& ic, RngStream& rng)
    : dim_(cfg.dim),
      t_max_(cfg.t_max),
      blue_(cfg.blue),
      window_(cfg.resolved_window(cfg.t_max)),
      max_events_(cfg.max_events),
      paranoid_(cfg.paranoid),
      rng_(&rng),
      occ_(1024),
      visited_(1024) {
    if (dim_ < 1 || dim_ > 3) throw ConfigError("rb engine: dim must be in {1,2,3}");
    if (t_max_ < 0) throw ConfigError("rb engine: t_max must be >= 0");
    blue_.validate(dim_);
    if (ic.reds.empty()) throw ConfigError("rb engine: at least one red particle required");

    grid_ = build_sample_grid(cfg.grid, t_max_);
    traj_.config = cfg;
    traj_.seed = rng.seed();
    traj_.stream = rng.stream();
    traj_.total_particles = ic.reds.size() + ic.blues.size();

    const bool lazy = cfg.lazy_blue && blue_.kind == BlueKind::SimpleWalk && blue_.rate > 0;
    blue_rate_ = blue_.rate;
    halo_ = int64_t(std::ceil(blue_.reach(t_max_))) + 16;

    const std::size_t awake_guess = ic.reds.size() + (lazy ? 1024 : ic.blues.size());
    px_.reserve(awake_guess);
    py_.reserve(awake_guess);
    pz_.reserve(awake_guess);
    gen_.reserve(awake_guess);
    snext_.reserve(awake_guess);
    heap_.reserve(awake_guess);

    auto add_particle = [&](Site s, uint32_t g) {
        px_.push_back(s.x);
        py_.push_back(s.y);
        pz_.push_back(s.z);
        gen_.push_back(g);
        snext_.push_back(-1);
        const uint32_t id = uint32_t(px_.size() - 1);
        insert_occ(id);
        return id;
    };

    for (Site s : ic.reds) {
        const uint32_t id = add_particle(s, 1);
        ++n_red_;
        add_visited(s);
        heap_.push(id, rng_->exponential(1.0));
    }

    if (lazy) {
        asleep_ = ic.blues;
        std::stable_sort(asleep_.begin(), asleep_.end(), [](Site a, Site b) {
            return std::tuple(norm_linf(a), a.x, a.y, a.z) <
                   std::tuple(norm_linf(b), b.x, b.y, b.z);
        });
        wake_sleepers();
    } else {
        for (Site s : ic.blues) {
            const uint32_t id = add_particle(s, 0);
            const double t = schedule_blue(0.0);
            if (std::isfinite(t)) heap_.push(id, t);
        }
    }
}

void RbEngine::insert_occ(uint32_t id) {
    int32_t& head = occ_.at_or_insert(pack_site(particle_pos(id), dim_), -1);
    snext_[id] = head;
    head = int32_t(id);
}

void RbEngine::remove_occ(uint32_t id) {
    int32_t* head = occ_.find(pack_site(particle_pos(id), dim_));
    int32_t cur = *head;
    if (cur == int32_t(id)) {
        *head = snext_[id];
        return;
    }
    while (snext_[cur] != int32_t(id)) cur = snext_[cur];
    snext_[cur] = snext_[id];
}

void RbEngine::add_visited(Site s) {
    if (!visited_.insert(pack_site(s, dim_))) return;
    max_r2_ = std::max(max_r2_, norm_sq(s));
    const int64_t linf = norm_linf(s);
    if (linf > max_linf_) {
        max_linf_ = linf;
        wake_sleepers();
    }
}

void RbEngine::wake_sleepers() {
    const int64_t threshold = max_linf_ + halo_;
    while (asleep_cursor_ < asleep_.size() && norm_linf(asleep_[asleep_cursor_]) <= threshold)
        wake_one(asleep_[asleep_cursor_++]);
}

void RbEngine::wake_one(Site z0) {
    // Unconditional endpoint of the blue's walk at the wake time. Valid
    // because the halo keeps sleeping blues clear of the red zone with
    // overwhelming probability; the residual event trips the anomaly abort.
    Site p = z0;
    if (now_ > 0) {
        const uint64_t jumps = rng_->poisson(blue_rate_ * now_);
        if (dim_ == 1) {
            uint64_t rem = jumps;
            int64_t dx = 0;
            while (rem > 0) {
                const uint32_t chunk = uint32_t(std::min<uint64_t>(rem, 1u << 30));
                dx += 2 * int64_t(rng_->binomial_half(chunk)) - int64_t(chunk);
                rem -= chunk;
            }
            p.x += int32_t(dx);
        } else if (dim_ == 2) {
            const uint32_t k = uint32_t(jumps);
            const uint32_t on_x = rng_->binomial_half(k);
            p.x += 2 * int32_t(rng_->binomial_half(on_x)) - int32_t(on_x);
            p.y += 2 * int32_t(rng_->binomial_half(k - on_x)) - int32_t(k - on_x);
        } else {
            for (uint64_t j = 0; j < jumps; ++j) {
                const Site d = nn_displacement(dim_, *rng_);
                p = p + d;
            }
        }
    }

    const uint64_t key = pack_site(p, dim_);
    bool red_here = false;
    if (const int32_t* head = occ_.find(key)) {
        for (int32_t c = *head; c >= 0; c = snext_[c])
            if (gen_[c] > 0) {
                red_here = true;
                break;
            }
    }
    if (red_here || visited_.contains(key)) {
        abort_run("wake-anomaly");
        return;
    }

    px_.push_back(p.x);
    py_.push_back(p.y);
    pz_.push_back(p.z);
    gen_.push_back(0);
    snext_.push_back(-1);
    const uint32_t id = uint32_t(px_.size() - 1);
    insert_occ(id);
    heap_.push(id, now_ + rng_->exponential(blue_rate_));
}

double RbEngine::schedule_blue(double from) {
    switch (blue_.kind) {
        case BlueKind::Frozen:
            return std::numeric_limits<double>::infinity();
        case BlueKind::SimpleWalk:
            return blue_.rate > 0 ? from + rng_->exponential(blue_.rate)
                                  : std::numeric_limits<double>::infinity();
        case BlueKind::TimeVaryingWalk: {
            double t = from;
            while (true) {
                t += rng_->exponential(blue_.rate_env);
                const double r = blue_.rate_fn(t);
                if (r > blue_.rate_env * (1.0 + 1e-9))
                    throw std::logic_error("time-varying-walk: rate exceeds its envelope");
                if (rng_->unit() < r / blue_.rate_env) return t;
            }
        }
        case BlueKind::LongRangeDrift:
            return from + rng_->exponential(blue_.rate);
        case BlueKind::DeterministicShift:
            return std::floor(from) + 1.0;
    }
    return std::numeric_limits<double>::infinity();
}

void RbEngine::recolor(uint32_t id, uint32_t generation) {
    if (gen_[id] != 0) throw std::logic_error("recolor: particle is already red");
    gen_[id] = generation;
    ++n_red_;
    heap_.update(id, now_ + rng_->exponential(1.0));
}

std::vector<uint32_t> RbEngine::infect_site(Site site, uint32_t infector_generation) {
    std::vector<uint32_t> newly;
    const int32_t* head = occ_.find(pack_site(site, dim_));
    if (!head) return newly;
    for (int32_t c = *head; c >= 0; c = snext_[c])
        if (gen_[c] == 0) newly.push_back(uint32_t(c));
    for (uint32_t id : newly) recolor(id, infector_generation + 1);
    if (!newly.empty()) add_visited(site);
    return newly;
}

void RbEngine::abort_run(const std::string& reason) {
    aborted_ = true;
    abort_time_ = now_;
    abort_reason_ = reason;
}

void RbEngine::flush_trace_before(double t) {
    while (grid_cursor_ < grid_.size() && grid_[grid_cursor_] < t) {
        traj_.times.push_back(grid_[grid_cursor_]);
        traj_.max_radius.push_back(max_radius());
        traj_.n_red.push_back(n_red_);
        traj_.visited.push_back(visited_.size());
        if (paranoid_) check_containment();
        ++grid_cursor_;
    }
}

void RbEngine::finish_trace() {
    if (finished_) return;
    const double horizon = aborted_ ? abort_time_ : t_max_;
    while (grid_cursor_ < grid_.size() && grid_[grid_cursor_] <= horizon) {
        traj_.times.push_back(grid_[grid_cursor_]);
        traj_.max_radius.push_back(max_radius());
        traj_.n_red.push_back(n_red_);
        traj_.visited.push_back(visited_.size());
        if (paranoid_) check_containment();
        ++grid_cursor_;
    }
    now_ = aborted_ ? abort_time_ : t_max_;
    finished_ = true;
}

void RbEngine::check_containment() {
    for (uint32_t id = 0; id < px_.size(); ++id)
        if (gen_[id] > 0 && !visited_.contains(pack_site(particle_pos(id), dim_)))
            throw std::logic_error("invariant violation: red particle outside the red zone");
}

bool RbEngine::step() {
    if (aborted_ || finished_) return false;
    if (heap_.empty() || heap_.top_time() > t_max_) {
        finish_trace();
        return false;
    }

    const uint32_t id = heap_.top();
    const double t = heap_.top_time();
    flush_trace_before(t);
    now_ = t;
    ++events_;
    if (max_events_ > 0 && events_ > max_events_)
        throw CapacityError("rb engine: event budget exceeded");

    const bool was_red = gen_[id] > 0;
    const Site disp = was_red ? nn_displacement(dim_, *rng_) : [&] {
        switch (blue_.kind) {
            case BlueKind::SimpleWalk:
            case BlueKind::TimeVaryingWalk:
                return nn_displacement(dim_, *rng_);
            case BlueKind::LongRangeDrift: {
                double u = rng_->unit();
                for (const auto& [d, p] : blue_.jump_law) {
                    if (u < p) return d;
                    u -= p;
                }
                return blue_.jump_law.back().first;
            }
            case BlueKind::DeterministicShift:
                return blue_.shift;
            case BlueKind::Frozen:
                throw std::logic_error("frozen blue scheduled an event");
        }
        return Site{};
    }();

    remove_occ(id);
    px_[id] += disp.x;
    py_[id] += disp.y;
    pz_[id] += disp.z;
    insert_occ(id);
    const Site land = particle_pos(id);

    if (was_red) {
        add_visited(land);
        if (aborted_) return false;  // wake anomaly while expanding
        if (norm_linf(land) > window_) {
            abort_run("window-exit");
            return false;
        }
        // Mass infection: every blue on the landing site turns red with
        // generation 1 + min generation among the reds standing there.
        uint32_t min_gen = gen_[id];
        bool any_blue = false;
        for (int32_t c = *occ_.find(pack_site(land, dim_)); c >= 0; c = snext_[c]) {
            if (gen_[c] > 0)
                min_gen = std::min(min_gen, gen_[c]);
            else
                any_blue = true;
        }
        if (any_blue) infect_site(land, min_gen);
        heap_.update(id, now_ + rng_->exponential(1.0));
    } else {
        uint32_t min_gen = 0;
        bool red_here = false;
        for (int32_t c = *occ_.find(pack_site(land, dim_)); c >= 0; c = snext_[c])
            if (gen_[c] > 0) {
                min_gen = red_here ? std::min(min_gen, gen_[c]) : gen_[c];
                red_here = true;
            }
        if (red_here) {
            add_visited(land);
            recolor(id, min_gen + 1);
            if (norm_linf(land) > window_) {
                abort_run("window-exit");
                return false;
            }
        } else {
            heap_.update(id, schedule_blue(now_));
        }
    }
    return !aborted_;
}

void RbEngine::run() {
    while (step()) {
    }
    finish_trace();
}

RbTrajectory RbEngine::take_trajectory() {
    finish_trace();
    traj_.final_time = aborted_ ? abort_time_ : t_max_;
    traj_.aborted = aborted_;
    traj_.abort_time = abort_time_;
    traj_.abort_reason = abort_reason_;
    traj_.events = events_;
    return std::move(traj_);
}

RbTrajectory run_rb_initial(const RbConfig& cfg, const InitialCondition& ic, RngStream& rng) {
    RbEngine eng(cfg, ic, rng);
    eng.run();
    return eng.take_trajectory();
}

RbTrajectory run_rb(const RbConfig& cfg, RngStream& rng) {
    const int64_t w = cfg.resolved_window(cfg.t_max);
    Box window;
    window.side = 2 * w + 1;
    window.corner = {int32_t(-w), int32_t(cfg.dim >= 2 ? -w : 0), int32_t(cfg.dim >= 3 ? -w : 0)};
    const PoissonField field = sample_poisson_field(cfg.rho, window, cfg.dim, rng);
    if (field.total == 0) {
        // Empty field: trivial run with a single red seeded at the origin
        // would misrepresent the law; treat as an aborted replica instead.
        RbTrajectory t;
        t.config = cfg;
        t.seed = rng.seed();
        t.stream = rng.stream();
        t.aborted = true;
        t.abort_reason = "empty-field";
        t.final_time = 0;
        return t;
    }
    const InitialCondition ic = seed_particle_and_recenter(field, cfg.seed_rule, rng);
    return run_rb_initial(cfg, ic, rng);
}

}  // namespace redfront
