#include "redfront/blue_process.hpp"

#include <cmath>

namespace redfront {

std::string to_string(BlueKind k) {
    switch (k) {
        case BlueKind::Frozen: return "frozen";
        case BlueKind::SimpleWalk: return "simple-walk";
        case BlueKind::TimeVaryingWalk: return "time-varying-walk";
        case BlueKind::LongRangeDrift: return "long-range-drift";
        case BlueKind::DeterministicShift: return "deterministic-shift";
    }
    return "?";
}

void BlueProcessSpec::validate(int dim) const {
    if (dim < 1 || dim > 3) throw ConfigError("blue process: dim must be in {1,2,3}");
    switch (kind) {
        case BlueKind::Frozen:
            break;
        case BlueKind::SimpleWalk:
            if (!(rate >= 0)) throw ConfigError("simple-walk: rate must be >= 0");
            break;
        case BlueKind::TimeVaryingWalk:
            if (!rate_fn) throw ConfigError("time-varying-walk: rate_fn required");
            if (!(rate_env > 0) || !std::isfinite(rate_env))
                throw ConfigError("time-varying-walk: finite positive rate envelope required");
            break;
        case BlueKind::LongRangeDrift: {
            if (!(rate > 0)) throw ConfigError("long-range-drift: rate must be > 0");
            if (jump_law.empty()) throw ConfigError("long-range-drift: jump law required");
            double total = 0;
            for (const auto& [d, p] : jump_law) {
                if (!(p >= 0)) throw ConfigError("long-range-drift: negative probability");
                if (dim < 3 && d.z != 0) throw ConfigError("long-range-drift: z step in dim < 3");
                if (dim < 2 && d.y != 0) throw ConfigError("long-range-drift: y step in dim < 2");
                total += p;
            }
            if (std::abs(total - 1.0) > 1e-9)
                throw ConfigError("long-range-drift: jump law must sum to 1");
            break;
        }
        case BlueKind::DeterministicShift:
            if (dim < 3 && shift.z != 0) throw ConfigError("deterministic-shift: z step in dim < 3");
            if (dim < 2 && shift.y != 0) throw ConfigError("deterministic-shift: y step in dim < 2");
            break;
    }
}

double BlueProcessSpec::rate_envelope() const {
    switch (kind) {
        case BlueKind::Frozen: return 0.0;
        case BlueKind::SimpleWalk: return rate;
        case BlueKind::TimeVaryingWalk: return rate_env;
        case BlueKind::LongRangeDrift: return rate;
        case BlueKind::DeterministicShift: return 1.0;
    }
    return 0.0;
}

double BlueProcessSpec::reach(double t) const {
    switch (kind) {
        case BlueKind::Frozen:
            return 0.0;
        case BlueKind::SimpleWalk:
            return 8.0 * std::sqrt(std::max(1.0, rate * t)) + 8.0;
        case BlueKind::TimeVaryingWalk:
            return 8.0 * std::sqrt(std::max(1.0, rate_env * t)) + 8.0;
        case BlueKind::LongRangeDrift: {
            int32_t step = 0;
            double drift = 0;
            for (const auto& [d, p] : jump_law) {
                step = std::max(step, norm_linf(d));
                drift += p * double(norm_linf(d));
            }
            return rate * drift * t + 8.0 * double(step) * std::sqrt(std::max(1.0, rate * t)) + 8.0;
        }
        case BlueKind::DeterministicShift:
            return double(norm_linf(shift)) * (t + 1.0);
    }
    return 0.0;
}

Site nn_displacement(int dim, RngStream& rng) {
    const uint32_t r = rng.below(uint32_t(2 * dim));
    const int32_t sign = (r & 1u) ? -1 : 1;
    switch (r >> 1) {
        case 0: return {sign, 0, 0};
        case 1: return {0, sign, 0};
        default: return {0, 0, sign};
    }
}

BlueEvent blue_step(const BlueProcessSpec& spec, double t_now, int dim, RngStream& rng) {
    switch (spec.kind) {
        case BlueKind::Frozen:
            return {};
        case BlueKind::SimpleWalk: {
            if (spec.rate <= 0) return {};
            return {t_now + rng.exponential(spec.rate), nn_displacement(dim, rng)};
        }
        case BlueKind::TimeVaryingWalk: {
            double t = t_now;
            while (true) {
                t += rng.exponential(spec.rate_env);
                const double r = spec.rate_fn(t);
                if (r > spec.rate_env * (1.0 + 1e-9))
                    throw std::logic_error("time-varying-walk: rate exceeds its envelope");
                if (rng.unit() < r / spec.rate_env) return {t, nn_displacement(dim, rng)};
            }
        }
        case BlueKind::LongRangeDrift: {
            const double t = t_now + rng.exponential(spec.rate);
            double u = rng.unit();
            for (const auto& [d, p] : spec.jump_law) {
                if (u < p) return {t, d};
                u -= p;
            }
            return {t, spec.jump_law.back().first};
        }
        case BlueKind::DeterministicShift:
            return {std::floor(t_now) + 1.0, spec.shift};
    }
    return {};
}

BlueEvent red_step(double t_now, int dim, RngStream& rng) {
    return {t_now + rng.exponential(1.0), nn_displacement(dim, rng)};
}

}  // namespace redfront
