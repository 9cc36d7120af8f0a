#ifndef LEVYKB_GRID_HPP
#define LEVYKB_GRID_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>

#include "levykb/errors.hpp"

namespace levykb {

// Uniform time grid on [t0, t0 + steps*dt].
struct TimeGrid {
    double t0 = 0.0;
    double dt = 0.0;
    std::size_t steps = 0;

    TimeGrid() = default;
    TimeGrid(double t0_, double dt_, std::size_t steps_) : t0(t0_), dt(dt_), steps(steps_) {
        if (!(dt > 0.0)) throw grid_error("TimeGrid: dt must be positive");
        if (steps == 0) throw grid_error("TimeGrid: needs at least one step");
    }

    static TimeGrid from_horizon(double t0, double horizon, double dt) {
        if (!(dt > 0.0)) throw grid_error("TimeGrid: dt must be positive");
        if (!(horizon > 0.0)) throw grid_error("TimeGrid: horizon must be positive");
        auto n = static_cast<std::size_t>(std::llround(horizon / dt));
        if (n == 0 || std::abs(n * dt - horizon) > 1e-9 * std::max(1.0, horizon))
            throw grid_error("TimeGrid: horizon is not an integer multiple of dt");
        return TimeGrid(t0, dt, n);
    }

    double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
    double horizon() const { return time(steps); }
    std::size_t points() const { return steps + 1; }

    bool same_as(const TimeGrid& o) const {
        return steps == o.steps && std::abs(t0 - o.t0) < 1e-12 && std::abs(dt - o.dt) < 1e-15;
    }
};

} // namespace levykb

#endif
