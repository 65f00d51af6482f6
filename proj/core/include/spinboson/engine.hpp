#pragma once

#include <limits>
#include <vector>

#include "dynamics.hpp"
#include "model.hpp"
#include "rng.hpp"

namespace spinboson {

enum class TrajectoryStatus {
    Completed, // reached t_final
    BrokeDown, // monitor jump or phase-space pole
    Diverged,  // non-finite variable or |variable| beyond the divergence radius
};

std::string to_string(TrajectoryStatus s);

// A single integrated trajectory sampled on the recording grid
// {0, stride*dt, 2*stride*dt, ...} plus the final step. States that failed
// the divergence checks are never recorded; the state at which the monitor
// flagged a breakdown is recorded when it falls on the grid, so spike-policy
// handling downstream can keep or drop it.
struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<PhaseSpacePoint> states;
    TrajectoryStatus status = TrajectoryStatus::Completed;
    double breakdown_time = std::numeric_limits<double>::quiet_NaN();
    long steps_taken = 0;
};

struct SphericalRecord {
    std::vector<double> times;
    std::vector<SphericalPoint> states;
    TrajectoryStatus status = TrajectoryStatus::Completed;
    double breakdown_time = std::numeric_limits<double>::quiet_NaN();
    long steps_taken = 0;
    long clamp_events = 0; // polar projection pushed back into [-1, 1]
};

// One fixed-step Euler-Maruyama update of the doubled variables, with the
// radial regularization force subtracted from the spin sector. When
// deterministic is non-null it receives the noise-free part of the update,
// which the integrator's monitor watchdog compares against the expected
// dissipation rate (random kicks are not conservation errors).
PhaseSpacePoint step(const PhaseSpacePoint& state, double t, double dt,
                     const NetworkSpec& spec, const SimulationConfig& config,
                     TrajectoryRng& rng, PhaseSpacePoint* deterministic = nullptr);

SphericalPoint step_classical(const SphericalPoint& state, double t, double dt,
                              const NetworkSpec& spec, const SimulationConfig& config,
                              TrajectoryRng& rng, long* clamp_events = nullptr,
                              SphericalPoint* deterministic = nullptr);

// Integrates to t_final on the fixed grid, watching the excitation monitor:
// a step whose noise-free monitor change deviates from the expected
// dissipative drift by more than breakdown_threshold * (1 + |E|) ends the
// trajectory.
TrajectoryRecord integrate(const PhaseSpacePoint& initial, const NetworkSpec& spec,
                           const SimulationConfig& config, TrajectoryRng& rng,
                           long record_stride = 1);

// Classical-limit counterpart on the sphere; requires every site spin infinite.
SphericalRecord integrate_classical(const SphericalPoint& initial, const NetworkSpec& spec,
                                    const SimulationConfig& config, TrajectoryRng& rng,
                                    long record_stride = 1);

// Number of Euler steps taken to reach t_final.
long step_count(const SimulationConfig& config, const NetworkSpec& spec);

} // namespace spinboson
