#include "spinboson/engine.hpp"

#include <algorithm>
#include <cmath>

namespace spinboson {

std::string to_string(TrajectoryStatus s) {
    switch (s) {
    case TrajectoryStatus::Completed: return "completed";
    case TrajectoryStatus::BrokeDown: return "broke_down";
    case TrajectoryStatus::Diverged: return "diverged";
    }
    return "?";
}

long step_count(const SimulationConfig& config, const NetworkSpec& spec) {
    const double dt = effective_dt(config, spec);
    return static_cast<long>(std::ceil(config.t_final / dt - 1e-9));
}

PhaseSpacePoint step(const PhaseSpacePoint& state, double t, double dt,
                     const NetworkSpec& spec, const SimulationConfig& config,
                     TrajectoryRng& rng, PhaseSpacePoint* deterministic) {
    PhaseSpacePoint A = drift(state, spec, t);
    PhaseSpacePoint xi = sample_noise(state, spec, dt, rng);
    PhaseSpacePoint out;
    out.sites.resize(state.sites.size());
    if (deterministic) deterministic->sites.resize(state.sites.size());
    const double eps = config.regularization_epsilon;
    for (size_t i = 0; i < state.sites.size(); ++i) {
        const SiteAmplitudes& x = state.sites[i];
        const SiteAmplitudes& a = A.sites[i];
        const SiteAmplitudes& n = xi.sites[i];
        SiteAmplitudes& y = out.sites[i];
        y.alpha = x.alpha + a.alpha * dt;
        y.beta = x.beta + a.beta * dt;
        y.z = x.z + (a.z - regularization_force(x.z, eps)) * dt;
        y.w = x.w + (a.w - regularization_force(x.w, eps)) * dt;
        if (deterministic) deterministic->sites[i] = y;
        y.alpha += n.alpha;
        y.beta += n.beta;
        y.z += n.z;
        y.w += n.w;
    }
    return out;
}

SphericalPoint step_classical(const SphericalPoint& state, double t, double dt,
                              const NetworkSpec& spec, const SimulationConfig& config,
                              TrajectoryRng& rng, long* clamp_events,
                              SphericalPoint* deterministic) {
    (void)config;
    SphericalPoint A = spherical_drift(state, spec, t);
    SphericalPoint xi = sample_noise(state, spec, dt, rng);
    SphericalPoint out;
    out.sites.resize(state.sites.size());
    if (deterministic) deterministic->sites.resize(state.sites.size());
    for (size_t i = 0; i < state.sites.size(); ++i) {
        const SphericalSite& x = state.sites[i];
        SphericalSite& y = out.sites[i];
        y.alpha = x.alpha + A.sites[i].alpha * dt;
        y.phi = x.phi + A.sites[i].phi * dt;
        y.c = x.c + A.sites[i].c * dt;
        if (y.c > 1.0 || y.c < -1.0) {
            y.c = std::clamp(y.c, -1.0, 1.0);
            if (clamp_events) ++*clamp_events;
        }
        if (deterministic) deterministic->sites[i] = y;
        y.alpha += xi.sites[i].alpha;
    }
    return out;
}

namespace {

bool within_bounds(const PhaseSpacePoint& state, double radius) {
    for (const SiteAmplitudes& x : state.sites) {
        for (Complex v : {x.alpha, x.beta, x.z, x.w}) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
            if (std::abs(v) > radius) return false;
        }
    }
    return true;
}

bool within_bounds(const SphericalPoint& state, double radius) {
    for (const SphericalSite& x : state.sites) {
        if (!std::isfinite(x.alpha.real()) || !std::isfinite(x.alpha.imag()) ||
            !std::isfinite(x.phi) || !std::isfinite(x.c))
            return false;
        if (std::abs(x.alpha) > radius || std::abs(x.phi) > radius) return false;
    }
    return true;
}

// Shared stepping loop for both representations.
template <typename State, typename Record, typename StepFn, typename MonitorFn,
          typename RateFn>
Record run_grid(const State& initial, const NetworkSpec& spec,
                const SimulationConfig& config, long record_stride, StepFn do_step,
                MonitorFn monitor, RateFn rate_fn) {
    Record rec;
    const double dt = effective_dt(config, spec);
    const long n_steps = step_count(config, spec);
    if (record_stride < 1) record_stride = 1;

    auto on_grid = [&](long k) { return k % record_stride == 0 || k == n_steps; };

    State state = initial;
    auto monitor_or_break = [&](const State& s, double t, bool* ok) {
        try {
            *ok = true;
            return monitor(s);
        } catch (const PoleError&) {
            *ok = false;
            rec.status = TrajectoryStatus::BrokeDown;
            rec.breakdown_time = t;
            return decltype(monitor(s)){};
        }
    };

    bool ok = true;
    auto E = monitor_or_break(state, 0.0, &ok);
    if (!ok) return rec;
    rec.times.push_back(0.0);
    rec.states.push_back(state);

    for (long k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double t_next = static_cast<double>(k + 1) * dt;
        const auto rate = rate_fn(state);
        State next, det;
        try {
            next = do_step(state, t, dt, &det);
        } catch (const PoleError&) {
            rec.status = TrajectoryStatus::BrokeDown;
            rec.breakdown_time = t;
            return rec;
        }
        rec.steps_taken = k + 1;

        if (!within_bounds(next, config.divergence_radius)) {
            rec.status = TrajectoryStatus::Diverged;
            rec.breakdown_time = t_next;
            return rec;
        }
        // The watchdog judges only the noise-free part of the update; random
        // kicks move the monitor but are not conservation errors.
        auto E_det = monitor_or_break(det, t_next, &ok);
        if (!ok) {
            rec.breakdown_time = t_next;
            return rec;
        }
        auto E_next = monitor_or_break(next, t_next, &ok);
        if (!ok) {
            rec.breakdown_time = t_next;
            return rec;
        }
        if (std::abs(E_det - (E + rate * dt)) >
            config.breakdown_threshold * (1.0 + std::abs(E))) {
            rec.status = TrajectoryStatus::BrokeDown;
            rec.breakdown_time = t_next;
            if (on_grid(k + 1)) { // keep the spiking sample for downstream policy
                rec.times.push_back(t_next);
                rec.states.push_back(next);
            }
            return rec;
        }

        state = std::move(next);
        E = E_next;
        if (on_grid(k + 1)) {
            rec.times.push_back(t_next);
            rec.states.push_back(state);
        }
    }
    rec.status = TrajectoryStatus::Completed;
    return rec;
}

} // namespace

TrajectoryRecord integrate(const PhaseSpacePoint& initial, const NetworkSpec& spec,
                           const SimulationConfig& config, TrajectoryRng& rng,
                           long record_stride) {
    return run_grid<PhaseSpacePoint, TrajectoryRecord>(
        initial, spec, config, record_stride,
        [&](const PhaseSpacePoint& s, double t, double dt, PhaseSpacePoint* det) {
            return step(s, t, dt, spec, config, rng, det);
        },
        [](const PhaseSpacePoint& s) { return conserved_monitor(s); },
        [&](const PhaseSpacePoint& s) { return monitor_dissipation_rate(s, spec); });
}

SphericalRecord integrate_classical(const SphericalPoint& initial, const NetworkSpec& spec,
                                    const SimulationConfig& config, TrajectoryRng& rng,
                                    long record_stride) {
    if (!spec.all_classical())
        throw ConfigError("spherical integration requires every site spin infinite");
    long clamps = 0;
    SphericalRecord rec = run_grid<SphericalPoint, SphericalRecord>(
        initial, spec, config, record_stride,
        [&](const SphericalPoint& s, double t, double dt, SphericalPoint* det) {
            return step_classical(s, t, dt, spec, config, rng, &clamps, det);
        },
        [](const SphericalPoint& s) { return conserved_monitor(s); },
        [&](const SphericalPoint& s) { return monitor_dissipation_rate(s, spec); });
    rec.clamp_events = clamps;
    return rec;
}

} // namespace spinboson
