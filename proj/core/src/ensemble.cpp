#include "spinboson/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace spinboson {

const ObservableSeries& EnsembleSummary::series_for(const std::string& name) const {
    for (const ObservableSeries& s : series)
        if (s.name == name) return s;
    throw ConfigError("no observable series named " + name);
}

HomodyneSignal EnsembleSummary::homodyne_at(int site, size_t t_idx) const {
    return homodyne[static_cast<size_t>(site) * times.size() + t_idx];
}

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SPINBOSON_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<int>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

struct ChunkPartial {
    // [obs][grid] compensated sums of the samples and their squares
    std::vector<KahanSum> sum_re, sum_im, sq_re, sq_im;
    std::vector<long> counts; // [grid], shared by all observables
    // trajectory-level window means
    std::vector<KahanSum> w_re, w_im, w_re2, w_im2; // [obs]
    long w_traj = 0;
    std::vector<double> hist_samples;
    bool used = false;
};

std::vector<double> recording_grid(const NetworkSpec& spec, const SimulationConfig& config,
                                   long stride) {
    const double dt = effective_dt(config, spec);
    const long n_steps = step_count(config, spec);
    std::vector<double> times;
    for (long k = 0; k <= n_steps; ++k)
        if (k % stride == 0 || k == n_steps) times.push_back(static_cast<double>(k) * dt);
    return times;
}

} // namespace

EnsembleSummary run_ensemble(const NetworkSpec& spec, const SimulationConfig& config_in,
                             const std::vector<Complex>& initial_photons,
                             const RunOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    if (ValidationReport rep = validate(spec); !rep.ok())
        throw ConfigError("invalid network: " + rep.joined());
    SimulationConfig config = config_in;
    config.dt = effective_dt(config_in, spec);
    if (ValidationReport rep = validate(config, spec); !rep.ok())
        throw ConfigError("invalid simulation config: " + rep.joined());

    bool classical = spec.all_classical();
    if (options.representation == Representation::Cartesian) classical = false;
    if (options.representation == Representation::Spherical && !classical)
        throw ConfigError("spherical representation requires every spin infinite");
    const std::vector<Observable> observables = standard_observables(spec);
    const size_t m = observables.size();
    const long stride = std::max<long>(1, options.record_stride);
    const std::vector<double> times = recording_grid(spec, config, stride);
    const size_t K = times.size();
    const long n_traj = config.n_trajectories;

    // Grid slots inside the steady window, if one was requested.
    std::vector<size_t> window_idx;
    if (options.steady_window) {
        auto [lo, hi] = *options.steady_window;
        if (!(hi > lo)) throw ConfigError("steady window must have t1 > t0");
        for (size_t k = 0; k < K; ++k)
            if (times[k] >= lo - 1e-12 && times[k] <= hi + 1e-12) window_idx.push_back(k);
        if (window_idx.empty())
            throw ConfigError("steady window contains no recorded samples");
    }

    std::optional<size_t> hist_obs;
    if (options.histogram) {
        if (!options.steady_window)
            throw ConfigError("histogram collection requires a steady window");
        for (size_t o = 0; o < m; ++o)
            if (observables[o].name == options.histogram->observable) hist_obs = o;
        if (!hist_obs)
            throw ConfigError("histogram observable not found: " +
                              options.histogram->observable);
    }

    const long chunk = std::max<long>(1, options.chunk_size);
    const long n_chunks = (n_traj + chunk - 1) / chunk;
    std::vector<ChunkPartial> partials(static_cast<size_t>(n_chunks));
    std::vector<TrajectoryStatus> statuses(static_cast<size_t>(n_traj),
                                           TrajectoryStatus::Completed);
    std::vector<double> break_times(static_cast<size_t>(n_traj), 0.0);
    std::vector<long> clamp_counts(static_cast<size_t>(n_traj), 0);

    const PhaseSpacePoint init_cart =
        classical ? PhaseSpacePoint{} : initial_state_coherent(initial_photons, spec, config);
    const SphericalPoint init_sph =
        classical ? initial_state_spherical(initial_photons, spec, config) : SphericalPoint{};

    std::atomic<long> next_chunk{0};
    std::exception_ptr worker_error;
    std::mutex error_mutex;

    auto work = [&]() {
        try {
            for (;;) {
                const long c = next_chunk.fetch_add(1);
                if (c >= n_chunks) return;
                ChunkPartial& part = partials[static_cast<size_t>(c)];
                part.sum_re.assign(m * K, {});
                part.sum_im.assign(m * K, {});
                part.sq_re.assign(m * K, {});
                part.sq_im.assign(m * K, {});
                part.counts.assign(K, 0);
                part.w_re.assign(m, {});
                part.w_im.assign(m, {});
                part.w_re2.assign(m, {});
                part.w_im2.assign(m, {});
                part.used = true;

                const long k_lo = c * chunk;
                const long k_hi = std::min(n_traj, k_lo + chunk);
                for (long k = k_lo; k < k_hi; ++k) {
                    TrajectoryRng rng(config.master_seed, static_cast<std::uint64_t>(k));
                    TrajectorySeries series;
                    if (classical) {
                        SphericalRecord rec =
                            integrate_classical(init_sph, spec, config, rng, stride);
                        series = evaluate_series(rec, observables, spec);
                    } else {
                        TrajectoryRecord rec = integrate(init_cart, spec, config, rng, stride);
                        series = evaluate_series(rec, observables, spec);
                    }
                    statuses[static_cast<size_t>(k)] = series.status;
                    break_times[static_cast<size_t>(k)] = series.breakdown_time;
                    clamp_counts[static_cast<size_t>(k)] = series.clamp_events;

                    const size_t recorded = series.values.empty() ? 0 : series.values[0].size();
                    for (size_t t_idx = 0; t_idx < recorded; ++t_idx) {
                        if (!sample_included(series, times[t_idx], config.spike_policy))
                            continue;
                        ++part.counts[t_idx];
                        for (size_t o = 0; o < m; ++o) {
                            const Complex v = series.values[o][t_idx];
                            part.sum_re[o * K + t_idx].add(v.real());
                            part.sum_im[o * K + t_idx].add(v.imag());
                            part.sq_re[o * K + t_idx].add(v.real() * v.real());
                            part.sq_im[o * K + t_idx].add(v.imag() * v.imag());
                        }
                    }

                    if (!window_idx.empty()) {
                        bool full = true;
                        for (size_t t_idx : window_idx)
                            full = full && t_idx < recorded &&
                                   sample_included(series, times[t_idx], config.spike_policy);
                        if (full) {
                            ++part.w_traj;
                            for (size_t o = 0; o < m; ++o) {
                                KahanSum wr, wi;
                                for (size_t t_idx : window_idx) {
                                    const Complex v = series.values[o][t_idx];
                                    wr.add(v.real());
                                    wi.add(v.imag());
                                }
                                const double mr = wr.sum / static_cast<double>(window_idx.size());
                                const double mi = wi.sum / static_cast<double>(window_idx.size());
                                part.w_re[o].add(mr);
                                part.w_im[o].add(mi);
                                part.w_re2[o].add(mr * mr);
                                part.w_im2[o].add(mi * mi);
                            }
                            if (hist_obs) {
                                for (size_t t_idx : window_idx)
                                    part.hist_samples.push_back(
                                        series.values[*hist_obs][t_idx].real());
                            }
                        }
                    }
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!worker_error) worker_error = std::current_exception();
        }
    };

    const int n_threads = std::min<long>(resolve_thread_count(options.n_threads), n_chunks);
    if (n_threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_threads; ++w) pool.emplace_back(work);
        for (std::thread& th : pool) th.join();
    }
    if (worker_error) std::rethrow_exception(worker_error);

    // Merge chunk partials in chunk order; the tree does not depend on how
    // chunks were distributed over workers.
    EnsembleSummary summary;
    summary.times = times;
    summary.observables = observables;
    summary.n_trajectories = n_traj;
    summary.series.resize(m);

    std::vector<KahanSum> sum_re(m * K), sum_im(m * K), sq_re(m * K), sq_im(m * K);
    std::vector<long> counts(K, 0);
    std::vector<KahanSum> w_re(m), w_im(m), w_re2(m), w_im2(m);
    long w_traj = 0;
    std::vector<double> hist_samples;
    for (const ChunkPartial& part : partials) {
        if (!part.used) continue;
        for (size_t j = 0; j < m * K; ++j) {
            sum_re[j].merge(part.sum_re[j]);
            sum_im[j].merge(part.sum_im[j]);
            sq_re[j].merge(part.sq_re[j]);
            sq_im[j].merge(part.sq_im[j]);
        }
        for (size_t t_idx = 0; t_idx < K; ++t_idx) counts[t_idx] += part.counts[t_idx];
        for (size_t o = 0; o < m; ++o) {
            w_re[o].merge(part.w_re[o]);
            w_im[o].merge(part.w_im[o]);
            w_re2[o].merge(part.w_re2[o]);
            w_im2[o].merge(part.w_im2[o]);
        }
        w_traj += part.w_traj;
        hist_samples.insert(hist_samples.end(), part.hist_samples.begin(),
                            part.hist_samples.end());
    }

    for (size_t o = 0; o < m; ++o) {
        ObservableSeries& s = summary.series[o];
        s.name = observables[o].name;
        s.mean.assign(K, Complex{});
        s.std_error.assign(K, 0.0);
        s.n_samples.assign(K, 0);
        for (size_t t_idx = 0; t_idx < K; ++t_idx) {
            const long n = counts[t_idx];
            s.n_samples[t_idx] = n;
            if (n == 0) continue;
            const double mr = sum_re[o * K + t_idx].sum / n;
            const double mi = sum_im[o * K + t_idx].sum / n;
            s.mean[t_idx] = Complex{mr, mi};
            if (n > 1) {
                double var = (sq_re[o * K + t_idx].sum - n * mr * mr) +
                             (sq_im[o * K + t_idx].sum - n * mi * mi);
                var = std::max(0.0, var) / (n - 1);
                s.std_error[t_idx] = std::sqrt(var / n);
            }
        }
    }

    if (!window_idx.empty()) {
        for (size_t o = 0; o < m; ++o) {
            WindowStats stats;
            stats.n_trajectories = w_traj;
            if (w_traj > 0) {
                const double mr = w_re[o].sum / w_traj;
                const double mi = w_im[o].sum / w_traj;
                stats.mean = Complex{mr, mi};
                if (w_traj > 1) {
                    double vr = std::max(0.0, w_re2[o].sum - w_traj * mr * mr) / (w_traj - 1);
                    double vi = std::max(0.0, w_im2[o].sum - w_traj * mi * mi) / (w_traj - 1);
                    stats.std_error = std::sqrt(vr / w_traj);
                    stats.std_error_im = std::sqrt(vi / w_traj);
                }
            }
            summary.window[observables[o].name] = stats;
        }
    }

    if (options.histogram && hist_obs) {
        const HistogramRequest& req = *options.histogram;
        double lo = req.lo.value_or(0.0), hi = req.hi.value_or(0.0);
        if (!req.lo || !req.hi) {
            if (hist_samples.empty())
                throw EmptyEnsembleError("no samples available for the histogram range");
            auto [mn, mx] = std::minmax_element(hist_samples.begin(), hist_samples.end());
            if (!req.lo) lo = *mn;
            if (!req.hi) hi = *mx;
            if (!(hi > lo)) hi = lo + 1.0;
        }
        summary.histogram = current_histogram(hist_samples, req.n_bins, lo, hi);
    }

    for (long k = 0; k < n_traj; ++k) {
        const TrajectoryStatus st = statuses[static_cast<size_t>(k)];
        if (st == TrajectoryStatus::BrokeDown) ++summary.n_broken;
        if (st == TrajectoryStatus::Diverged) ++summary.n_diverged;
        if (st != TrajectoryStatus::Completed)
            summary.breakdown_times.push_back(break_times[static_cast<size_t>(k)]);
        summary.clamp_events += clamp_counts[static_cast<size_t>(k)];
    }

    // Interference signal from the mean amplitudes.
    summary.homodyne.resize(static_cast<size_t>(spec.n_sites()) * K);
    for (int site = 0; site < spec.n_sites(); ++site) {
        const ObservableSeries& sa = summary.series_for("alpha_" + std::to_string(site));
        const ObservableSeries& sb = summary.series_for("beta_" + std::to_string(site));
        for (size_t t_idx = 0; t_idx < K; ++t_idx)
            summary.homodyne[static_cast<size_t>(site) * K + t_idx] =
                homodyne(sa.mean[t_idx], sb.mean[t_idx]);
    }

    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return summary;
}

ScanResult scan_parameter(const NetworkSpec& spec, const SimulationConfig& config,
                          const std::vector<Complex>& initial_photons,
                          const std::string& parameter, const std::vector<double>& values,
                          const RunOptions& options) {
    if (!options.steady_window)
        throw ConfigError("scan_parameter requires a steady window");
    if (spec.hopping.empty()) throw ConfigError("scan_parameter requires at least one bond");
    const auto first_bond = spec.hopping.begin()->first;
    const std::string current_name = "current_" + std::to_string(first_bond.first) + "_" +
                                     std::to_string(first_bond.second);

    auto apply = [&](NetworkSpec& s, double v) {
        if (parameter == "J") {
            for (auto& [key, J] : s.hopping) {
                (void)key;
                J = v;
            }
            return;
        }
        for (SiteParams& p : s.sites) {
            if (parameter == "g") p.g = v;
            else if (parameter == "kappa") p.kappa = v;
            else if (parameter == "nbar") p.nbar = v;
            else if (parameter == "drive_amplitude") p.drive_amplitude = v;
            else throw ConfigError("unknown scan parameter: " + parameter);
        }
    };

    ScanResult result;
    result.parameter = parameter;
    result.current_name = current_name;
    for (size_t idx = 0; idx < values.size(); ++idx) {
        NetworkSpec point_spec = spec;
        apply(point_spec, values[idx]);
        SimulationConfig point_config = config;
        point_config.master_seed = derive_seed(config.master_seed, idx);
        EnsembleSummary summary =
            run_ensemble(point_spec, point_config, initial_photons, options);
        ScanPoint point;
        point.value = values[idx];
        point.current = summary.window.at(current_name);
        point.n_broken = summary.n_broken;
        point.n_diverged = summary.n_diverged;
        const ObservableSeries& series = summary.series_for(current_name);
        point.current_mean = series.mean;
        point.current_std_error = series.std_error;
        if (result.times.empty()) result.times = summary.times;
        result.points.push_back(point);
    }
    return result;
}

} // namespace spinboson
