#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "observables.hpp"

namespace spinboson {

struct WindowStats {
    Complex mean{};
    double std_error = 0.0; // trajectory-level scatter of window means (real part)
    double std_error_im = 0.0;
    long n_trajectories = 0;
};

struct HistogramRequest {
    std::string observable = "current_0_1";
    int n_bins = 200;
    std::optional<double> lo; // unset: span of the collected samples
    std::optional<double> hi;
};

// Which integrator carries the trajectories. Auto picks the spherical chart
// when every spin is infinite and the doubled variables otherwise; Spherical
// demands an all-classical network.
enum class Representation { Auto, Cartesian, Spherical };

struct RunOptions {
    long record_stride = 1;
    int n_threads = 0; // 0: SPINBOSON_THREADS, then hardware concurrency
    std::optional<std::pair<double, double>> steady_window;
    std::optional<HistogramRequest> histogram;
    long chunk_size = 256; // reduction granularity; fixed so results do not
                           // depend on the worker count
    Representation representation = Representation::Auto;
};

struct EnsembleSummary {
    std::vector<double> times;
    std::vector<Observable> observables;
    std::vector<ObservableSeries> series; // one per observable
    std::vector<HomodyneSignal> homodyne; // per site per time, site-major
    // Window-averaged statistics per observable name, present when a steady
    // window was requested. Only trajectories with a full set of window
    // samples under the spike policy contribute.
    std::map<std::string, WindowStats> window;
    std::optional<Histogram> histogram;

    long n_trajectories = 0;
    long n_broken = 0;
    long n_diverged = 0;
    long clamp_events = 0;
    std::vector<double> breakdown_times; // trajectory order, broken ones only
    double wall_seconds = 0.0;           // never written to output files

    const ObservableSeries& series_for(const std::string& name) const;
    HomodyneSignal homodyne_at(int site, size_t t_idx) const;
};

int resolve_thread_count(int requested);

// Integrates n_trajectories with per-trajectory streams derived from
// (master_seed, index) and reduces them on the recording grid. Results are
// bit-identical for any worker count: trajectories are reduced in fixed
// chunks by index, and chunk partials merge in index order.
EnsembleSummary run_ensemble(const NetworkSpec& spec, const SimulationConfig& config,
                             const std::vector<Complex>& initial_photons,
                             const RunOptions& options);

struct ScanPoint {
    double value = 0.0;
    WindowStats current;
    long n_broken = 0;
    long n_diverged = 0;
    // Full time series of the bond current at this parameter value.
    std::vector<Complex> current_mean;
    std::vector<double> current_std_error;
};

struct ScanResult {
    std::string parameter;
    std::string current_name;
    std::vector<double> times; // shared recording grid
    std::vector<ScanPoint> points;
};

// Repeats run_ensemble over values of one scalar parameter ("g",
// "drive_amplitude", "kappa", "nbar", or "J" for every bond) and reports the
// window-averaged current on the first bond. Each point derives its own
// master seed from (master_seed, point index).
ScanResult scan_parameter(const NetworkSpec& spec, const SimulationConfig& config,
                          const std::vector<Complex>& initial_photons,
                          const std::string& parameter, const std::vector<double>& values,
                          const RunOptions& options);

} // namespace spinboson
