#pragma once

#include <optional>
#include <string>
#include <vector>

#include "engine.hpp"
#include "model.hpp"

namespace spinboson {

// Phase-space estimators evaluated on one sample of the doubled variables.
// Averaged over an ensemble they reproduce normally ordered expectations.

// beta * alpha; real part is the cavity occupation in rescaled units.
Complex photon_number(const SiteAmplitudes& site);
// -s (1 - z w)/(1 + z w); the classical limit uses the unit-sphere projection.
Complex spin_z(const SiteAmplitudes& site, const Spin& spin);
Complex spin_x(const SiteAmplitudes& site, const Spin& spin);
Complex spin_y(const SiteAmplitudes& site, const Spin& spin);
// Photon flow from site i into site j through the bond amplitude J.
Complex intercavity_current(const SiteAmplitudes& site_i, const SiteAmplitudes& site_j,
                            double J);

// Interference signal built from ensemble mean amplitudes. The imaginary
// residuals vanish on conjugate ensembles and are reported as diagnostics.
struct HomodyneSignal {
    double h = 0.0;
    double im_i = 0.0;
    double im_q = 0.0;
};
HomodyneSignal homodyne(Complex mean_alpha, Complex mean_beta);

enum class ObservableKind {
    PhotonNumber,
    SpinZ,
    SpinX,
    SpinY,
    Alpha,
    Beta,
    Current,
    Monitor,
};

struct Observable {
    ObservableKind kind;
    int site = 0;    // first site for Current
    int partner = 0; // second site for Current
    std::string name;
};

// photon_number / spin components / amplitudes per site, current per bond,
// plus the excitation monitor.
std::vector<Observable> standard_observables(const NetworkSpec& spec);

Complex evaluate(const Observable& obs, const PhaseSpacePoint& state,
                 const NetworkSpec& spec);
Complex evaluate(const Observable& obs, const SphericalPoint& state,
                 const NetworkSpec& spec);

// Observable values of one trajectory on the shared recording grid. values[o]
// is a prefix of the grid; trajectories that ended early are shorter.
struct TrajectorySeries {
    std::vector<std::vector<Complex>> values; // [observable][grid index]
    TrajectoryStatus status = TrajectoryStatus::Completed;
    double breakdown_time = std::numeric_limits<double>::quiet_NaN();
    long clamp_events = 0;
};

TrajectorySeries evaluate_series(const TrajectoryRecord& record,
                                 const std::vector<Observable>& observables,
                                 const NetworkSpec& spec);
TrajectorySeries evaluate_series(const SphericalRecord& record,
                                 const std::vector<Observable>& observables,
                                 const NetworkSpec& spec);

// Whether sample `idx` (at time `t`) of a trajectory participates in
// ensemble statistics under the given policy.
bool sample_included(const TrajectorySeries& traj, double t, SpikePolicy policy);

struct ObservableSeries {
    std::string name;
    std::vector<Complex> mean;
    std::vector<double> std_error; // sqrt((var_re + var_im) / n)
    std::vector<long> n_samples;
};

// Ensemble mean and standard error on the recording grid. Compensated
// accumulation keeps the result invariant under trajectory permutations to
// better than 1e-12 relative. Throws EmptyEnsembleError via ConfigError when
// no trajectory contributes anywhere.
ObservableSeries reduce_ensemble(const std::vector<TrajectorySeries>& trajectories,
                                 const std::vector<double>& times, size_t observable_index,
                                 const std::string& name, SpikePolicy policy);

struct Histogram {
    std::vector<double> bin_left;
    std::vector<double> bin_right;
    std::vector<double> probability;
    long total_samples = 0;
    // Probability mass in bins entirely at or below zero.
    double mass_below(double threshold) const;
};

// Distribution of the real part of one observable over all included samples
// inside the time window. Out-of-range samples are clamped into the edge bins.
Histogram current_histogram(const std::vector<double>& samples, int n_bins, double lo,
                            double hi);

// Compensated (Kahan) accumulator used by every ensemble reduction.
struct KahanSum {
    double sum = 0.0;
    double c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    void merge(const KahanSum& other) {
        add(other.sum);
        add(-other.c);
    }
};

} // namespace spinboson
