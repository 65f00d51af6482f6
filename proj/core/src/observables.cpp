#include "spinboson/observables.hpp"

#include <cmath>

namespace spinboson {

namespace {

constexpr double kPoleTol = 1e-14;

Complex spin_denom(const SiteAmplitudes& site) {
    Complex denom = 1.0 + site.z * site.w;
    if (std::abs(denom) <= kPoleTol) throw PoleError("spin estimator pole 1 + z w = 0");
    return denom;
}

double spin_scale(const Spin& spin) { return spin.infinite ? 1.0 : spin.s; }

} // namespace

Complex photon_number(const SiteAmplitudes& site) { return site.beta * site.alpha; }

Complex spin_z(const SiteAmplitudes& site, const Spin& spin) {
    return -spin_scale(spin) * (1.0 - site.z * site.w) / spin_denom(site);
}

Complex spin_x(const SiteAmplitudes& site, const Spin& spin) {
    return spin_scale(spin) * (site.z + site.w) / spin_denom(site);
}

Complex spin_y(const SiteAmplitudes& site, const Spin& spin) {
    return spin_scale(spin) * (site.z - site.w) / (I * spin_denom(site));
}

Complex intercavity_current(const SiteAmplitudes& site_i, const SiteAmplitudes& site_j,
                            double J) {
    return I * J * (site_i.beta * site_j.alpha - site_j.beta * site_i.alpha);
}

HomodyneSignal homodyne(Complex mean_alpha, Complex mean_beta) {
    const Complex i_quad = 0.5 * (mean_alpha + mean_beta);
    const Complex q_quad = 0.5 * I * (mean_beta - mean_alpha);
    HomodyneSignal sig;
    sig.h = i_quad.real() * i_quad.real() + q_quad.real() * q_quad.real();
    sig.im_i = i_quad.imag();
    sig.im_q = q_quad.imag();
    return sig;
}

std::vector<Observable> standard_observables(const NetworkSpec& spec) {
    std::vector<Observable> obs;
    for (int i = 0; i < spec.n_sites(); ++i) {
        const std::string tag = std::to_string(i);
        obs.push_back({ObservableKind::PhotonNumber, i, 0, "photon_number_" + tag});
        obs.push_back({ObservableKind::SpinZ, i, 0, "spin_z_" + tag});
        obs.push_back({ObservableKind::SpinX, i, 0, "spin_x_" + tag});
        obs.push_back({ObservableKind::SpinY, i, 0, "spin_y_" + tag});
        obs.push_back({ObservableKind::Alpha, i, 0, "alpha_" + tag});
        obs.push_back({ObservableKind::Beta, i, 0, "beta_" + tag});
    }
    for (const auto& [key, J] : spec.hopping) {
        if (J == 0.0) continue;
        auto [i, j] = key;
        obs.push_back({ObservableKind::Current, i, j,
                       "current_" + std::to_string(i) + "_" + std::to_string(j)});
    }
    obs.push_back({ObservableKind::Monitor, 0, 0, "monitor"});
    return obs;
}

Complex evaluate(const Observable& obs, const PhaseSpacePoint& state,
                 const NetworkSpec& spec) {
    const auto& site = state.sites[static_cast<size_t>(obs.site)];
    const Spin spin = spec.sites[static_cast<size_t>(obs.site)].spin;
    switch (obs.kind) {
    case ObservableKind::PhotonNumber: return photon_number(site);
    case ObservableKind::SpinZ: return spin_z(site, spin);
    case ObservableKind::SpinX: return spin_x(site, spin);
    case ObservableKind::SpinY: return spin_y(site, spin);
    case ObservableKind::Alpha: return site.alpha;
    case ObservableKind::Beta: return site.beta;
    case ObservableKind::Current:
        return intercavity_current(site, state.sites[static_cast<size_t>(obs.partner)],
                                   spec.hopping_at(obs.site, obs.partner));
    case ObservableKind::Monitor: return conserved_monitor(state);
    }
    return {};
}

Complex evaluate(const Observable& obs, const SphericalPoint& state,
                 const NetworkSpec& spec) {
    if (obs.kind == ObservableKind::Monitor) return conserved_monitor(state);
    if (obs.kind == ObservableKind::Current) {
        SiteAmplitudes a = spherical_to_amplitudes(state.sites[static_cast<size_t>(obs.site)]);
        SiteAmplitudes b =
            spherical_to_amplitudes(state.sites[static_cast<size_t>(obs.partner)]);
        return intercavity_current(a, b, spec.hopping_at(obs.site, obs.partner));
    }
    const SphericalSite& s = state.sites[static_cast<size_t>(obs.site)];
    switch (obs.kind) {
    case ObservableKind::PhotonNumber: return Complex{std::norm(s.alpha), 0.0};
    case ObservableKind::SpinZ: return Complex{-s.c, 0.0};
    case ObservableKind::SpinX:
        return std::sqrt(std::max(0.0, 1.0 - s.c * s.c)) * std::cos(s.phi);
    case ObservableKind::SpinY:
        return std::sqrt(std::max(0.0, 1.0 - s.c * s.c)) * std::sin(s.phi);
    case ObservableKind::Alpha: return s.alpha;
    case ObservableKind::Beta: return std::conj(s.alpha);
    default: return {};
    }
}

namespace {

template <typename Record>
TrajectorySeries evaluate_series_impl(const Record& record,
                                      const std::vector<Observable>& observables,
                                      const NetworkSpec& spec) {
    TrajectorySeries out;
    out.status = record.status;
    out.breakdown_time = record.breakdown_time;
    out.values.resize(observables.size());
    for (auto& v : out.values) v.reserve(record.states.size());
    for (const auto& state : record.states)
        for (size_t o = 0; o < observables.size(); ++o)
            out.values[o].push_back(evaluate(observables[o], state, spec));
    return out;
}

} // namespace

TrajectorySeries evaluate_series(const TrajectoryRecord& record,
                                 const std::vector<Observable>& observables,
                                 const NetworkSpec& spec) {
    return evaluate_series_impl(record, observables, spec);
}

TrajectorySeries evaluate_series(const SphericalRecord& record,
                                 const std::vector<Observable>& observables,
                                 const NetworkSpec& spec) {
    TrajectorySeries out = evaluate_series_impl(record, observables, spec);
    out.clamp_events = record.clamp_events;
    return out;
}

bool sample_included(const TrajectorySeries& traj, double t, SpikePolicy policy) {
    switch (policy) {
    case SpikePolicy::KeepAll: return true;
    case SpikePolicy::TruncateTrajectory: return traj.status == TrajectoryStatus::Completed;
    case SpikePolicy::ExcludeAfterBreakdown:
        return traj.status == TrajectoryStatus::Completed ||
               t < traj.breakdown_time - 1e-15;
    }
    return true;
}

ObservableSeries reduce_ensemble(const std::vector<TrajectorySeries>& trajectories,
                                 const std::vector<double>& times, size_t observable_index,
                                 const std::string& name, SpikePolicy policy) {
    if (trajectories.empty()) throw EmptyEnsembleError("reduce_ensemble over no trajectories");
    const size_t K = times.size();
    ObservableSeries out;
    out.name = name;
    out.mean.assign(K, Complex{});
    out.std_error.assign(K, 0.0);
    out.n_samples.assign(K, 0);

    for (size_t t_idx = 0; t_idx < K; ++t_idx) {
        KahanSum sr, si, srr, sii;
        long n = 0;
        for (const TrajectorySeries& traj : trajectories) {
            const auto& vals = traj.values[observable_index];
            if (t_idx >= vals.size()) continue;
            if (!sample_included(traj, times[t_idx], policy)) continue;
            const Complex v = vals[t_idx];
            sr.add(v.real());
            si.add(v.imag());
            srr.add(v.real() * v.real());
            sii.add(v.imag() * v.imag());
            ++n;
        }
        out.n_samples[t_idx] = n;
        if (n == 0) continue;
        const double mr = sr.sum / n;
        const double mi = si.sum / n;
        out.mean[t_idx] = Complex{mr, mi};
        if (n > 1) {
            double var = (srr.sum - n * mr * mr) + (sii.sum - n * mi * mi);
            var = std::max(0.0, var) / (n - 1);
            out.std_error[t_idx] = std::sqrt(var / n);
        }
    }

    bool any = false;
    for (long n : out.n_samples) any = any || n > 0;
    if (!any) throw EmptyEnsembleError("no trajectory contributed any sample");
    return out;
}

double Histogram::mass_below(double threshold) const {
    double mass = 0.0;
    for (size_t b = 0; b < probability.size(); ++b)
        if (bin_right[b] <= threshold + 1e-15) mass += probability[b];
    return mass;
}

Histogram current_histogram(const std::vector<double>& samples, int n_bins, double lo,
                            double hi) {
    if (n_bins < 1 || !(hi > lo)) throw ConfigError("histogram needs n_bins >= 1 and hi > lo");
    Histogram h;
    h.bin_left.resize(static_cast<size_t>(n_bins));
    h.bin_right.resize(static_cast<size_t>(n_bins));
    const double width = (hi - lo) / n_bins;
    for (int b = 0; b < n_bins; ++b) {
        h.bin_left[static_cast<size_t>(b)] = lo + b * width;
        h.bin_right[static_cast<size_t>(b)] = lo + (b + 1) * width;
    }
    std::vector<long> counts(static_cast<size_t>(n_bins), 0);
    for (double x : samples) {
        int b = static_cast<int>(std::floor((x - lo) / width));
        b = std::clamp(b, 0, n_bins - 1);
        ++counts[static_cast<size_t>(b)];
    }
    h.total_samples = static_cast<long>(samples.size());
    h.probability.resize(static_cast<size_t>(n_bins), 0.0);
    if (h.total_samples > 0)
        for (int b = 0; b < n_bins; ++b)
            h.probability[static_cast<size_t>(b)] =
                static_cast<double>(counts[static_cast<size_t>(b)]) / h.total_samples;
    return h;
}

} // namespace spinboson
