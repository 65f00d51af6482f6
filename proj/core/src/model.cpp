#include "spinboson/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace spinboson {

double NetworkSpec::hopping_at(int i, int j) const {
    if (i == j) return 0.0;
    auto key = std::minmax(i, j);
    auto it = hopping.find({key.first, key.second});
    return it == hopping.end() ? 0.0 : it->second;
}

void NetworkSpec::set_hopping(int i, int j, double value) {
    if (i == j) throw ConfigError("hopping requires two distinct sites");
    auto key = std::minmax(i, j);
    hopping[{key.first, key.second}] = value;
}

bool NetworkSpec::all_classical() const {
    return std::all_of(sites.begin(), sites.end(),
                       [](const SiteParams& p) { return p.spin.infinite; });
}

std::string to_string(SpikePolicy p) {
    switch (p) {
    case SpikePolicy::ExcludeAfterBreakdown: return "exclude_after_breakdown";
    case SpikePolicy::TruncateTrajectory: return "truncate_trajectory";
    case SpikePolicy::KeepAll: return "keep_all";
    }
    return "?";
}

std::optional<SpikePolicy> spike_policy_from_string(const std::string& name) {
    if (name == "exclude_after_breakdown") return SpikePolicy::ExcludeAfterBreakdown;
    if (name == "truncate_trajectory") return SpikePolicy::TruncateTrajectory;
    if (name == "keep_all") return SpikePolicy::KeepAll;
    return std::nullopt;
}

std::string ValidationReport::joined() const {
    std::ostringstream out;
    for (size_t k = 0; k < errors.size(); ++k) {
        if (k) out << "; ";
        out << errors[k];
    }
    return out.str();
}

namespace {

bool is_half_integer(double s) {
    return std::abs(2.0 * s - std::round(2.0 * s)) <= 1e-12 && s > 0.0;
}

} // namespace

ValidationReport validate(const NetworkSpec& spec) {
    ValidationReport rep;
    if (spec.sites.empty()) rep.errors.push_back("network has no sites");
    for (int i = 0; i < spec.n_sites(); ++i) {
        const SiteParams& p = spec.sites[static_cast<size_t>(i)];
        std::string tag = "site " + std::to_string(i) + ": ";
        if (p.kappa < 0.0) rep.errors.push_back(tag + "kappa must be >= 0");
        if (p.gamma < 0.0) rep.errors.push_back(tag + "gamma must be >= 0");
        if (p.nbar < 0.0) rep.errors.push_back(tag + "nbar must be >= 0");
        if (p.g < 0.0) rep.errors.push_back(tag + "g must be >= 0");
        if (p.drive_amplitude < 0.0) rep.errors.push_back(tag + "drive_amplitude must be >= 0");
        if (p.drive_ramp_time < 0.0) rep.errors.push_back(tag + "drive_ramp_time must be >= 0");
        if (!p.spin.infinite && !is_half_integer(p.spin.s))
            rep.errors.push_back(tag + "spin must be a positive half-integer or inf");
    }
    for (const auto& [key, J] : spec.hopping) {
        auto [i, j] = key;
        if (i < 0 || j < 0 || i >= spec.n_sites() || j >= spec.n_sites() || i >= j)
            rep.errors.push_back("hopping pair (" + std::to_string(i) + "," +
                                 std::to_string(j) + ") out of range");
        (void)J;
    }
    return rep;
}

ValidationReport validate(const SimulationConfig& config, const NetworkSpec&) {
    ValidationReport rep;
    // A zero dt is only a request for the default step at the points that
    // resolve it (effective_dt); a config reaching validation must be concrete.
    if (!(config.dt > 0.0)) rep.errors.push_back("dt must be positive");
    if (!(config.t_final > 0.0)) rep.errors.push_back("t_final must be > 0");
    if (config.dt > 0.0 && config.t_final > 0.0 && config.dt >= config.t_final)
        rep.errors.push_back("dt must be < t_final");
    if (config.n_trajectories < 1) rep.errors.push_back("n_trajectories must be >= 1");
    if (!(config.regularization_epsilon >= 0.0))
        rep.errors.push_back("regularization_epsilon must be >= 0");
    if (!(config.breakdown_threshold > 0.0))
        rep.errors.push_back("breakdown_threshold must be > 0");
    if (!(config.divergence_radius > 0.0))
        rep.errors.push_back("divergence_radius must be > 0");
    return rep;
}

double default_dt(const NetworkSpec& spec) {
    double rate = 1.0;
    for (const SiteParams& p : spec.sites)
        rate = std::max({rate, p.kappa, p.g, std::abs(p.omega_c), std::abs(p.omega_s)});
    for (const auto& [key, J] : spec.hopping) {
        (void)key;
        rate = std::max(rate, std::abs(J));
    }
    return 1e-4 / rate;
}

double effective_dt(const SimulationConfig& config, const NetworkSpec& spec) {
    // Exactly zero means "pick for me"; a negative dt is an error and is left
    // in place for validation to reject.
    return config.dt != 0.0 ? config.dt : default_dt(spec);
}

PhaseSpacePoint initial_state_coherent(const std::vector<Complex>& photon_amplitudes,
                                       const NetworkSpec& spec,
                                       const SimulationConfig& config) {
    if (static_cast<int>(photon_amplitudes.size()) != spec.n_sites())
        throw ConfigError("initial amplitude count does not match the network size");
    Complex z0{config.initial_spin_offset_re, config.initial_spin_offset_im};
    PhaseSpacePoint state;
    state.sites.resize(photon_amplitudes.size());
    for (size_t i = 0; i < photon_amplitudes.size(); ++i) {
        SiteAmplitudes& a = state.sites[i];
        a.alpha = photon_amplitudes[i];
        a.beta = std::conj(a.alpha);
        a.z = z0;
        a.w = std::conj(z0);
    }
    return state;
}

SphericalPoint initial_state_spherical(const std::vector<Complex>& photon_amplitudes,
                                       const NetworkSpec& spec,
                                       const SimulationConfig& config) {
    PhaseSpacePoint cart = initial_state_coherent(photon_amplitudes, spec, config);
    SphericalPoint state;
    state.sites.resize(cart.sites.size());
    for (size_t i = 0; i < cart.sites.size(); ++i)
        state.sites[i] = amplitudes_to_spherical(cart.sites[i]);
    return state;
}

SiteAmplitudes spherical_to_amplitudes(const SphericalSite& site) {
    double c = std::clamp(site.c, -1.0, 1.0);
    double r = std::sqrt((1.0 - c) / (1.0 + c)); // infinite at c = -1
    Complex z = r * std::exp(I * site.phi);
    return SiteAmplitudes{site.alpha, std::conj(site.alpha), z, std::conj(z)};
}

SphericalSite amplitudes_to_spherical(const SiteAmplitudes& site) {
    double r2 = std::norm(site.z);
    SphericalSite out;
    out.alpha = site.alpha;
    out.phi = (site.z == Complex{} ? 0.0 : std::arg(site.z));
    out.c = (1.0 - r2) / (1.0 + r2);
    return out;
}

} // namespace spinboson
