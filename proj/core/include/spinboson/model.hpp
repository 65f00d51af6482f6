#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "types.hpp"

namespace spinboson {

// Per-site physical parameters, all in the rescaled units used by the
// equations of motion (drive amplitude and thermal occupation included).
struct SiteParams {
    double omega_c = 0.0;        // cavity detuning
    double omega_s = 0.0;        // spin splitting
    double g = 0.0;              // spin-cavity coupling
    double kappa = 0.0;          // cavity loss rate
    double gamma = 0.0;          // spin loss rate
    double nbar = 0.0;           // thermal occupation of both baths
    Spin spin = Spin::finite(0.5);
    double drive_amplitude = 0.0;
    double drive_ramp_time = 0.0; // 0 means the drive is constant from t=0
};

// A network of driven cavities, each containing one collective spin,
// coupled by photon hopping.
struct NetworkSpec {
    std::vector<SiteParams> sites;
    // Symmetric hopping amplitudes, stored once per unordered pair i<j.
    std::map<std::pair<int, int>, double> hopping;

    int n_sites() const { return static_cast<int>(sites.size()); }
    double hopping_at(int i, int j) const;
    void set_hopping(int i, int j, double value);
    bool all_classical() const;
};

// One phase-space configuration of the doubled representation. The two
// cavity amplitudes and the two stereographic spin amplitudes per site are
// independent complex variables; on the classical submanifold beta = conj(alpha)
// and w = conj(z).
struct SiteAmplitudes {
    Complex alpha{};
    Complex beta{};
    Complex z{};
    Complex w{};
};

struct PhaseSpacePoint {
    std::vector<SiteAmplitudes> sites;
    int n_sites() const { return static_cast<int>(sites.size()); }
};

// Classical-limit configuration in spherical coordinates: cavity amplitude
// plus azimuth phi and polar projection c in [-1, 1] per spin (c = +1 is the
// lowest-weight orientation).
struct SphericalSite {
    Complex alpha{};
    double phi = 0.0;
    double c = 1.0;
};

struct SphericalPoint {
    std::vector<SphericalSite> sites;
    int n_sites() const { return static_cast<int>(sites.size()); }
};

enum class SpikePolicy {
    ExcludeAfterBreakdown, // drop samples from the breakdown time onward
    TruncateTrajectory,    // drop broken trajectories entirely
    KeepAll,               // keep every recorded sample
};

std::string to_string(SpikePolicy p);
std::optional<SpikePolicy> spike_policy_from_string(const std::string& name);

struct SimulationConfig {
    double dt = 0.0;              // 0 selects the default step for the network
    double t_final = 10.0;
    long n_trajectories = 1;
    unsigned long long master_seed = 0;
    double regularization_epsilon = 1e-8;
    double initial_spin_offset_re = 1e-6;
    double initial_spin_offset_im = 1e-6;
    double breakdown_threshold = 0.05;
    double divergence_radius = 1e6;
    SpikePolicy spike_policy = SpikePolicy::ExcludeAfterBreakdown;
};

struct ValidationReport {
    std::vector<std::string> errors;
    bool ok() const { return errors.empty(); }
    std::string joined() const;
};

ValidationReport validate(const NetworkSpec& spec);
ValidationReport validate(const SimulationConfig& config, const NetworkSpec& spec);

// Conservative default step: resolves the fastest rate in the network.
double default_dt(const NetworkSpec& spec);
// dt as configured, or the network default when config.dt == 0.
double effective_dt(const SimulationConfig& config, const NetworkSpec& spec);

// Product-coherent initial condition: photon amplitudes as given, every spin
// near the lowest-weight state with the small stereographic offset that seeds
// the dynamics. Satisfies beta = conj(alpha), w = conj(z) exactly.
PhaseSpacePoint initial_state_coherent(const std::vector<Complex>& photon_amplitudes,
                                       const NetworkSpec& spec,
                                       const SimulationConfig& config);

// Same initial condition expressed in spherical coordinates.
SphericalPoint initial_state_spherical(const std::vector<Complex>& photon_amplitudes,
                                       const NetworkSpec& spec,
                                       const SimulationConfig& config);

// Chart change for classical states: z = sqrt((1-c)/(1+c)) e^{i phi}.
SiteAmplitudes spherical_to_amplitudes(const SphericalSite& site);
SphericalSite amplitudes_to_spherical(const SiteAmplitudes& site);

} // namespace spinboson
