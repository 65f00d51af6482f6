#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "spinboson/config_file.hpp"
#include "spinboson/model.hpp"

using namespace spinboson;

namespace {

NetworkSpec two_site_spec() {
    NetworkSpec spec;
    SiteParams p;
    p.omega_c = 0.5;
    p.omega_s = 0.25;
    p.g = 1.5;
    p.kappa = 2.0;
    p.gamma = 0.1;
    p.nbar = 0.3;
    p.spin = Spin::finite(1.0);
    p.drive_amplitude = 3.0;
    spec.sites = {p, p};
    spec.set_hopping(0, 1, 0.75);
    return spec;
}

} // namespace

TEST_CASE("spin values validate as half integers within 1e-12") {
    NetworkSpec spec = two_site_spec();
    for (double s : {0.5, 1.0, 1.5, 2.0, 7.5}) {
        spec.sites[0].spin = Spin::finite(s);
        CHECK(validate(spec).ok());
    }
    spec.sites[0].spin = Spin::finite(0.5 + 4e-13);
    CHECK(validate(spec).ok());
    spec.sites[0].spin = Spin::finite(0.3);
    CHECK_FALSE(validate(spec).ok());
    spec.sites[0].spin = Spin::finite(0.5 + 1e-6);
    CHECK_FALSE(validate(spec).ok());
    spec.sites[0].spin = Spin::finite(0.0);
    CHECK_FALSE(validate(spec).ok());
    spec.sites[0].spin = Spin::finite(-1.0);
    CHECK_FALSE(validate(spec).ok());
    spec.sites[0].spin = Spin::inf();
    CHECK(validate(spec).ok());
}

TEST_CASE("negative rates and amplitudes are rejected") {
    NetworkSpec spec = two_site_spec();
    CHECK(validate(spec).ok());
    auto broken = spec;
    broken.sites[1].kappa = -0.1;
    CHECK_FALSE(validate(broken).ok());
    broken = spec;
    broken.sites[0].gamma = -1.0;
    CHECK_FALSE(validate(broken).ok());
    broken = spec;
    broken.sites[0].nbar = -0.5;
    CHECK_FALSE(validate(broken).ok());
    broken = spec;
    broken.sites[1].drive_amplitude = -2.0;
    CHECK_FALSE(validate(broken).ok());
    broken = spec;
    broken.sites[1].drive_ramp_time = -1e-3;
    CHECK_FALSE(validate(broken).ok());
}

TEST_CASE("hopping indices must name distinct sites in range") {
    NetworkSpec spec = two_site_spec();
    spec.hopping.clear();
    spec.hopping[{0, 2}] = 1.0;
    CHECK_FALSE(validate(spec).ok());
    spec.hopping.clear();
    spec.hopping[{1, 1}] = 1.0;
    CHECK_FALSE(validate(spec).ok());
    spec.hopping.clear();
    spec.set_hopping(0, 1, -0.5); // negative amplitude is physical
    CHECK(validate(spec).ok());
    CHECK(spec.hopping_at(0, 1) == doctest::Approx(-0.5));
    CHECK(spec.hopping_at(1, 0) == doctest::Approx(-0.5));
    CHECK(spec.hopping_at(0, 0) == 0.0);
}

TEST_CASE("simulation invariants: positive thresholds and dt below t_final") {
    const NetworkSpec spec = two_site_spec();
    SimulationConfig config;
    config.dt = 1e-3;
    config.t_final = 1.0;
    CHECK(validate(config, spec).ok());

    auto bad = config;
    bad.dt = 1.0;
    CHECK_FALSE(validate(bad, spec).ok()); // dt == t_final
    bad = config;
    bad.dt = -1e-3;
    CHECK_FALSE(validate(bad, spec).ok());
    bad = config;
    bad.dt = 0.0; // the zero sentinel is resolved before validation, never by it
    auto rep = validate(bad, spec);
    CHECK_FALSE(rep.ok());
    CHECK(rep.joined().find("dt must be positive") != std::string::npos);
    bad = config;
    bad.n_trajectories = 0;
    CHECK_FALSE(validate(bad, spec).ok());
    bad = config;
    bad.breakdown_threshold = 0.0;
    CHECK_FALSE(validate(bad, spec).ok());
    bad = config;
    bad.divergence_radius = -1.0;
    CHECK_FALSE(validate(bad, spec).ok());
    bad = config;
    bad.regularization_epsilon = -1e-8;
    CHECK_FALSE(validate(bad, spec).ok());
}

TEST_CASE("default step resolves the fastest rate with a floor at one") {
    NetworkSpec slow = two_site_spec();
    for (auto& p : slow.sites) {
        p.kappa = 0.01;
        p.g = 0.02;
        p.omega_c = 0.03;
        p.omega_s = 0.0;
        p.gamma = 0.0;
    }
    slow.hopping.clear();
    slow.set_hopping(0, 1, 0.05);
    CHECK(default_dt(slow) == doctest::Approx(1e-4));

    NetworkSpec fast = slow;
    fast.sites[0].kappa = 20.0;
    CHECK(default_dt(fast) == doctest::Approx(1e-4 / 20.0));

    SimulationConfig config;
    config.dt = 0.0;
    CHECK(effective_dt(config, fast) == doctest::Approx(1e-4 / 20.0));
    config.dt = 3e-6;
    CHECK(effective_dt(config, fast) == doctest::Approx(3e-6));
    config.dt = -1e-3; // not a sentinel: survives resolution so validation can reject it
    CHECK(effective_dt(config, fast) == doctest::Approx(-1e-3));
}

TEST_CASE("coherent initial state is exactly conjugate") {
    const NetworkSpec spec = two_site_spec();
    SimulationConfig config;
    config.initial_spin_offset_re = 2e-3;
    config.initial_spin_offset_im = -1e-3;
    const std::vector<Complex> photons = {Complex{1.25, -0.5}, Complex{-0.75, 2.0}};
    const PhaseSpacePoint state = initial_state_coherent(photons, spec, config);
    REQUIRE(state.sites.size() == 2);
    for (size_t i = 0; i < 2; ++i) {
        CHECK(state.sites[i].alpha == photons[i]);
        CHECK(state.sites[i].beta == std::conj(photons[i]));
        CHECK(state.sites[i].z == Complex{2e-3, -1e-3});
        CHECK(state.sites[i].w == std::conj(state.sites[i].z));
    }
    CHECK_THROWS_AS(initial_state_coherent({Complex{}}, spec, config), ConfigError);
}

TEST_CASE("chart maps invert each other away from the pole") {
    SphericalSite sph;
    sph.alpha = Complex{0.4, -1.1};
    sph.phi = 2.3;
    sph.c = -0.35;
    const SiteAmplitudes amps = spherical_to_amplitudes(sph);
    CHECK(amps.beta == std::conj(amps.alpha));
    CHECK(amps.w == std::conj(amps.z));
    const SphericalSite back = amplitudes_to_spherical(amps);
    CHECK(back.c == doctest::Approx(sph.c).epsilon(1e-12));
    CHECK(std::remainder(back.phi - sph.phi, 2.0 * M_PI) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(back.alpha.real() == doctest::Approx(sph.alpha.real()));
    CHECK(back.alpha.imag() == doctest::Approx(sph.alpha.imag()));

    // The stereographic radius encodes the polar angle: zw = (1-c)/(1+c).
    const Complex zw = amps.z * amps.w;
    CHECK(zw.real() == doctest::Approx((1.0 - sph.c) / (1.0 + sph.c)).epsilon(1e-12));
    CHECK(zw.imag() == doctest::Approx(0.0));
}

TEST_CASE("both initial-state builders describe the same physical state") {
    NetworkSpec spec = two_site_spec();
    for (auto& p : spec.sites) p.spin = Spin::inf();
    SimulationConfig config;
    config.initial_spin_offset_re = 0.2;
    config.initial_spin_offset_im = 0.1;
    const std::vector<Complex> photons = {Complex{0.5, 0.5}, Complex{}};
    const PhaseSpacePoint cart = initial_state_coherent(photons, spec, config);
    const SphericalPoint sph = initial_state_spherical(photons, spec, config);
    REQUIRE(sph.sites.size() == 2);
    for (size_t i = 0; i < 2; ++i) {
        const SphericalSite expect = amplitudes_to_spherical(cart.sites[i]);
        CHECK(sph.sites[i].alpha == cart.sites[i].alpha);
        CHECK(sph.sites[i].c == doctest::Approx(expect.c).epsilon(1e-14));
        CHECK(sph.sites[i].phi == doctest::Approx(expect.phi).epsilon(1e-14));
    }
}

TEST_CASE("spike policy names round trip") {
    for (SpikePolicy p : {SpikePolicy::ExcludeAfterBreakdown, SpikePolicy::TruncateTrajectory,
                          SpikePolicy::KeepAll}) {
        const auto parsed = spike_policy_from_string(to_string(p));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == p);
    }
    CHECK_FALSE(spike_policy_from_string("discard_everything").has_value());
}

TEST_CASE("config text parses into the expected model") {
    const std::string text = R"(# comment line
[network]
n_sites = 2

[site.0]
omega_c = 1.5
omega_s = 0.5
g = 2.0
kappa = 20.0
nbar = 0.25
spin_s = 1.5
drive_amplitude = 70.710678118654755
drive_ramp_time = 0.1

[site.1]
spin_s = inf

[hopping]
0 1 = -1.25

[simulation]
dt = 5e-5
t_final = 2.5
n_trajectories = 400
master_seed = 99
initial_spin_offset = 0.01 -0.02
spike_policy = keep_all
)";
    const ParsedConfig cfg = parse_config_text(text);
    REQUIRE(cfg.network.n_sites() == 2);
    CHECK(cfg.network.sites[0].omega_c == doctest::Approx(1.5));
    CHECK(cfg.network.sites[0].nbar == doctest::Approx(0.25));
    CHECK(cfg.network.sites[0].spin.s == doctest::Approx(1.5));
    CHECK_FALSE(cfg.network.sites[0].spin.infinite);
    CHECK(cfg.network.sites[0].drive_ramp_time == doctest::Approx(0.1));
    CHECK(cfg.network.sites[1].spin.infinite);
    CHECK(cfg.network.sites[1].g == 0.0); // unspecified keys keep defaults
    CHECK(cfg.network.hopping_at(0, 1) == doctest::Approx(-1.25));
    CHECK(cfg.simulation.dt == doctest::Approx(5e-5));
    CHECK(cfg.simulation.n_trajectories == 400);
    CHECK(cfg.simulation.master_seed == 99);
    CHECK(cfg.simulation.initial_spin_offset_re == doctest::Approx(0.01));
    CHECK(cfg.simulation.initial_spin_offset_im == doctest::Approx(-0.02));
    CHECK(cfg.simulation.spike_policy == SpikePolicy::KeepAll);
}

TEST_CASE("malformed configs are rejected with ConfigError") {
    CHECK_THROWS_AS(parse_config_text("[network]\nn_sites = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[network]\nn_sites = 1\n[site.0]\nbogus_key = 1\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text("[network]\nn_sites = 1\n[site.3]\ng = 1\n"),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_config_text("[network]\nn_sites = 2\n[hopping]\n0 5 = 1.0\n"), ConfigError);
    CHECK_THROWS_AS(
        parse_config_text("[network]\nn_sites = 1\n[simulation]\nspike_policy = nope\n"),
        ConfigError);
    CHECK_THROWS_AS(parse_config_text("[network]\nn_sites = 1\n[site.0]\nspin_s = 0.4\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text("no_section = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[network]\nn_sites = 1\n[network]\nn_sites = 1\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text("[network]\nn_sites = 1\n[simulation]\ndt = 0\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text("[network]\nn_sites = 1\n[simulation]\ndt = -1e-4\n"),
                    ConfigError);
}

TEST_CASE("rendered config text parses back to identical values") {
    const NetworkSpec spec = two_site_spec();
    SimulationConfig config;
    config.dt = 7.25e-5;
    config.t_final = 3.25;
    config.n_trajectories = 123;
    config.master_seed = 0xDEADBEEFull;
    config.initial_spin_offset_re = 1.3e-4;
    config.initial_spin_offset_im = -2e-4;
    config.spike_policy = SpikePolicy::TruncateTrajectory;

    const std::string text = render_config(spec, config);
    const ParsedConfig cfg = parse_config_text(text);
    CHECK(cfg.network.n_sites() == spec.n_sites());
    for (int i = 0; i < spec.n_sites(); ++i) {
        CHECK(cfg.network.sites[i].omega_c == spec.sites[i].omega_c);
        CHECK(cfg.network.sites[i].g == spec.sites[i].g);
        CHECK(cfg.network.sites[i].kappa == spec.sites[i].kappa);
        CHECK(cfg.network.sites[i].nbar == spec.sites[i].nbar);
        CHECK(cfg.network.sites[i].spin.s == spec.sites[i].spin.s);
    }
    CHECK(cfg.network.hopping == spec.hopping);
    CHECK(cfg.simulation.dt == config.dt);
    CHECK(cfg.simulation.t_final == config.t_final);
    CHECK(cfg.simulation.master_seed == config.master_seed);
    CHECK(cfg.simulation.initial_spin_offset_re == config.initial_spin_offset_re);
    CHECK(cfg.simulation.spike_policy == config.spike_policy);

    // Rendering is canonical: render(parse(render(x))) == render(x).
    CHECK(render_config(cfg.network, cfg.simulation) == text);
}

TEST_CASE("all_classical distinguishes finite from infinite networks") {
    NetworkSpec spec = two_site_spec();
    CHECK_FALSE(spec.all_classical());
    for (auto& p : spec.sites) p.spin = Spin::inf();
    CHECK(spec.all_classical());
    spec.sites[1].spin = Spin::finite(2.0);
    CHECK_FALSE(spec.all_classical());
}
