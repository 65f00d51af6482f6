#include "spinboson/verify.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinboson/dynamics.hpp"
#include "spinboson/engine.hpp"
#include "spinboson/model.hpp"
#include "spinboson/observables.hpp"
#include "spinboson/oracle.hpp"
#include "spinboson/rng.hpp"

namespace spinboson {

namespace {

CheckResult make_result(std::string name, double measured, double threshold) {
    CheckResult r;
    r.name = std::move(name);
    r.measured = measured;
    r.threshold = threshold;
    r.passed = measured <= threshold;
    return r;
}

SiteAmplitudes random_site(TrajectoryRng& rng, double scale) {
    SiteAmplitudes x;
    x.alpha = scale * Complex{rng.normal(), rng.normal()};
    x.beta = scale * Complex{rng.normal(), rng.normal()};
    x.z = scale * Complex{rng.normal(), rng.normal()};
    x.w = scale * Complex{rng.normal(), rng.normal()};
    return x;
}

void check_factorizations(const VerifyOptions& options, std::vector<CheckResult>& out) {
    TrajectoryRng rng(0x5eedf00dULL, 0);
    const double spins[] = {0.5, 1.0, 1.5, 2.0, 5.0};
    double worst_thermal = 0.0, worst_quantum = 0.0, worst_spin = 0.0;
    for (long k = 0; k < options.factorization_draws; ++k) {
        SiteParams p;
        p.kappa = 3.0 * rng.uniform();
        p.nbar = 2.0 * rng.uniform();
        p.g = 2.0 * rng.uniform();
        p.gamma = 2.0 * rng.uniform();
        p.spin = (k % 7 == 6) ? Spin::inf() : Spin::finite(spins[k % 5]);
        const SiteAmplitudes x = random_site(rng, (k % 3 == 0) ? 3.0 : 0.7);

        const DiffusionBlocks D = diffusion_blocks(x, p);
        {
            const Eigen::Matrix4cd B = noise_factor_thermal(p);
            const double resid = (B * B.transpose() - D.thermal).cwiseAbs().maxCoeff();
            worst_thermal =
                std::max(worst_thermal, resid / (1.0 + D.thermal.cwiseAbs().maxCoeff()));
        }
        {
            Eigen::Matrix4cd B = noise_factor_quantum(x, p);
            B(0, 0) += options.perturb_quantum_factor;
            const double resid = (B * B.transpose() - D.quantum).cwiseAbs().maxCoeff();
            worst_quantum =
                std::max(worst_quantum, resid / (1.0 + D.quantum.cwiseAbs().maxCoeff()));
        }
        try {
            const Eigen::Matrix2cd B = noise_factor_spin(x, p);
            const double resid = (B * B.transpose() - D.spin).cwiseAbs().maxCoeff();
            worst_spin = std::max(worst_spin, resid / (1.0 + D.spin.cwiseAbs().maxCoeff()));
        } catch (const FactorizationError&) {
            worst_spin = std::numeric_limits<double>::infinity();
        }
    }
    out.push_back(make_result("factorization:thermal", worst_thermal, 1e-10));
    out.push_back(make_result("factorization:quantum", worst_quantum, 1e-10));
    out.push_back(make_result("factorization:spin", worst_spin, 1e-10));
}

void check_covariance(const VerifyOptions& options, std::vector<CheckResult>& out) {
    NetworkSpec spec;
    SiteParams p;
    p.kappa = 1.3;
    p.nbar = 0.7;
    p.g = 0.9;
    p.gamma = 0.5;
    p.spin = Spin::finite(1.5);
    spec.sites = {p};

    PhaseSpacePoint x;
    x.sites.resize(1);
    x.sites[0].alpha = Complex{0.4, -0.2};
    x.sites[0].beta = Complex{0.1, 0.3};
    x.sites[0].z = Complex{0.4, 0.3};
    x.sites[0].w = Complex{0.2, -0.5};

    const double dt = 0.01;
    const DiffusionBlocks blocks = diffusion_blocks(x.sites[0], spec.sites[0]);
    Eigen::Matrix4cd D = blocks.thermal + blocks.quantum;
    D(2, 2) += blocks.spin(0, 0);
    D(2, 3) += blocks.spin(0, 1);
    D(3, 2) += blocks.spin(1, 0);
    D(3, 3) += blocks.spin(1, 1);

    TrajectoryRng rng(0xc0ffeeULL, 1);
    Eigen::Matrix4cd acc = Eigen::Matrix4cd::Zero();
    Eigen::Vector4cd mean = Eigen::Vector4cd::Zero();
    for (long k = 0; k < options.covariance_samples; ++k) {
        const PhaseSpacePoint d = sample_noise(x, spec, dt, rng);
        Eigen::Vector4cd v;
        v << d.sites[0].alpha, d.sites[0].beta, d.sites[0].z, d.sites[0].w;
        acc += v * v.transpose(); // plain transpose: the diffusion matrix is symmetric
        mean += v;
    }
    const double n = static_cast<double>(options.covariance_samples);
    const double dev = (acc / n - D * dt).cwiseAbs().maxCoeff();
    const double mean_dev = (mean / n).cwiseAbs().maxCoeff();
    out.push_back(make_result("covariance:sampled-noise", dev, 5e-4));
    out.push_back(make_result("covariance:noise-mean", mean_dev, 1.5e-3));
}

void check_thermal_conjugacy(std::vector<CheckResult>& out) {
    NetworkSpec spec;
    SiteParams p;
    p.kappa = 2.0;
    p.nbar = 1.1; // only the thermal channel is active
    spec.sites = {p};
    PhaseSpacePoint x;
    x.sites.resize(1);
    TrajectoryRng rng(77, 0);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const PhaseSpacePoint d = sample_noise(x, spec, 0.01, rng);
        worst = std::max(worst, std::abs(d.sites[0].beta - std::conj(d.sites[0].alpha)));
    }
    out.push_back(make_result("noise:thermal-conjugate-pair", worst, 0.0));
}

void check_identities(std::vector<CheckResult>& out) {
    double worst = 0.0;
    for (const IdentityCheck& c : verify_spin_identities({0.5, 1.0, 2.5}))
        worst = std::max(worst, c.max_error);
    out.push_back(make_result("identities:spin", worst, 1e-6));
    worst = 0.0;
    for (const IdentityCheck& c : verify_bosonic_identities())
        worst = std::max(worst, c.max_error);
    out.push_back(make_result("identities:boson", worst, 1e-6));
}

void check_drift_conjugacy(std::vector<CheckResult>& out) {
    NetworkSpec spec;
    SiteParams p;
    p.omega_c = 0.7;
    p.omega_s = -0.4;
    p.g = 1.3;
    p.kappa = 0.9;
    p.gamma = 0.5;
    p.nbar = 0.3;
    p.drive_amplitude = 2.0;
    SiteParams q = p;
    q.g = 0.6;
    q.omega_c = -0.2;
    spec.sites = {p, q};
    spec.set_hopping(0, 1, 0.8);

    TrajectoryRng rng(13, 2);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        PhaseSpacePoint x;
        x.sites.resize(2);
        for (SiteAmplitudes& site : x.sites) {
            site.alpha = Complex{rng.normal(), rng.normal()};
            site.beta = std::conj(site.alpha);
            site.z = 0.5 * Complex{rng.normal(), rng.normal()};
            site.w = std::conj(site.z);
        }
        const PhaseSpacePoint d = drift(x, spec, 0.3);
        for (const SiteAmplitudes& site : d.sites) {
            worst = std::max(worst, std::abs(site.beta - std::conj(site.alpha)));
            worst = std::max(worst, std::abs(site.w - std::conj(site.z)));
        }
    }
    out.push_back(make_result("drift:conjugate-symmetry", worst, 0.0));
}

void check_monitor_conservation(std::vector<CheckResult>& out) {
    NetworkSpec spec;
    SiteParams p;
    p.omega_c = 0.03;
    p.omega_s = 0.02;
    p.g = 0.02;
    p.spin = Spin::inf();
    spec.sites = {p, p};
    spec.set_hopping(0, 1, 0.01);

    SimulationConfig config;
    config.dt = 1e-4;
    config.t_final = 2.0;

    const PhaseSpacePoint x0 =
        initial_state_coherent({Complex{0.3, 0.1}, Complex{0.2, -0.2}}, spec, config);
    TrajectoryRng rng(1, 0);
    const TrajectoryRecord rec = integrate(x0, spec, config, rng, 1L << 30);
    double measured = std::numeric_limits<double>::infinity();
    if (rec.status == TrajectoryStatus::Completed) {
        const Complex e0 = conserved_monitor(x0);
        const Complex ef = conserved_monitor(rec.states.back());
        measured = std::abs(ef - e0) / (1.0 + std::abs(e0));
    }
    out.push_back(make_result("monitor:closed-conservation", measured, 1e-6));
}

void check_driven_dimer(std::vector<CheckResult>& out) {
    NetworkSpec spec;
    SiteParams driven;
    driven.kappa = 20.0;
    driven.spin = Spin::inf();
    driven.drive_amplitude = 100.0 / std::sqrt(2.0);
    SiteParams passive = driven;
    passive.drive_amplitude = 0.0;
    spec.sites = {driven, passive};
    const double J = 1.0;
    spec.set_hopping(0, 1, J);

    const double f = driven.drive_amplitude;
    const double kappa = driven.kappa;
    // Linear steady state with a single driven site:
    //   alpha_0 = 2 i kappa f / (kappa^2 + 4 J^2), alpha_1 = -2 i J alpha_0 / kappa,
    // giving a bond current 16 kappa f^2 J^2 / (kappa^2 + 4 J^2)^2.
    const double expected =
        16.0 * kappa * f * f * J * J / std::pow(kappa * kappa + 4.0 * J * J, 2);

    // Steady state of the undamped-spin cavity sector solved numerically:
    // 0 = A alpha + i f with A the linear drift matrix.
    Eigen::Matrix2cd A;
    A << -0.5 * kappa, -I * J, -I * J, -0.5 * kappa;
    Eigen::Vector2cd b;
    b << I * f, Complex{};
    const Eigen::Vector2cd alpha_ss = A.colPivHouseholderQr().solve(-b);
    const double j_solve =
        -2.0 * J * (std::conj(alpha_ss(0)) * alpha_ss(1)).imag();
    out.push_back(make_result("benchmark:steady-linear-solve",
                              std::abs(j_solve - expected) / expected, 1e-8));

    // The explicit-Euler fixed point of a linear flow is the exact fixed
    // point, so once transients have decayed (e^{-kappa t / 2} ~ 1e-11 at
    // t = 2.5) the integrated current matches the closed form to roundoff.
    SimulationConfig config;
    config.dt = 1e-5;
    config.t_final = 2.5;

    const PhaseSpacePoint x0 = initial_state_coherent({Complex{}, Complex{}}, spec, config);
    TrajectoryRng rng(2, 0);
    const TrajectoryRecord rec = integrate(x0, spec, config, rng, 1L << 30);
    double measured = std::numeric_limits<double>::infinity();
    if (rec.status == TrajectoryStatus::Completed) {
        const PhaseSpacePoint& xf = rec.states.back();
        const Complex j = intercavity_current(xf.sites[0], xf.sites[1], J);
        measured = std::abs(j - expected) / expected;
    }
    out.push_back(make_result("benchmark:driven-dimer-current", measured, 1e-8));
}

void check_chart_equivalence(std::vector<CheckResult>& out) {
    NetworkSpec spec;
    SiteParams p;
    p.omega_c = 0.03;
    p.omega_s = 0.02;
    p.g = 0.02;
    p.kappa = 0.05;
    p.drive_amplitude = 0.04;
    p.spin = Spin::inf();
    spec.sites = {p, p};
    spec.set_hopping(0, 1, 0.01);

    SimulationConfig config;
    config.dt = 2e-5;
    config.t_final = 5.0;
    // Start well away from the chart pole so both discretizations are smooth.
    config.initial_spin_offset_re = 0.3;
    config.initial_spin_offset_im = 0.2;

    const std::vector<Complex> photons = {Complex{0.4, 0.1}, Complex{-0.2, 0.3}};
    TrajectoryRng rng_a(3, 0), rng_b(3, 0);
    const TrajectoryRecord cart =
        integrate(initial_state_coherent(photons, spec, config), spec, config, rng_a, 1L << 30);
    const SphericalRecord sph = integrate_classical(initial_state_spherical(photons, spec, config),
                                                    spec, config, rng_b, 1L << 30);
    double measured = std::numeric_limits<double>::infinity();
    if (cart.status == TrajectoryStatus::Completed &&
        sph.status == TrajectoryStatus::Completed) {
        measured = 0.0;
        for (int i = 0; i < 2; ++i) {
            const SiteAmplitudes& xc = cart.states.back().sites[static_cast<size_t>(i)];
            const SiteAmplitudes xs =
                spherical_to_amplitudes(sph.states.back().sites[static_cast<size_t>(i)]);
            measured = std::max(measured, std::abs(xc.alpha - xs.alpha));
            measured = std::max(
                measured, std::abs(photon_number(xc) - std::norm(xs.alpha)) /
                              (1.0 + std::abs(photon_number(xc))));
            const Complex sz_c = spin_z(xc, spec.sites[static_cast<size_t>(i)].spin);
            measured = std::max(measured,
                                std::abs(sz_c.real() +
                                         sph.states.back().sites[static_cast<size_t>(i)].c));
        }
    }
    out.push_back(make_result("equivalence:spherical-cartesian", measured, 1e-5));
}

} // namespace

std::vector<CheckResult> run_verification_suite(const VerifyOptions& options) {
    std::vector<CheckResult> results;
    check_factorizations(options, results);
    check_covariance(options, results);
    check_thermal_conjugacy(results);
    check_identities(results);
    check_drift_conjugacy(results);
    check_monitor_conservation(results);
    check_driven_dimer(results);
    check_chart_equivalence(results);
    return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CheckResult& r) { return r.passed; });
}

} // namespace spinboson
