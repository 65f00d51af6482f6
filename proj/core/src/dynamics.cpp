#include "spinboson/dynamics.hpp"

#include <cmath>

namespace spinboson {

namespace {

constexpr double kPoleTol = 1e-14;

Complex pole_checked_denom(const SiteAmplitudes& site, int i) {
    Complex denom = 1.0 + site.w * site.z;
    if (std::abs(denom) <= kPoleTol)
        throw PoleError("phase-space pole 1 + w z = 0 at site " + std::to_string(i));
    return denom;
}

} // namespace

double drive_at(const SiteParams& p, double t) {
    if (p.drive_ramp_time > 0.0 && t < p.drive_ramp_time)
        return p.drive_amplitude * (t / p.drive_ramp_time);
    return p.drive_amplitude;
}

PhaseSpacePoint drift(const PhaseSpacePoint& state, const NetworkSpec& spec, double t) {
    const int n = state.n_sites();
    PhaseSpacePoint out;
    out.sites.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const SiteAmplitudes& x = state.sites[static_cast<size_t>(i)];
        const SiteParams& p = spec.sites[static_cast<size_t>(i)];
        Complex denom = pole_checked_denom(x, i);

        Complex hop_a{}, hop_b{};
        for (const auto& [key, J] : spec.hopping) {
            auto [a, b] = key;
            if (a == i) {
                hop_a += J * state.sites[static_cast<size_t>(b)].alpha;
                hop_b += J * state.sites[static_cast<size_t>(b)].beta;
            } else if (b == i) {
                hop_a += J * state.sites[static_cast<size_t>(a)].alpha;
                hop_b += J * state.sites[static_cast<size_t>(a)].beta;
            }
        }

        const double f = drive_at(p, t);
        const double half_kappa = 0.5 * p.kappa;
        const double gdamp = p.gamma * (1.0 - 0.5 * p.nbar);

        // The beta/w expressions mirror alpha/z term by term so conjugate
        // inputs produce conjugate outputs without rounding asymmetry.
        Complex ua = p.omega_c * x.alpha - hop_a + f + 2.0 * p.g * x.z / denom;
        Complex ub = p.omega_c * x.beta - hop_b + f + 2.0 * p.g * x.w / denom;
        Complex uz = p.g * (x.alpha - x.beta * x.z * x.z) + p.omega_s * x.z;
        Complex uw = p.g * (x.beta - x.alpha * x.w * x.w) + p.omega_s * x.w;

        SiteAmplitudes& d = out.sites[static_cast<size_t>(i)];
        d.alpha = I * ua - half_kappa * x.alpha;
        d.beta = -I * ub - half_kappa * x.beta;
        d.z = I * uz - gdamp * x.z;
        d.w = -I * uw - gdamp * x.w;
    }
    return out;
}

DiffusionBlocks diffusion_blocks(const SiteAmplitudes& site, const SiteParams& params) {
    DiffusionBlocks blocks;
    blocks.thermal.setZero();
    blocks.quantum.setZero();
    blocks.spin.setZero();

    const double kn = params.kappa * params.nbar;
    blocks.thermal(0, 1) = kn;
    blocks.thermal(1, 0) = kn;

    const Complex q = I * params.g * params.spin.inverse();
    blocks.quantum(0, 2) = -q * site.z * site.z;
    blocks.quantum(2, 0) = blocks.quantum(0, 2);
    blocks.quantum(1, 3) = q * site.w * site.w;
    blocks.quantum(3, 1) = blocks.quantum(1, 3);

    const double gm = params.gamma;
    const double nb = params.nbar;
    blocks.spin(0, 0) = gm * (2.0 * nb + 1.0) * site.z * site.z;
    blocks.spin(1, 1) = gm * (2.0 * nb + 1.0) * site.w * site.w;
    blocks.spin(0, 1) = gm * (nb + (nb + 1.0) * site.z * site.z * site.w * site.w);
    blocks.spin(1, 0) = blocks.spin(0, 1);
    return blocks;
}

Eigen::Matrix4cd noise_factor_thermal(const SiteParams& params) {
    Eigen::Matrix4cd B = Eigen::Matrix4cd::Zero();
    const double c = std::sqrt(0.5 * params.kappa * params.nbar);
    B(0, 0) = c;
    B(0, 1) = c * I;
    B(1, 0) = c;
    B(1, 1) = -c * I;
    return B;
}

Eigen::Matrix4cd noise_factor_quantum(const SiteAmplitudes& site, const SiteParams& params) {
    Eigen::Matrix4cd B = Eigen::Matrix4cd::Zero();
    const double inv_s = params.spin.inverse();
    if (params.g == 0.0 || inv_s == 0.0) return B;
    const Complex mu = std::sqrt(I * params.g * inv_s); // arg pi/4 for g > 0
    const double r = 1.0 / std::sqrt(2.0);
    const Complex pz = mu * site.z * r;
    const Complex pw = mu * site.w * r;
    // columns 0,1 drive the (alpha, z) pair, columns 2,3 the (beta, w) pair
    B(0, 0) = I * pz;
    B(0, 1) = -pz;
    B(2, 0) = I * pz;
    B(2, 1) = pz;
    B(1, 2) = pw;
    B(1, 3) = I * pw;
    B(3, 2) = pw;
    B(3, 3) = -I * pw;
    return B;
}

Eigen::Matrix2cd noise_factor_spin(const SiteAmplitudes& site, const SiteParams& params) {
    Eigen::Matrix2cd B = Eigen::Matrix2cd::Zero();
    if (params.gamma == 0.0) return B;
    const Eigen::Matrix2cd S = diffusion_blocks(site, params).spin;

    const Complex det = S(0, 0) * S(1, 1) - S(0, 1) * S(1, 0);
    const Complex sdet = std::sqrt(det);
    const Complex trace = S(0, 0) + S(1, 1);
    const double scale = S.cwiseAbs().maxCoeff();

    Complex denom2 = trace + 2.0 * sdet;
    if (std::abs(denom2) > 1e-12 * (1.0 + scale)) {
        // principal symmetric square root of a 2x2 matrix
        const Complex inv = 1.0 / std::sqrt(denom2);
        B = inv * (S + sdet * Eigen::Matrix2cd::Identity());
    } else if (std::abs(S(0, 0)) > 1e-14 * (1.0 + scale)) {
        const Complex r0 = std::sqrt(S(0, 0));
        B(0, 0) = r0;
        B(1, 0) = S(1, 0) / r0;
        B(1, 1) = std::sqrt(S(1, 1) - S(1, 0) * S(1, 0) / S(0, 0));
    } else if (std::abs(S(1, 1)) > 1e-14 * (1.0 + scale)) {
        const Complex r1 = std::sqrt(S(1, 1));
        B(1, 1) = r1;
        B(0, 1) = S(0, 1) / r1;
        B(0, 0) = std::sqrt(S(0, 0) - S(0, 1) * S(0, 1) / S(1, 1));
    } else {
        // purely off-diagonal block
        const Complex h = std::sqrt(0.5 * S(0, 1));
        B(0, 0) = h;
        B(0, 1) = I * h;
        B(1, 0) = h;
        B(1, 1) = -I * h;
    }

    const double resid = (B * B.transpose() - S).cwiseAbs().maxCoeff();
    if (resid > 1e-10 * (1.0 + scale))
        throw FactorizationError("spin noise factorization residual " + std::to_string(resid));
    return B;
}

PhaseSpacePoint sample_noise(const PhaseSpacePoint& state, const NetworkSpec& spec,
                             double dt, TrajectoryRng& rng) {
    const int n = state.n_sites();
    const double sdt = std::sqrt(dt);
    PhaseSpacePoint out;
    out.sites.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const SiteAmplitudes& x = state.sites[static_cast<size_t>(i)];
        const SiteParams& p = spec.sites[static_cast<size_t>(i)];
        SiteAmplitudes& d = out.sites[static_cast<size_t>(i)];

        if (p.kappa * p.nbar > 0.0) {
            const double c = std::sqrt(0.5 * p.kappa * p.nbar * dt);
            const double u1 = rng.normal();
            const double u2 = rng.normal();
            d.alpha += Complex{c * u1, c * u2};
            d.beta += Complex{c * u1, -c * u2}; // exact conjugate of the alpha kick
        }

        if (p.g > 0.0 && !p.spin.infinite) {
            const Complex mu = std::sqrt(I * p.g * p.spin.inverse());
            const Complex pz = mu * x.z * std::sqrt(0.5 * dt);
            const Complex pw = mu * x.w * std::sqrt(0.5 * dt);
            const double u1 = rng.normal();
            const double u2 = rng.normal();
            const double u3 = rng.normal();
            const double u4 = rng.normal();
            d.alpha += pz * Complex{-u2, u1};
            d.z += pz * Complex{u2, u1};
            d.beta += pw * Complex{u3, u4};
            d.w += pw * Complex{u3, -u4};
        }

        if (p.gamma > 0.0) {
            const Eigen::Matrix2cd B = noise_factor_spin(x, p);
            const double v1 = rng.normal();
            const double v2 = rng.normal();
            d.z += sdt * (B(0, 0) * v1 + B(0, 1) * v2);
            d.w += sdt * (B(1, 0) * v1 + B(1, 1) * v2);
        }
    }
    return out;
}

Complex regularization_force(Complex x, double epsilon) {
    const double r2 = std::norm(x);
    if (r2 == 0.0 || epsilon == 0.0) return Complex{};
    const double arg = epsilon * r2;
    const double mag = arg > 700.0 ? 1e300 : std::expm1(arg);
    return (mag / std::sqrt(r2)) * x;
}

Complex conserved_monitor(const PhaseSpacePoint& state) {
    Complex sum{};
    for (int i = 0; i < state.n_sites(); ++i) {
        const SiteAmplitudes& x = state.sites[static_cast<size_t>(i)];
        Complex denom = pole_checked_denom(x, i);
        sum += x.alpha * x.beta - (1.0 - x.z * x.w) / denom;
    }
    return sum;
}

Complex monitor_dissipation_rate(const PhaseSpacePoint& state, const NetworkSpec& spec) {
    Complex sum{};
    for (int i = 0; i < state.n_sites(); ++i) {
        const SiteAmplitudes& x = state.sites[static_cast<size_t>(i)];
        sum += -spec.sites[static_cast<size_t>(i)].kappa * x.alpha * x.beta;
    }
    return sum;
}

double conserved_monitor(const SphericalPoint& state) {
    double sum = 0.0;
    for (const SphericalSite& x : state.sites) sum += std::norm(x.alpha) - x.c;
    return sum;
}

double monitor_dissipation_rate(const SphericalPoint& state, const NetworkSpec& spec) {
    double sum = 0.0;
    for (int i = 0; i < state.n_sites(); ++i)
        sum += -spec.sites[static_cast<size_t>(i)].kappa *
               std::norm(state.sites[static_cast<size_t>(i)].alpha);
    return sum;
}

SphericalPoint spherical_drift(const SphericalPoint& state, const NetworkSpec& spec, double t) {
    const int n = state.n_sites();
    SphericalPoint out;
    out.sites.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const SphericalSite& x = state.sites[static_cast<size_t>(i)];
        const SiteParams& p = spec.sites[static_cast<size_t>(i)];

        Complex hop{};
        for (const auto& [key, J] : spec.hopping) {
            auto [a, b] = key;
            if (a == i) hop += J * state.sites[static_cast<size_t>(b)].alpha;
            else if (b == i) hop += J * state.sites[static_cast<size_t>(a)].alpha;
        }

        const double sin_theta = std::sqrt(std::max(0.0, 1.0 - x.c * x.c));
        const Complex phase = std::exp(I * x.phi);
        const Complex proj = x.alpha * std::conj(phase); // alpha e^{-i phi}
        const double f = drive_at(p, t);

        SphericalSite& d = out.sites[static_cast<size_t>(i)];
        d.alpha = I * (p.omega_c * x.alpha - hop + f + p.g * sin_theta * phase) -
                  0.5 * p.kappa * x.alpha;

        const double tangential = 2.0 * p.g * proj.real();
        if (sin_theta < 1e-154) {
            if (tangential != 0.0)
                throw PoleError("spherical chart pole at site " + std::to_string(i));
            d.phi = p.omega_s;
        } else {
            d.phi = p.omega_s + x.c * tangential / sin_theta;
        }
        d.c = 2.0 * p.g * sin_theta * proj.imag();
    }
    return out;
}

SphericalPoint sample_noise(const SphericalPoint& state, const NetworkSpec& spec,
                            double dt, TrajectoryRng& rng) {
    const int n = state.n_sites();
    SphericalPoint out;
    out.sites.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        SphericalSite& d = out.sites[static_cast<size_t>(i)];
        d.phi = 0.0;
        d.c = 0.0;
        const SiteParams& p = spec.sites[static_cast<size_t>(i)];
        if (p.kappa * p.nbar > 0.0) {
            const double c = std::sqrt(0.5 * p.kappa * p.nbar * dt);
            d.alpha = Complex{c * rng.normal(), c * rng.normal()};
        }
    }
    return out;
}

} // namespace spinboson
