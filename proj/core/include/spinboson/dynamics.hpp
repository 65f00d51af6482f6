#pragma once

#include <Eigen/Dense>

#include "model.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace spinboson {

// Drive amplitude at time t, with the optional linear ramp-on window.
double drive_at(const SiteParams& p, double t);

// Deterministic drift of the doubled phase-space variables. Returns a
// tangent with the same shape as the state. The regularization force is not
// included here; the integrator subtracts it separately.
//
// Per site, with denom = 1 + w z and hop_x = sum_{j != i} J_ij x_j:
//   d alpha = +i (omega_c alpha - hop_alpha + f(t) + 2 g z / denom) - kappa/2 alpha
//   d beta  = -i (omega_c beta  - hop_beta  + f(t) + 2 g w / denom) - kappa/2 beta
//   d z     = +i (g (alpha - beta z^2) + omega_s z) - gamma (1 - nbar/2) z
//   d w     = -i (g (beta  - alpha w^2) + omega_s w) - gamma (1 - nbar/2) w
//
// The beta/w lines are exact mirror images of the alpha/z lines, so on the
// classical submanifold (beta = conj alpha, w = conj z, gamma = 0) the drift
// preserves conjugacy bit-for-bit.
//
// Throws PoleError when |1 + w z| <= 1e-14 at any site.
PhaseSpacePoint drift(const PhaseSpacePoint& state, const NetworkSpec& spec, double t);

// The three per-site diffusion blocks in the (alpha, beta, z, w) ordering.
// thermal: cavity bath at occupation nbar; quantum: the 1/s spin-cavity
// block, zero in the classical limit; spin: the (z, w) sector from spin
// dissipation.
struct DiffusionBlocks {
    Eigen::Matrix4cd thermal;
    Eigen::Matrix4cd quantum;
    Eigen::Matrix2cd spin;
};

DiffusionBlocks diffusion_blocks(const SiteAmplitudes& site, const SiteParams& params);

// Noise factors B with B * B^T equal to the matching diffusion block
// (plain transpose, no conjugation). Columns multiply independent real
// Wiener increments.
Eigen::Matrix4cd noise_factor_thermal(const SiteParams& params);
// Uses the principal branch of sqrt(i g / s); vanishes in the classical limit.
Eigen::Matrix4cd noise_factor_quantum(const SiteAmplitudes& site, const SiteParams& params);
// Closed-form factorization of the 2x2 complex-symmetric spin block; throws
// FactorizationError if the residual ||B B^T - D|| exceeds 1e-10 * (1 + ||D||).
Eigen::Matrix2cd noise_factor_spin(const SiteAmplitudes& site, const SiteParams& params);

// One Euler-Maruyama noise increment for every site, scaled by sqrt(dt).
// The thermal part satisfies d_xi_beta = conj(d_xi_alpha) exactly. The
// number of normal draws per site is fixed by the parameters alone, so
// trajectory streams stay aligned across states.
PhaseSpacePoint sample_noise(const PhaseSpacePoint& state, const NetworkSpec& spec,
                             double dt, TrajectoryRng& rng);

// Radial restoring force r(x) = (e^{eps |x|^2} - 1) x/|x| applied to the
// spin variables only; r(0) = 0. Negligible at moderate |x| and steep once
// |x|^2 approaches 1/eps.
Complex regularization_force(Complex x, double epsilon);

// Summed cavity-plus-spin excitation monitor E = sum_i (alpha_i beta_i + sigma_i)
// with sigma = -(1 - z w)/(1 + z w). Constant under closed dynamics; decays
// through cavity loss otherwise. Throws PoleError at |1 + w z| <= 1e-14.
Complex conserved_monitor(const PhaseSpacePoint& state);
// Expected dE/dt from cavity loss alone: -sum_i kappa_i alpha_i beta_i.
Complex monitor_dissipation_rate(const PhaseSpacePoint& state, const NetworkSpec& spec);

// Classical-limit counterparts on the sphere.
double conserved_monitor(const SphericalPoint& state);
double monitor_dissipation_rate(const SphericalPoint& state, const NetworkSpec& spec);

// Tangent of the classical spherical variables:
//   d alpha = i (omega_c alpha - hop_alpha + f(t) + g sin_theta e^{i phi}) - kappa/2 alpha
//   d phi   = omega_s + g (c / sin_theta) 2 Re(alpha e^{-i phi})
//   d c     = g sin_theta 2 Im(alpha e^{-i phi})
// with sin_theta = sqrt(1 - c^2). The phi equation is singular at the chart
// poles; PoleError is thrown when sin_theta underflows while the tangential
// term is nonzero.
SphericalPoint spherical_drift(const SphericalPoint& state, const NetworkSpec& spec, double t);

// Thermal cavity noise for the spherical variables (alpha components only).
SphericalPoint sample_noise(const SphericalPoint& state, const NetworkSpec& spec,
                            double dt, TrajectoryRng& rng);

} // namespace spinboson
