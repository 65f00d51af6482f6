#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <complex>

#include "spinboson/oracle.hpp"
#include "spinboson/rng.hpp"

using namespace spinboson;

namespace {

HilbertBasis small_two_site() {
    return HilbertBasis({SiteBasis{3, 0.5}, SiteBasis{2, 1.0}});
}

double hermiticity_defect(const SparseOp& H) {
    SparseOp diff = SparseOp(H.adjoint()) - H;
    double worst = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (SparseOp::InnerIterator it(diff, k); it; ++it)
            worst = std::max(worst, std::abs(it.value()));
    return worst;
}

} // namespace

TEST_CASE("basis maps are mutually inverse and dimensions multiply") {
    const HilbertBasis basis = small_two_site();
    CHECK(basis.dim() == 4 * 2 * 3 * 3); // (3+1 Fock x 2 spin) x (2+1 Fock x 3 spin)
    for (long idx = 0; idx < basis.dim(); ++idx) {
        const auto labels = basis.labels_of(idx);
        REQUIRE(labels.size() == 2);
        CHECK(basis.index_of(labels) == idx);
        CHECK(labels[0].fock <= 3);
        CHECK(labels[0].spin <= 1);
        CHECK(labels[1].fock <= 2);
        CHECK(labels[1].spin <= 2);
    }
}

TEST_CASE("the dimension cap rejects oversized bases") {
    CHECK_THROWS_AS(HilbertBasis({SiteBasis{100, 10.0}, SiteBasis{100, 10.0}}),
                    DimensionLimitError);
    CHECK_THROWS_AS(HilbertBasis({SiteBasis{3, 0.5}}, 4), DimensionLimitError);
}

TEST_CASE("ladder operators have the textbook matrix elements") {
    const HilbertBasis basis({SiteBasis{4, 1.0}});
    const Eigen::MatrixXcd a = Eigen::MatrixXcd(annihilation_op(basis, 0));
    const Eigen::MatrixXcd ad = Eigen::MatrixXcd(creation_op(basis, 0));
    const Eigen::MatrixXcd n = Eigen::MatrixXcd(number_op(basis, 0));
    const Eigen::MatrixXcd sp = Eigen::MatrixXcd(spin_raise_op(basis, 0));
    const Eigen::MatrixXcd sz = Eigen::MatrixXcd(spin_z_op(basis, 0));

    // a |n, m> = sqrt(n) |n-1, m>
    const long from = basis.index_of({{2, 1}});
    const long to = basis.index_of({{1, 1}});
    CHECK(std::abs(a(to, from) - std::sqrt(2.0)) < 1e-14);
    CHECK(std::abs(ad(from, to) - std::sqrt(2.0)) < 1e-14);

    // number operator is diagonal with the Fock label
    CHECK(std::abs(n(from, from) - 2.0) < 1e-14);

    // S+ |m=-1> = sqrt(2) |m=0> for s=1 (labels shifted by s)
    const long m_low = basis.index_of({{0, 0}});
    const long m_mid = basis.index_of({{0, 1}});
    CHECK(std::abs(sp(m_mid, m_low) - std::sqrt(2.0)) < 1e-14);
    CHECK(std::abs(sz(m_low, m_low) + 1.0) < 1e-14);
    CHECK(std::abs(sz(m_mid, m_mid)) < 1e-14);

    // canonical commutator on the truncated space: [a, ad] = 1 away from the cap
    const Eigen::MatrixXcd comm = a * ad - ad * a;
    for (long k = 0; k < basis.dim(); ++k) {
        if (basis.labels_of(k)[0].fock == 4) continue; // truncation row
        CHECK(std::abs(comm(k, k) - 1.0) < 1e-14);
    }
}

TEST_CASE("hamiltonian and current operators are hermitian") {
    NetworkSpec spec;
    SiteParams p;
    p.omega_c = 1.3;
    p.omega_s = 0.9;
    p.g = 1.1;
    p.kappa = 0.4;
    p.nbar = 0.2;
    p.gamma = 0.3;
    p.spin = Spin::finite(0.5);
    p.drive_amplitude = 0.7;
    SiteParams q = p;
    q.spin = Spin::finite(1.0);
    spec.sites = {p, q};
    spec.set_hopping(0, 1, 0.6);

    const HilbertBasis basis = small_two_site();
    CHECK(hermiticity_defect(build_hamiltonian(spec, basis)) < 1e-12);
    CHECK(hermiticity_defect(current_op(basis, 0, 1, 0.6)) < 1e-12);
}

TEST_CASE("jump channels appear only at nonzero rates") {
    NetworkSpec spec;
    SiteParams p;
    p.spin = Spin::finite(0.5);
    spec.sites = {p};
    const HilbertBasis basis({SiteBasis{2, 0.5}});

    CHECK(jump_operators(spec, basis).empty()); // kappa = gamma = 0

    spec.sites[0].kappa = 1.0;
    CHECK(jump_operators(spec, basis).size() == 1); // photon loss only (nbar = 0)

    spec.sites[0].nbar = 0.5;
    CHECK(jump_operators(spec, basis).size() == 2); // loss + thermal pump

    spec.sites[0].gamma = 1.0;
    CHECK(jump_operators(spec, basis).size() == 4); // + spin decay and pump
}

TEST_CASE("coherent lowest-weight state has the right moments") {
    const HilbertBasis basis({SiteBasis{24, 1.0}});
    const Complex alpha{0.8, -0.4};
    const Eigen::VectorXcd psi = coherent_lowest_weight_state(basis, {alpha});
    CHECK(std::abs(psi.squaredNorm() - 1.0) < 1e-12);

    const SparseOp a = annihilation_op(basis, 0);
    const SparseOp n = number_op(basis, 0);
    const SparseOp sz = spin_z_op(basis, 0);
    const Complex mean_a = psi.dot(a * psi);
    const Complex mean_n = psi.dot(n * psi);
    const Complex mean_sz = psi.dot(sz * psi);
    CHECK(std::abs(mean_a - alpha) < 1e-10);
    CHECK(std::abs(mean_n - Complex{std::norm(alpha), 0.0}) < 1e-10);
    CHECK(std::abs(mean_sz - Complex{-1.0, 0.0}) < 1e-14);
}

TEST_CASE("dense master equation: free cavity decay follows 4 exp(-kappa t)") {
    NetworkSpec spec;
    SiteParams p;
    p.kappa = 1.0;
    p.spin = Spin::finite(0.5);
    spec.sites = {p};

    const HilbertBasis basis({SiteBasis{16, 0.5}});
    const SparseOp H = build_hamiltonian(spec, basis);
    const auto jumps = jump_operators(spec, basis);
    const Eigen::VectorXcd psi0 = coherent_lowest_weight_state(basis, {Complex{2.0, 0.0}});
    const Eigen::MatrixXcd rho0 = psi0 * psi0.adjoint();

    const MasterEvolution ev = evolve_master_dense(
        rho0, H, jumps, {number_op(basis, 0)}, basis, 1e-3, 2.0, 500, 64);
    REQUIRE(ev.times.size() == 5);
    for (size_t k = 0; k < ev.times.size(); ++k) {
        const double expected = 4.0 * std::exp(-ev.times[k]);
        CHECK(ev.expectations[0][k].real() == doctest::Approx(expected).epsilon(1e-5));
    }
    for (double e : ev.trace_error) CHECK(e < 1e-10);
    REQUIRE(ev.top_fock_population.size() == 1);
    CHECK(ev.top_fock_population[0] < 1e-6);
}

TEST_CASE("dense master equation: thermal fixed points for cavity and spin") {
    // Bare thermal occupation nb = nbar / s; detailed balance pins the
    // steady state of both sectors to nb.
    NetworkSpec spec;
    SiteParams p;
    p.kappa = 2.0;
    p.gamma = 2.0;
    p.nbar = 0.15; // s = 1/2 -> bare nb = 0.3
    p.spin = Spin::finite(0.5);
    spec.sites = {p};
    const double nb = 0.3;

    const HilbertBasis basis({SiteBasis{14, 0.5}});
    const SparseOp H = build_hamiltonian(spec, basis);
    const auto jumps = jump_operators(spec, basis);
    REQUIRE(jumps.size() == 4);

    Eigen::MatrixXcd rho0 =
        Eigen::MatrixXcd::Zero(basis.dim(), basis.dim());
    rho0(basis.index_of({{0, 0}}), basis.index_of({{0, 0}})) = 1.0;

    const MasterEvolution ev =
        evolve_master_dense(rho0, H, jumps, {number_op(basis, 0), spin_z_op(basis, 0)},
                            basis, 2e-3, 12.0, 6000, 64);
    const double n_final = ev.expectations[0].back().real();
    const double sz_final = ev.expectations[1].back().real();
    CHECK(n_final == doctest::Approx(nb).epsilon(1e-4));
    // Two-level detailed balance: p_up / p_down = nb / (nb + 1).
    const double sz_expected = -0.5 / (2.0 * nb + 1.0);
    CHECK(sz_final == doctest::Approx(sz_expected).epsilon(1e-4));
}

TEST_CASE("closed vacuum Rabi oscillation at the bare coupling") {
    NetworkSpec spec;
    SiteParams p;
    p.g = 0.5; // bare coupling g / sqrt(s) = 0.5 sqrt(2)
    p.spin = Spin::finite(0.5);
    spec.sites = {p};
    const double g_bare = 0.5 * std::sqrt(2.0);

    const HilbertBasis basis({SiteBasis{4, 0.5}});
    const SparseOp H = build_hamiltonian(spec, basis);

    // Start from |n = 0, m = +1/2>: one excitation exchanged with |1, -1/2>.
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(basis.dim());
    psi0(basis.index_of({{0, 1}})) = 1.0;
    const Eigen::MatrixXcd rho0 = psi0 * psi0.adjoint();

    const MasterEvolution ev = evolve_master_dense(
        rho0, H, {}, {number_op(basis, 0), spin_z_op(basis, 0)}, basis, 5e-4, 4.0, 400, 64);
    for (size_t k = 0; k < ev.times.size(); ++k) {
        const double t = ev.times[k];
        const double n_expected = std::pow(std::sin(g_bare * t), 2);
        const double sz_expected = 0.5 * std::cos(2.0 * g_bare * t);
        CHECK(ev.expectations[0][k].real() == doctest::Approx(n_expected).epsilon(1e-6));
        CHECK(ev.expectations[1][k].real() ==
              doctest::Approx(sz_expected).epsilon(1e-6).scale(1.0));
    }

    // The same evolution through the wavefunction path conserves the norm.
    TrajectoryRng rng(1, 0);
    const McwTrajectoryResult traj =
        mcw_trajectory(psi0, H, {}, {number_op(basis, 0)}, 5e-4, 4.0, 400, rng);
    CHECK(traj.n_jumps == 0);
    CHECK(std::abs(traj.final_norm2 - 1.0) < 1e-10);
    for (size_t k = 0; k < traj.times.size(); ++k) {
        const double n_expected = std::pow(std::sin(g_bare * traj.times[k]), 2);
        CHECK(traj.expectations[0][k].real() == doctest::Approx(n_expected).epsilon(1e-6));
    }
}

TEST_CASE("photon emission statistics count one jump per initial photon") {
    NetworkSpec spec;
    SiteParams p;
    p.kappa = 1.0;
    p.spin = Spin::finite(0.5);
    spec.sites = {p};

    const HilbertBasis basis({SiteBasis{10, 0.5}});
    const SparseOp H = build_hamiltonian(spec, basis);
    const auto jumps = jump_operators(spec, basis);
    const Eigen::VectorXcd psi0 = coherent_lowest_weight_state(basis, {Complex{1.0, 0.0}});

    const McwEnsembleResult ens = mcw_ensemble(psi0, H, jumps, {number_op(basis, 0)}, 1e-3,
                                               10.0, 10000, 2024, 400, 1);
    // Mean photon number 1 at t=0, fully emitted by t = 10: mean jump count 1
    // with per-trajectory variance about 1.
    const double mean_jumps = static_cast<double>(ens.total_jumps) / 400.0;
    CHECK(mean_jumps == doctest::Approx(1.0).epsilon(0.2));
    CHECK(ens.mean[0].back().real() < 1e-3);
    CHECK(std::isnan(ens.max_norm_drift)); // open evolution: diagnostic not defined
}

TEST_CASE("mcw ensembles are deterministic in the master seed") {
    NetworkSpec spec;
    SiteParams p;
    p.kappa = 0.8;
    p.g = 0.6;
    p.omega_c = 1.0;
    p.omega_s = 1.0;
    p.drive_amplitude = 0.4;
    p.spin = Spin::finite(0.5);
    spec.sites = {p};

    const HilbertBasis basis({SiteBasis{6, 0.5}});
    const SparseOp H = build_hamiltonian(spec, basis);
    const auto jumps = jump_operators(spec, basis);
    const Eigen::VectorXcd psi0 = coherent_lowest_weight_state(basis, {Complex{}});

    const McwEnsembleResult a =
        mcw_ensemble(psi0, H, jumps, {number_op(basis, 0)}, 1e-3, 2.0, 100, 31, 50, 1);
    const McwEnsembleResult b =
        mcw_ensemble(psi0, H, jumps, {number_op(basis, 0)}, 1e-3, 2.0, 100, 31, 50, 1);
    const McwEnsembleResult c =
        mcw_ensemble(psi0, H, jumps, {number_op(basis, 0)}, 1e-3, 2.0, 100, 32, 50, 1);
    CHECK(a.total_jumps == b.total_jumps);
    bool identical = true;
    for (size_t k = 0; k < a.mean[0].size(); ++k)
        identical &= a.mean[0][k] == b.mean[0][k];
    CHECK(identical);
    CHECK(a.total_jumps != c.total_jumps); // different seed takes different paths
}

TEST_CASE("mcw agrees with the dense master equation within three sigma") {
    NetworkSpec spec;
    SiteParams p;
    p.omega_c = 1.0;
    p.omega_s = 1.0;
    p.g = 0.5;
    p.kappa = 0.2;
    p.drive_amplitude = 0.3;
    p.spin = Spin::finite(0.5);
    spec.sites = {p};

    const HilbertBasis basis({SiteBasis{8, 0.5}});
    const SparseOp H = build_hamiltonian(spec, basis);
    const auto jumps = jump_operators(spec, basis);
    const Eigen::VectorXcd psi0 = coherent_lowest_weight_state(basis, {Complex{}});
    const Eigen::MatrixXcd rho0 = psi0 * psi0.adjoint();
    const std::vector<SparseOp> obs = {number_op(basis, 0), spin_z_op(basis, 0)};

    const double dt = 1e-3, t_final = 5.0;
    const MasterEvolution dense =
        evolve_master_dense(rho0, H, jumps, obs, basis, dt, t_final, 1000, 64);
    const McwEnsembleResult mcw =
        mcw_ensemble(psi0, H, jumps, obs, dt, t_final, 1000, 5150, 300, 1);

    REQUIRE(dense.times.size() == mcw.times.size());
    for (size_t o = 0; o < obs.size(); ++o) {
        for (size_t k = 1; k < dense.times.size(); ++k) {
            const double gap = std::abs(mcw.mean[o][k].real() - dense.expectations[o][k].real());
            const double sigma = std::max(mcw.std_error[o][k], 1e-4);
            CHECK(gap < 3.0 * sigma);
        }
    }
}

TEST_CASE("differential identity suites stay below their acceptance bounds") {
    for (const IdentityCheck& c : verify_spin_identities({0.5, 1.0, 1.5})) {
        INFO(c.name);
        CHECK(c.max_error < 1e-7);
    }
    for (const IdentityCheck& c : verify_bosonic_identities(40)) {
        INFO(c.name);
        CHECK(c.max_error < 1e-6);
    }
}
