#include "spinboson/oracle.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "spinboson/ensemble.hpp"
#include "spinboson/observables.hpp"

namespace spinboson {

HilbertBasis::HilbertBasis(std::vector<SiteBasis> sites, long max_dim)
    : sites_(std::move(sites)) {
    if (sites_.empty()) throw ConfigError("basis needs at least one site");
    dim_ = 1;
    for (const SiteBasis& sb : sites_) {
        if (sb.n_max < 0) throw ConfigError("Fock cutoff must be >= 0");
        if (std::abs(2.0 * sb.s - std::lround(2.0 * sb.s)) > 1e-12 || sb.s <= 0.0)
            throw ConfigError("oracle spin must be a positive half-integer");
        dim_ *= sb.dim();
        if (dim_ > max_dim)
            throw DimensionLimitError("basis dimension exceeds the cap of " +
                                      std::to_string(max_dim));
    }
    // site-major strides, last site fastest
    strides_.assign(sites_.size(), 1);
    for (int i = static_cast<int>(sites_.size()) - 2; i >= 0; --i)
        strides_[static_cast<size_t>(i)] =
            strides_[static_cast<size_t>(i) + 1] * sites_[static_cast<size_t>(i) + 1].dim();
}

long HilbertBasis::index_of(const std::vector<Label>& labels) const {
    if (labels.size() != sites_.size()) throw ConfigError("label count mismatch");
    long idx = 0;
    for (size_t i = 0; i < sites_.size(); ++i) {
        const SiteBasis& sb = sites_[i];
        const Label& lab = labels[i];
        if (lab.fock < 0 || lab.fock >= sb.fock_dim() || lab.spin < 0 ||
            lab.spin >= sb.spin_dim())
            throw ConfigError("basis label out of range");
        idx += (static_cast<long>(lab.fock) * sb.spin_dim() + lab.spin) * strides_[i];
    }
    return idx;
}

std::vector<HilbertBasis::Label> HilbertBasis::labels_of(long index) const {
    if (index < 0 || index >= dim_) throw ConfigError("basis index out of range");
    std::vector<Label> labels(sites_.size());
    for (size_t i = 0; i < sites_.size(); ++i) {
        const long local = (index / strides_[i]) % sites_[i].dim();
        labels[i].fock = static_cast<int>(local / sites_[i].spin_dim());
        labels[i].spin = static_cast<int>(local % sites_[i].spin_dim());
    }
    return labels;
}

namespace {

// Embed a single-site operator given by its action on (fock, spin) labels.
template <typename Action>
SparseOp lift(const HilbertBasis& basis, int site, Action&& action) {
    std::vector<Eigen::Triplet<Complex>> trip;
    const long dim = basis.dim();
    for (long col = 0; col < dim; ++col) {
        auto labels = basis.labels_of(col);
        auto& lab = labels[static_cast<size_t>(site)];
        // action yields (new_fock, new_spin, amplitude) tuples
        action(lab, [&](int nf, int ns, Complex amp) {
            if (amp == Complex{}) return;
            auto out = labels;
            out[static_cast<size_t>(site)] = HilbertBasis::Label{nf, ns};
            trip.emplace_back(basis.index_of(out), col, amp);
        });
    }
    SparseOp op(dim, dim);
    op.setFromTriplets(trip.begin(), trip.end());
    return op;
}

double spin_raise_amp(double s, double m) { return std::sqrt(s * (s + 1.0) - m * (m + 1.0)); }

} // namespace

SparseOp annihilation_op(const HilbertBasis& basis, int site) {
    return lift(basis, site, [&](const HilbertBasis::Label& lab, auto&& emit) {
        if (lab.fock > 0)
            emit(lab.fock - 1, lab.spin, Complex{std::sqrt(static_cast<double>(lab.fock)), 0});
    });
}

SparseOp creation_op(const HilbertBasis& basis, int site) {
    const int n_max = basis.site(site).n_max;
    return lift(basis, site, [&](const HilbertBasis::Label& lab, auto&& emit) {
        if (lab.fock < n_max)
            emit(lab.fock + 1, lab.spin,
                 Complex{std::sqrt(static_cast<double>(lab.fock) + 1.0), 0});
    });
}

SparseOp number_op(const HilbertBasis& basis, int site) {
    return lift(basis, site, [&](const HilbertBasis::Label& lab, auto&& emit) {
        emit(lab.fock, lab.spin, Complex{static_cast<double>(lab.fock), 0});
    });
}

SparseOp spin_raise_op(const HilbertBasis& basis, int site) {
    const double s = basis.site(site).s;
    const int top = basis.site(site).spin_dim() - 1;
    return lift(basis, site, [&](const HilbertBasis::Label& lab, auto&& emit) {
        if (lab.spin < top) {
            const double m = -s + lab.spin;
            emit(lab.fock, lab.spin + 1, Complex{spin_raise_amp(s, m), 0});
        }
    });
}

SparseOp spin_lower_op(const HilbertBasis& basis, int site) {
    const double s = basis.site(site).s;
    return lift(basis, site, [&](const HilbertBasis::Label& lab, auto&& emit) {
        if (lab.spin > 0) {
            const double m = -s + lab.spin;
            emit(lab.fock, lab.spin - 1, Complex{spin_raise_amp(s, m - 1.0), 0});
        }
    });
}

SparseOp spin_z_op(const HilbertBasis& basis, int site) {
    const double s = basis.site(site).s;
    return lift(basis, site, [&](const HilbertBasis::Label& lab, auto&& emit) {
        emit(lab.fock, lab.spin, Complex{-s + lab.spin, 0});
    });
}

SparseOp current_op(const HilbertBasis& basis, int i, int j, double J) {
    SparseOp adj_ai = creation_op(basis, j) * annihilation_op(basis, i);
    SparseOp adi_aj = creation_op(basis, i) * annihilation_op(basis, j);
    return Complex{0, J} * (adj_ai - adi_aj).eval();
}

SparseOp build_hamiltonian(const NetworkSpec& spec, const HilbertBasis& basis) {
    if (spec.n_sites() != basis.n_sites())
        throw ConfigError("network and basis disagree on the site count");
    const long dim = basis.dim();
    SparseOp H(dim, dim);
    for (int i = 0; i < spec.n_sites(); ++i) {
        const SiteParams& p = spec.sites[static_cast<size_t>(i)];
        if (p.spin.infinite)
            throw ConfigError("oracle requires finite spins");
        const double sqrt_s = std::sqrt(p.spin.s);
        SparseOp a = annihilation_op(basis, i);
        SparseOp ad = creation_op(basis, i);
        H += (p.omega_c * number_op(basis, i)).eval();
        H += (p.omega_s * spin_z_op(basis, i)).eval();
        H += (Complex{p.g / sqrt_s, 0} *
              (ad * spin_lower_op(basis, i) + a * spin_raise_op(basis, i)))
                 .eval();
        const double f_bare = p.drive_amplitude / sqrt_s;
        H += (Complex{0, f_bare} * (a - ad).eval()).eval();
    }
    for (const auto& [key, J] : spec.hopping) {
        auto [i, j] = key;
        SparseOp hop = creation_op(basis, i) * annihilation_op(basis, j);
        H += (Complex{-J, 0} * (hop + SparseOp(hop.adjoint())).eval()).eval();
    }
    H.makeCompressed();

    SparseOp diff = (H - SparseOp(H.adjoint())).pruned();
    double asym = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (SparseOp::InnerIterator it(diff, k); it; ++it)
            asym = std::max(asym, std::abs(it.value()));
    if (asym > 1e-12)
        throw FactorizationError("Hamiltonian asymmetry " + std::to_string(asym));
    return H;
}

std::vector<SparseOp> jump_operators(const NetworkSpec& spec, const HilbertBasis& basis) {
    std::vector<SparseOp> jumps;
    for (int i = 0; i < spec.n_sites(); ++i) {
        const SiteParams& p = spec.sites[static_cast<size_t>(i)];
        const double nb = p.spin.infinite ? p.nbar : p.nbar / p.spin.s;
        if (p.kappa * (nb + 1.0) > 0.0)
            jumps.push_back(
                (std::sqrt(p.kappa * (nb + 1.0)) * annihilation_op(basis, i)).eval());
        if (p.kappa * nb > 0.0)
            jumps.push_back((std::sqrt(p.kappa * nb) * creation_op(basis, i)).eval());
        if (p.gamma * (nb + 1.0) > 0.0)
            jumps.push_back((std::sqrt(p.gamma * (nb + 1.0)) * spin_lower_op(basis, i)).eval());
        if (p.gamma * nb > 0.0)
            jumps.push_back((std::sqrt(p.gamma * nb) * spin_raise_op(basis, i)).eval());
    }
    return jumps;
}

Eigen::VectorXcd coherent_lowest_weight_state(const HilbertBasis& basis,
                                              const std::vector<Complex>& alpha_bare) {
    if (static_cast<int>(alpha_bare.size()) != basis.n_sites())
        throw ConfigError("amplitude count does not match the basis");
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(basis.dim());
    std::vector<HilbertBasis::Label> labels(static_cast<size_t>(basis.n_sites()));
    // fill by iterating the full basis; amplitude is the product of per-site
    // coherent coefficients for spin label 0
    for (long idx = 0; idx < basis.dim(); ++idx) {
        auto labs = basis.labels_of(idx);
        Complex amp{1.0, 0.0};
        bool ok = true;
        for (int i = 0; i < basis.n_sites(); ++i) {
            const auto& lab = labs[static_cast<size_t>(i)];
            if (lab.spin != 0) {
                ok = false;
                break;
            }
            Complex c{1.0, 0.0};
            for (int n = 1; n <= lab.fock; ++n)
                c *= alpha_bare[static_cast<size_t>(i)] / std::sqrt(static_cast<double>(n));
            amp *= c;
        }
        if (ok) psi[idx] = amp;
    }
    const double nrm = psi.norm();
    if (nrm == 0.0) throw ConfigError("coherent state collapsed to zero after truncation");
    return psi / nrm;
}

namespace {

Complex sparse_trace_product(const SparseOp& O, const Eigen::MatrixXcd& rho) {
    Complex tr{};
    for (int k = 0; k < O.outerSize(); ++k)
        for (SparseOp::InnerIterator it(O, k); it; ++it)
            tr += it.value() * rho(it.col(), it.row());
    return tr;
}

Eigen::MatrixXcd lindblad_rhs(const Eigen::MatrixXcd& rho, const SparseOp& H,
                              const std::vector<SparseOp>& jumps, const SparseOp& G) {
    Eigen::MatrixXcd out = Complex{0, -1} * (H * rho - rho * H);
    out.noalias() -= 0.5 * (G * rho + rho * G);
    for (const SparseOp& L : jumps) {
        Eigen::MatrixXcd Lr = L * rho;
        out.noalias() += Lr * SparseOp(L.adjoint());
    }
    return out;
}

SparseOp sum_LdagL(const std::vector<SparseOp>& jumps, long dim) {
    SparseOp G(dim, dim);
    for (const SparseOp& L : jumps) G += (SparseOp(L.adjoint()) * L).eval();
    G.makeCompressed();
    return G;
}

} // namespace

MasterEvolution evolve_master_dense(const Eigen::MatrixXcd& rho0, const SparseOp& H,
                                    const std::vector<SparseOp>& jumps,
                                    const std::vector<SparseOp>& observables,
                                    const HilbertBasis& basis, double dt, double t_final,
                                    long record_stride, long max_dim) {
    const long dim = rho0.rows();
    if (dim > max_dim)
        throw DimensionLimitError("dense evolution dimension " + std::to_string(dim) +
                                  " exceeds the cap of " + std::to_string(max_dim));
    if (record_stride < 1) record_stride = 1;
    const long n_steps = static_cast<long>(std::ceil(t_final / dt - 1e-9));
    const SparseOp G = sum_LdagL(jumps, dim);

    MasterEvolution out;
    out.expectations.resize(observables.size());

    Eigen::MatrixXcd rho = rho0;
    auto record = [&](long k) {
        out.times.push_back(static_cast<double>(k) * dt);
        for (size_t o = 0; o < observables.size(); ++o)
            out.expectations[o].push_back(sparse_trace_product(observables[o], rho));
        out.trace_error.push_back(std::abs(rho.trace() - Complex{1.0, 0.0}));
    };
    record(0);

    for (long k = 0; k < n_steps; ++k) {
        Eigen::MatrixXcd k1 = lindblad_rhs(rho, H, jumps, G);
        Eigen::MatrixXcd k2 = lindblad_rhs(rho + 0.5 * dt * k1, H, jumps, G);
        Eigen::MatrixXcd k3 = lindblad_rhs(rho + 0.5 * dt * k2, H, jumps, G);
        Eigen::MatrixXcd k4 = lindblad_rhs(rho + dt * k3, H, jumps, G);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if ((k + 1) % record_stride == 0 || k + 1 == n_steps) record(k + 1);
    }

    // diagonal Fock populations of the top two levels per site
    for (int i = 0; i < basis.n_sites(); ++i) {
        double top = 0.0;
        for (long idx = 0; idx < dim; ++idx) {
            const auto labs = basis.labels_of(idx);
            const int nf = labs[static_cast<size_t>(i)].fock;
            if (nf >= basis.site(i).n_max - 1) top += rho(idx, idx).real();
        }
        out.top_fock_population.push_back(top);
    }
    return out;
}

McwTrajectoryResult mcw_trajectory(const Eigen::VectorXcd& psi0, const SparseOp& H,
                                   const std::vector<SparseOp>& jumps,
                                   const std::vector<SparseOp>& observables, double dt,
                                   double t_final, long record_stride, TrajectoryRng& rng) {
    if (record_stride < 1) record_stride = 1;
    const long dim = psi0.size();
    const long n_steps = static_cast<long>(std::ceil(t_final / dt - 1e-9));
    const SparseOp G = sum_LdagL(jumps, dim);
    SparseOp Heff = (H + Complex{0, -0.5} * G).eval().pruned();

    McwTrajectoryResult out;
    out.expectations.resize(observables.size());

    Eigen::VectorXcd psi = psi0 / psi0.norm();
    double threshold = rng.uniform();

    auto rhs = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
        return Complex{0, -1} * (Heff * v);
    };
    auto record = [&](long k) {
        out.times.push_back(static_cast<double>(k) * dt);
        const double n2 = psi.squaredNorm();
        for (size_t o = 0; o < observables.size(); ++o)
            out.expectations[o].push_back(psi.dot(observables[o] * psi) / n2);
    };
    record(0);

    for (long k = 0; k < n_steps; ++k) {
        Eigen::VectorXcd k1 = rhs(psi);
        Eigen::VectorXcd k2 = rhs(psi + 0.5 * dt * k1);
        Eigen::VectorXcd k3 = rhs(psi + 0.5 * dt * k2);
        Eigen::VectorXcd k4 = rhs(psi + dt * k3);
        psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        if (psi.squaredNorm() < threshold) {
            // collapse into one decay channel with the standard weights
            std::vector<double> weights(jumps.size(), 0.0);
            double total = 0.0;
            std::vector<Eigen::VectorXcd> kicked(jumps.size());
            for (size_t mth = 0; mth < jumps.size(); ++mth) {
                kicked[mth] = jumps[mth] * psi;
                weights[mth] = kicked[mth].squaredNorm();
                total += weights[mth];
            }
            if (total > 0.0) {
                double draw = rng.uniform() * total;
                size_t pick = 0;
                double acc = 0.0;
                for (size_t mth = 0; mth < jumps.size(); ++mth) {
                    acc += weights[mth];
                    if (draw <= acc) {
                        pick = mth;
                        break;
                    }
                }
                psi = kicked[pick] / std::sqrt(weights[pick]);
                ++out.n_jumps;
            } else {
                psi /= psi.norm();
            }
            threshold = rng.uniform();
        }
        if ((k + 1) % record_stride == 0 || k + 1 == n_steps) record(k + 1);
    }
    out.final_norm2 = psi.squaredNorm();
    return out;
}

McwEnsembleResult mcw_ensemble(const Eigen::VectorXcd& psi0, const SparseOp& H,
                               const std::vector<SparseOp>& jumps,
                               const std::vector<SparseOp>& observables, double dt,
                               double t_final, long record_stride,
                               unsigned long long master_seed, long n_trajectories,
                               int n_threads) {
    if (n_trajectories < 1) throw ConfigError("mcw_ensemble needs n_trajectories >= 1");
    std::vector<McwTrajectoryResult> results(static_cast<size_t>(n_trajectories));
    std::atomic<long> next{0};
    std::exception_ptr worker_error;
    std::mutex error_mutex;
    auto work = [&]() {
        try {
            for (;;) {
                const long k = next.fetch_add(1);
                if (k >= n_trajectories) return;
                TrajectoryRng rng(master_seed, static_cast<std::uint64_t>(k));
                results[static_cast<size_t>(k)] = mcw_trajectory(
                    psi0, H, jumps, observables, dt, t_final, record_stride, rng);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!worker_error) worker_error = std::current_exception();
        }
    };
    const int workers = static_cast<int>(
        std::max<long>(1, std::min<long>(resolve_thread_count(n_threads), n_trajectories)));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& th : pool) th.join();
    }
    if (worker_error) std::rethrow_exception(worker_error);

    McwEnsembleResult out;
    out.times = results[0].times;
    out.n_trajectories = n_trajectories;
    const size_t K = out.times.size();
    out.mean.assign(observables.size(), std::vector<Complex>(K, Complex{}));
    out.std_error.assign(observables.size(), std::vector<double>(K, 0.0));
    for (const auto& r : results) out.total_jumps += r.n_jumps;
    if (jumps.empty()) {
        out.max_norm_drift = 0.0;
        for (const auto& r : results)
            out.max_norm_drift = std::max(out.max_norm_drift, std::abs(r.final_norm2 - 1.0));
    }

    for (size_t o = 0; o < observables.size(); ++o) {
        for (size_t t = 0; t < K; ++t) {
            KahanSum sr, si, srr, sii;
            for (const auto& r : results) {
                const Complex v = r.expectations[o][t];
                sr.add(v.real());
                si.add(v.imag());
                srr.add(v.real() * v.real());
                sii.add(v.imag() * v.imag());
            }
            const double n = static_cast<double>(n_trajectories);
            const double mr = sr.sum / n;
            const double mi = si.sum / n;
            out.mean[o][t] = Complex{mr, mi};
            if (n_trajectories > 1) {
                double var = std::max(0.0, srr.sum - n * mr * mr) +
                             std::max(0.0, sii.sum - n * mi * mi);
                out.std_error[o][t] = std::sqrt(var / (n - 1.0) / n);
            }
        }
    }
    return out;
}

namespace {

// exp(x * N) for a nilpotent matrix N, summed exactly.
Eigen::MatrixXcd nilpotent_exp(Complex x, const Eigen::MatrixXcd& N) {
    const long d = N.rows();
    Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(d, d);
    Eigen::MatrixXcd sum = term;
    for (long k = 1; k < d; ++k) {
        term = (x / static_cast<double>(k)) * (term * N).eval();
        sum += term;
        if (term.cwiseAbs().maxCoeff() == 0.0) break;
    }
    return sum;
}

struct SpinMatrices {
    Eigen::MatrixXcd sp, sm, sz;
};

SpinMatrices dense_spin(double s) {
    const int d = static_cast<int>(std::lround(2.0 * s)) + 1;
    SpinMatrices m;
    m.sp = Eigen::MatrixXcd::Zero(d, d);
    m.sm = Eigen::MatrixXcd::Zero(d, d);
    m.sz = Eigen::MatrixXcd::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        const double mm = -s + k;
        m.sz(k, k) = mm;
        if (k + 1 < d) {
            const double amp = spin_raise_amp(s, mm);
            m.sp(k + 1, k) = amp;
            m.sm(k, k + 1) = amp;
        }
    }
    return m;
}

// Projector kernel for one spin: exp(z S+) |s,-s><s,-s| exp(w S-) / (1+wz)^{2s}
Eigen::MatrixXcd spin_kernel(double s, Complex z, Complex w, const SpinMatrices& m) {
    const int d = static_cast<int>(std::lround(2.0 * s)) + 1;
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(d, d);
    P(0, 0) = 1.0;
    const Complex norm = std::pow(1.0 + w * z, 2.0 * s);
    return nilpotent_exp(z, m.sp) * P * nilpotent_exp(w, m.sm) / norm;
}

double max_abs(const Eigen::MatrixXcd& A) { return A.cwiseAbs().maxCoeff(); }

} // namespace

std::vector<IdentityCheck> verify_spin_identities(const std::vector<double>& s_values,
                                                  double delta) {
    const std::vector<std::pair<Complex, Complex>> points = {
        {Complex{0.3, 0.2}, Complex{0.1, -0.4}},
        {Complex{0.5, 0.0}, Complex{0.5, 0.0}},
        {Complex{-0.6, 0.1}, Complex{0.25, 0.3}},
        {Complex{0.2, -0.5}, Complex{0.2, 0.5}},
    };
    std::vector<IdentityCheck> checks = {
        {"spin:S+K", 0.0}, {"spin:KS+", 0.0}, {"spin:S-K", 0.0},
        {"spin:KS-", 0.0}, {"spin:SzK", 0.0}, {"spin:KSz", 0.0},
    };
    for (double s : s_values) {
        const SpinMatrices m = dense_spin(s);
        for (const auto& [z, w] : points) {
            const Eigen::MatrixXcd K = spin_kernel(s, z, w, m);
            const Eigen::MatrixXcd dz =
                (spin_kernel(s, z + delta, w, m) - spin_kernel(s, z - delta, w, m)) /
                (2.0 * delta);
            const Eigen::MatrixXcd dw =
                (spin_kernel(s, z, w + delta, m) - spin_kernel(s, z, w - delta, m)) /
                (2.0 * delta);
            const Complex denom = 1.0 + w * z;
            const Complex az = 2.0 * s * z / denom;
            const Complex aw = 2.0 * s * w / denom;
            const Complex sz_shift = -s * (1.0 - w * z) / denom;

            checks[0].max_error = std::max(checks[0].max_error, max_abs(m.sp * K - (dz + aw * K)));
            checks[1].max_error =
                std::max(checks[1].max_error, max_abs(K * m.sp - (-w * w * dw + aw * K)));
            checks[2].max_error =
                std::max(checks[2].max_error, max_abs(m.sm * K - (-z * z * dz + az * K)));
            checks[3].max_error = std::max(checks[3].max_error, max_abs(K * m.sm - (dw + az * K)));
            checks[4].max_error =
                std::max(checks[4].max_error, max_abs(m.sz * K - (z * dz + sz_shift * K)));
            checks[5].max_error =
                std::max(checks[5].max_error, max_abs(K * m.sz - (w * dw + sz_shift * K)));
        }
    }
    return checks;
}

namespace {

// Unnormalized coherent kernel exp(alpha a+)|0><0|exp(beta a) / e^{alpha beta}
Eigen::MatrixXcd bosonic_kernel(Complex alpha, Complex beta, int cutoff) {
    Eigen::VectorXcd u(cutoff + 1), v(cutoff + 1);
    u[0] = 1.0;
    v[0] = 1.0;
    for (int n = 1; n <= cutoff; ++n) {
        u[n] = u[n - 1] * alpha / std::sqrt(static_cast<double>(n));
        v[n] = v[n - 1] * beta / std::sqrt(static_cast<double>(n));
    }
    return (u * v.transpose()) / std::exp(alpha * beta);
}

} // namespace

std::vector<IdentityCheck> verify_bosonic_identities(int cutoff, double delta) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(cutoff + 1, cutoff + 1);
    for (int n = 1; n <= cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    const Eigen::MatrixXcd ad = a.adjoint();

    const std::vector<std::pair<Complex, Complex>> points = {
        {Complex{1.0, 0.0}, Complex{1.0, 0.0}},
        {Complex{0.7, 0.4}, Complex{0.7, -0.4}},
        {Complex{0.9, -0.3}, Complex{0.5, 0.2}},
    };
    std::vector<IdentityCheck> checks = {
        {"boson:aK", 0.0},
        {"boson:Ka", 0.0},
        {"boson:a+K", 0.0},
        {"boson:Ka+", 0.0},
    };
    for (const auto& [alpha, beta] : points) {
        const Eigen::MatrixXcd K = bosonic_kernel(alpha, beta, cutoff);
        const Eigen::MatrixXcd da =
            (bosonic_kernel(alpha + delta, beta, cutoff) -
             bosonic_kernel(alpha - delta, beta, cutoff)) /
            (2.0 * delta);
        const Eigen::MatrixXcd db =
            (bosonic_kernel(alpha, beta + delta, cutoff) -
             bosonic_kernel(alpha, beta - delta, cutoff)) /
            (2.0 * delta);
        checks[0].max_error = std::max(checks[0].max_error, max_abs(a * K - alpha * K));
        checks[1].max_error = std::max(checks[1].max_error, max_abs(K * a - (db + alpha * K)));
        checks[2].max_error = std::max(checks[2].max_error, max_abs(ad * K - (da + beta * K)));
        checks[3].max_error = std::max(checks[3].max_error, max_abs(K * ad - beta * K));
    }
    return checks;
}

} // namespace spinboson
