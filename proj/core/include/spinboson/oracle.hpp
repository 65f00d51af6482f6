#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <limits>
#include <string>
#include <vector>

#include "model.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace spinboson {

// Exact small-system reference implementations on a truncated Fock basis.
// Everything here works in bare (unrescaled) units: the bridge from the
// network parameters divides the drive by sqrt(s) and the thermal occupation
// by s, and couples spins through g/sqrt(s). Bare photon numbers and currents
// therefore differ from the phase-space estimators by a factor of s.

using SparseOp = Eigen::SparseMatrix<Complex>;

struct SiteBasis {
    int n_max = 0;  // highest Fock state kept
    double s = 0.5; // finite spin magnitude
    int fock_dim() const { return n_max + 1; }
    int spin_dim() const { return static_cast<int>(std::lround(2.0 * s)) + 1; }
    long dim() const { return static_cast<long>(fock_dim()) * spin_dim(); }
};

// Site-major tensor basis with mutually inverse index maps. Spin label 0 is
// the lowest-weight state m = -s.
class HilbertBasis {
public:
    explicit HilbertBasis(std::vector<SiteBasis> sites, long max_dim = 4096);

    long dim() const { return dim_; }
    int n_sites() const { return static_cast<int>(sites_.size()); }
    const SiteBasis& site(int i) const { return sites_[static_cast<size_t>(i)]; }

    struct Label {
        int fock = 0;
        int spin = 0; // 0 .. 2s
    };
    long index_of(const std::vector<Label>& labels) const;
    std::vector<Label> labels_of(long index) const;

private:
    std::vector<SiteBasis> sites_;
    std::vector<long> strides_;
    long dim_ = 0;
};

// Single-site operators embedded in the composite space.
SparseOp annihilation_op(const HilbertBasis& basis, int site);
SparseOp creation_op(const HilbertBasis& basis, int site);
SparseOp number_op(const HilbertBasis& basis, int site);
SparseOp spin_raise_op(const HilbertBasis& basis, int site);
SparseOp spin_lower_op(const HilbertBasis& basis, int site);
SparseOp spin_z_op(const HilbertBasis& basis, int site);
// Photon flow operator from site i into site j for bond amplitude J:
// i J (a_j^dag a_i - a_i^dag a_j).
SparseOp current_op(const HilbertBasis& basis, int i, int j, double J);

// H = sum_i [w_c n_i + w_s Sz_i + g/sqrt(s) (a_i^dag S-_i + a_i S+_i)
//            + i f_i (a_i - a_i^dag)] - sum_bonds J (a_i^dag a_j + h.c.)
// Drives are taken at their plateau value; the ramp option is not modelled
// here. Hermiticity is verified to 1e-12 before returning.
SparseOp build_hamiltonian(const NetworkSpec& spec, const HilbertBasis& basis);

// Collapse operators with the rate prefactors folded in:
// sqrt(kappa(nb+1)) a, sqrt(kappa nb) a^dag, sqrt(gamma(nb+1)) S-,
// sqrt(gamma nb) S+ per site, zero-rate channels omitted. nb = nbar/s.
std::vector<SparseOp> jump_operators(const NetworkSpec& spec, const HilbertBasis& basis);

// Product state: truncated normalized coherent state per cavity, spin in the
// lowest-weight state.
Eigen::VectorXcd coherent_lowest_weight_state(const HilbertBasis& basis,
                                              const std::vector<Complex>& alpha_bare);

struct MasterEvolution {
    std::vector<double> times;
    std::vector<std::vector<Complex>> expectations; // [observable][time]
    std::vector<double> trace_error;                // |tr rho - 1| at record points
    // Highest two Fock populations per site at the final time, for
    // truncation control.
    std::vector<double> top_fock_population;
};

// Classical fourth-order stepping of the full Liouvillian acting on a dense
// density matrix. Guarded by max_dim because the cost is dim^2 per stored
// state and worse per step.
MasterEvolution evolve_master_dense(const Eigen::MatrixXcd& rho0, const SparseOp& H,
                                    const std::vector<SparseOp>& jumps,
                                    const std::vector<SparseOp>& observables,
                                    const HilbertBasis& basis, double dt, double t_final,
                                    long record_stride, long max_dim = 128);

struct McwTrajectoryResult {
    std::vector<double> times;
    std::vector<std::vector<Complex>> expectations; // [observable][time]
    long n_jumps = 0;
    double final_norm2 = 1.0; // squared norm relative to the last collapse
};

// One Monte Carlo wavefunction trajectory: deterministic nonunitary
// evolution under H - i/2 sum L^dag L with norm-threshold jumps.
McwTrajectoryResult mcw_trajectory(const Eigen::VectorXcd& psi0, const SparseOp& H,
                                   const std::vector<SparseOp>& jumps,
                                   const std::vector<SparseOp>& observables, double dt,
                                   double t_final, long record_stride, TrajectoryRng& rng);

struct McwEnsembleResult {
    std::vector<double> times;
    std::vector<std::vector<Complex>> mean;      // [observable][time]
    std::vector<std::vector<double>> std_error;  // [observable][time]
    long n_trajectories = 0;
    long total_jumps = 0;
    // Max |final_norm2 - 1| over trajectories; meaningful (and set) only when
    // no jump channel exists, i.e. the evolution should conserve the norm.
    double max_norm_drift = std::numeric_limits<double>::quiet_NaN();
};

McwEnsembleResult mcw_ensemble(const Eigen::VectorXcd& psi0, const SparseOp& H,
                               const std::vector<SparseOp>& jumps,
                               const std::vector<SparseOp>& observables, double dt,
                               double t_final, long record_stride,
                               unsigned long long master_seed, long n_trajectories,
                               int n_threads);

// Finite-difference checks of the differential operator correspondences used
// by the phase-space mapping, evaluated on dense projector kernels.
struct IdentityCheck {
    std::string name;
    double max_error = 0.0;
};

std::vector<IdentityCheck> verify_spin_identities(const std::vector<double>& s_values,
                                                  double delta = 1e-5);
std::vector<IdentityCheck> verify_bosonic_identities(int cutoff = 40, double delta = 1e-5);

} // namespace spinboson
