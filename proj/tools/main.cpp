// Command-line front end: subcommands run / classical / mcw / scan / verify.
// Exit codes: 0 success, 1 verification failure, 2 invalid configuration,
// 3 broken-trajectory fraction above --max-broken, 4 I/O or runtime failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spinboson/config_file.hpp"
#include "spinboson/csv.hpp"
#include "spinboson/ensemble.hpp"
#include "spinboson/oracle.hpp"
#include "spinboson/verify.hpp"

using namespace spinboson;

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kInvalid = 2;
constexpr int kTooManyBroken = 3;
constexpr int kIoFailed = 4;

struct CommonFlags {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<unsigned long long> seed;
    std::optional<double> dt;
    std::optional<long> trajectories;
    std::optional<double> t_final;
    std::optional<std::string> steady_window;
    std::optional<std::string> scan;
    std::optional<std::string> initial;
    std::optional<std::string> initial_n;
    std::optional<std::string> spin_offset;
    std::optional<std::string> spike_policy;
    double max_broken = 0.5;
    long stride = 1;
    int threads = 0;
    std::optional<std::string> hist_obs;
    int hist_bins = 200;
    std::optional<std::string> hist_range;
};

void add_common(CLI::App* cmd, CommonFlags& fl, bool scan_required = false) {
    cmd->add_option("--config", fl.config_path, "configuration file")->required();
    cmd->add_option("--out", fl.out_dir, "output directory (default .)");
    cmd->add_option("--seed", fl.seed, "override master_seed");
    cmd->add_option("--dt", fl.dt, "override the integration step");
    cmd->add_option("--trajectories", fl.trajectories, "override n_trajectories");
    cmd->add_option("--t-final", fl.t_final, "override t_final");
    cmd->add_option("--steady-window", fl.steady_window,
                    "T0:T1 averaging window for steady statistics");
    auto* scan_opt = cmd->add_option("--scan", fl.scan,
                                     "PARAM=START:STOP:STEP sweep (g, kappa, nbar, "
                                     "drive_amplitude, J)");
    if (scan_required) scan_opt->required();
    cmd->add_option("--initial", fl.initial,
                    "initial photon amplitudes per site, re:im comma separated");
    cmd->add_option("--initial-n", fl.initial_n,
                    "initial photon numbers per site, comma separated");
    cmd->add_option("--spin-offset", fl.spin_offset,
                    "re:im stereographic offset of the initial spins");
    cmd->add_option("--spike-policy", fl.spike_policy,
                    "exclude_after_breakdown | truncate_trajectory | keep_all");
    cmd->add_option("--max-broken", fl.max_broken,
                    "tolerated broken-trajectory fraction (default 0.5)");
    cmd->add_option("--stride", fl.stride, "record every Nth step (default 1)");
    cmd->add_option("--threads", fl.threads, "worker threads (0: SPINBOSON_THREADS/auto)");
    cmd->add_option("--histogram", fl.hist_obs,
                    "collect a window histogram of this observable (e.g. current_0_1)");
    cmd->add_option("--bins", fl.hist_bins, "histogram bin count (default 200)");
    cmd->add_option("--range", fl.hist_range, "LO:HI histogram range (default: sample span)");
}

std::pair<double, double> parse_pair(const std::string& text, const char* what) {
    double a = 0.0, b = 0.0;
    if (std::sscanf(text.c_str(), "%lf:%lf", &a, &b) != 2)
        throw ConfigError(std::string(what) + " must have the form A:B, got '" + text + "'");
    return {a, b};
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

std::vector<Complex> parse_initial(const CommonFlags& fl, int n_sites) {
    if (fl.initial && fl.initial_n)
        throw ConfigError("--initial and --initial-n are mutually exclusive");
    std::vector<Complex> photons(static_cast<size_t>(n_sites), Complex{});
    const auto check_count = [&](size_t got) {
        if (got != photons.size())
            throw ConfigError("initial state lists " + std::to_string(got) +
                              " sites, network has " + std::to_string(n_sites));
    };
    if (fl.initial) {
        const auto parts = split(*fl.initial, ',');
        check_count(parts.size());
        for (size_t i = 0; i < parts.size(); ++i) {
            double re = 0.0, im = 0.0;
            if (std::sscanf(parts[i].c_str(), "%lf:%lf", &re, &im) < 1)
                throw ConfigError("bad --initial entry '" + parts[i] + "'");
            photons[i] = Complex{re, im};
        }
    } else if (fl.initial_n) {
        const auto parts = split(*fl.initial_n, ',');
        check_count(parts.size());
        for (size_t i = 0; i < parts.size(); ++i) {
            double n = 0.0;
            if (std::sscanf(parts[i].c_str(), "%lf", &n) != 1 || n < 0.0)
                throw ConfigError("bad --initial-n entry '" + parts[i] + "'");
            photons[i] = Complex{std::sqrt(n), 0.0};
        }
    }
    return photons;
}

void apply_overrides(ParsedConfig& cfg, const CommonFlags& fl) {
    if (fl.seed) cfg.simulation.master_seed = *fl.seed;
    if (fl.dt) cfg.simulation.dt = *fl.dt;
    if (fl.trajectories) cfg.simulation.n_trajectories = *fl.trajectories;
    if (fl.t_final) cfg.simulation.t_final = *fl.t_final;
    if (fl.spin_offset) {
        auto [re, im] = parse_pair(*fl.spin_offset, "--spin-offset");
        cfg.simulation.initial_spin_offset_re = re;
        cfg.simulation.initial_spin_offset_im = im;
    }
    if (fl.spike_policy) {
        auto policy = spike_policy_from_string(*fl.spike_policy);
        if (!policy) throw ConfigError("unknown spike policy '" + *fl.spike_policy + "'");
        cfg.simulation.spike_policy = *policy;
    }
}

RunOptions build_run_options(const CommonFlags& fl, Representation rep) {
    RunOptions opts;
    opts.record_stride = fl.stride;
    opts.n_threads = fl.threads;
    opts.representation = rep;
    if (fl.steady_window)
        opts.steady_window = parse_pair(*fl.steady_window, "--steady-window");
    if (fl.hist_obs) {
        HistogramRequest req;
        req.observable = *fl.hist_obs;
        req.n_bins = fl.hist_bins;
        if (fl.hist_range) {
            auto [lo, hi] = parse_pair(*fl.hist_range, "--range");
            req.lo = lo;
            req.hi = hi;
        }
        opts.histogram = req;
    }
    return opts;
}

struct ScanRequest {
    std::string parameter;
    std::vector<double> values;
};

ScanRequest parse_scan(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos)
        throw ConfigError("--scan must have the form PARAM=START:STOP:STEP");
    ScanRequest req;
    req.parameter = text.substr(0, eq);
    double start = 0.0, stop = 0.0, step = 0.0;
    if (std::sscanf(text.c_str() + eq + 1, "%lf:%lf:%lf", &start, &stop, &step) != 3)
        throw ConfigError("--scan must have the form PARAM=START:STOP:STEP");
    if (!(step > 0.0)) throw ConfigError("--scan step must be > 0");
    if (stop < start) throw ConfigError("--scan needs STOP >= START");
    const double tol = 1e-9 * std::max(1.0, step);
    for (double v = start; v <= stop + tol; v += step) {
        req.values.push_back(v);
        if (req.values.size() > 10000) throw ConfigError("--scan lists over 10000 points");
    }
    return req;
}

std::filesystem::path ensure_out_dir(const std::string& dir) {
    std::filesystem::path p(dir);
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
    return p;
}

int broken_exit(long n_broken, long n_diverged, long n_traj, double max_broken) {
    const double fraction =
        n_traj > 0 ? static_cast<double>(n_broken + n_diverged) / n_traj : 0.0;
    if (fraction > max_broken) {
        std::cerr << "broken fraction " << fraction << " exceeds --max-broken " << max_broken
                  << "\n";
        return kTooManyBroken;
    }
    return kOk;
}

int do_scan(const ParsedConfig& cfg, const CommonFlags& fl, Representation rep) {
    const ScanRequest req = parse_scan(*fl.scan);
    RunOptions opts = build_run_options(fl, rep);
    const std::vector<Complex> photons = parse_initial(fl, cfg.network.n_sites());
    const ScanResult result =
        scan_parameter(cfg.network, cfg.simulation, photons, req.parameter, req.values, opts);

    const auto out = ensure_out_dir(fl.out_dir);
    write_scan_csv((out / "scan_current.csv").string(), result);
    write_scan_series_csv((out / "scan_series.csv").string(), result);
    std::cout << "scan " << req.parameter << ": " << result.points.size() << " points -> "
              << (out / "scan_current.csv").string() << ", "
              << (out / "scan_series.csv").string() << "\n";

    int rc = kOk;
    for (const ScanPoint& p : result.points) {
        const int prc =
            broken_exit(p.n_broken, p.n_diverged, cfg.simulation.n_trajectories, fl.max_broken);
        if (prc != kOk) rc = prc;
    }
    return rc;
}

int do_run(const CommonFlags& fl, Representation rep) {
    ParsedConfig cfg = load_config(fl.config_path);
    apply_overrides(cfg, fl);
    if (rep == Representation::Spherical && !cfg.network.all_classical()) {
        std::cerr << "classical integration requires every site spin to be inf\n";
        return kInvalid;
    }
    if (fl.scan) return do_scan(cfg, fl, rep);

    const RunOptions opts = build_run_options(fl, rep);
    const std::vector<Complex> photons = parse_initial(fl, cfg.network.n_sites());
    const EnsembleSummary summary = run_ensemble(cfg.network, cfg.simulation, photons, opts);

    const auto out = ensure_out_dir(fl.out_dir);
    for (int i = 0; i < cfg.network.n_sites(); ++i)
        write_site_csv((out / ("site_" + std::to_string(i) + ".csv")).string(), summary, i);
    write_current_csv((out / "current.csv").string(), summary);
    write_summary_json((out / "summary.json").string(), cfg.network, cfg.simulation, summary);
    if (summary.histogram)
        write_histogram_csv((out / "histogram.csv").string(), *summary.histogram);

    std::cout << "trajectories: " << summary.n_trajectories << " (broken " << summary.n_broken
              << ", diverged " << summary.n_diverged << ")\n";
    std::cout << "recorded times: " << summary.times.size() << " up to t = "
              << (summary.times.empty() ? 0.0 : summary.times.back()) << "\n";
    std::cout << "wall: " << summary.wall_seconds << " s\n";
    std::cout << "wrote " << (out / "site_*.csv").string() << ", "
              << (out / "current.csv").string() << ", " << (out / "summary.json").string()
              << "\n";

    return broken_exit(summary.n_broken, summary.n_diverged, summary.n_trajectories,
                       fl.max_broken);
}

// ---- oracle output plumbing ----------------------------------------------

struct OracleColumns {
    std::vector<std::string> names; // full observable order
    std::vector<double> scale;      // bare -> rescaled units
    std::vector<size_t> site_of;    // site index or SIZE_MAX
    std::vector<SparseOp> ops;
};

OracleColumns oracle_observables(const NetworkSpec& spec, const HilbertBasis& basis) {
    OracleColumns cols;
    for (int i = 0; i < spec.n_sites(); ++i) {
        const double s = basis.site(i).s;
        const std::string tag = std::to_string(i);
        const SparseOp sp = spin_raise_op(basis, i);
        const SparseOp sm = spin_lower_op(basis, i);
        auto push = [&](const std::string& name, SparseOp op, double scale) {
            cols.names.push_back(name);
            cols.ops.push_back(std::move(op));
            cols.scale.push_back(scale);
            cols.site_of.push_back(static_cast<size_t>(i));
        };
        SparseOp sx = Complex{0.5, 0.0} * (sp + sm);
        SparseOp sy = Complex{0.0, -0.5} * (sp - sm);
        push("photon_number_" + tag, number_op(basis, i), 1.0 / s);
        push("spin_z_" + tag, spin_z_op(basis, i), 1.0);
        push("spin_x_" + tag, std::move(sx), 1.0);
        push("spin_y_" + tag, std::move(sy), 1.0);
        push("alpha_" + tag, annihilation_op(basis, i), 1.0 / std::sqrt(s));
        push("beta_" + tag, creation_op(basis, i), 1.0 / std::sqrt(s));
    }
    for (const auto& [key, J] : spec.hopping) {
        if (J == 0.0) continue;
        auto [i, j] = key;
        cols.names.push_back("current_" + std::to_string(i) + "_" + std::to_string(j));
        cols.ops.push_back(current_op(basis, i, j, J));
        cols.scale.push_back(1.0 / std::sqrt(basis.site(i).s * basis.site(j).s));
        cols.site_of.push_back(SIZE_MAX);
    }
    {
        SparseOp mon(basis.dim(), basis.dim());
        for (int i = 0; i < spec.n_sites(); ++i) {
            const Complex inv_s{1.0 / basis.site(i).s, 0.0};
            const SparseOp term = inv_s * (number_op(basis, i) + spin_z_op(basis, i));
            mon += term;
        }
        mon.makeCompressed();
        cols.names.push_back("monitor");
        cols.ops.push_back(std::move(mon));
        cols.scale.push_back(1.0);
        cols.site_of.push_back(SIZE_MAX);
    }
    return cols;
}

struct OracleSeries {
    std::vector<double> times;
    std::vector<std::vector<Complex>> mean;     // [obs][time], rescaled units
    std::vector<std::vector<double>> std_error; // same shape; zeros for dense
    long n_samples = 1;
};

size_t column_index(const OracleColumns& cols, const std::string& name) {
    for (size_t o = 0; o < cols.names.size(); ++o)
        if (cols.names[o] == name) return o;
    throw ConfigError("no oracle observable named " + name);
}

void write_oracle_site_csv(const std::string& path, const OracleColumns& cols,
                           const OracleSeries& series, int site) {
    const std::string tag = std::to_string(site);
    const std::vector<std::string> names = {
        "photon_number_" + tag, "spin_z_" + tag, "spin_x_" + tag,
        "spin_y_" + tag,        "alpha_" + tag,  "beta_" + tag,
    };
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "time";
    for (const std::string& n : names)
        out << "," << n << "_re_mean," << n << "_im_mean," << n << "_std_error," << n
            << "_n_samples";
    out << ",homodyne_h,homodyne_im_i,homodyne_im_q\n";
    const size_t a_idx = column_index(cols, "alpha_" + tag);
    const size_t b_idx = column_index(cols, "beta_" + tag);
    for (size_t t = 0; t < series.times.size(); ++t) {
        out << format_full(series.times[t]);
        for (const std::string& n : names) {
            const size_t o = column_index(cols, n);
            out << "," << format_full(series.mean[o][t].real()) << ","
                << format_full(series.mean[o][t].imag()) << ","
                << format_full(series.std_error[o][t]) << "," << series.n_samples;
        }
        const HomodyneSignal h = homodyne(series.mean[a_idx][t], series.mean[b_idx][t]);
        out << "," << format_full(h.h) << "," << format_full(h.im_i) << ","
            << format_full(h.im_q) << "\n";
    }
}

void write_oracle_current_csv(const std::string& path, const OracleColumns& cols,
                              const OracleSeries& series) {
    std::vector<size_t> idx;
    for (size_t o = 0; o < cols.names.size(); ++o)
        if (cols.names[o].rfind("current_", 0) == 0 || cols.names[o] == "monitor")
            idx.push_back(o);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "time";
    for (size_t o : idx)
        out << "," << cols.names[o] << "_re_mean," << cols.names[o] << "_im_mean,"
            << cols.names[o] << "_std_error," << cols.names[o] << "_n_samples";
    out << "\n";
    for (size_t t = 0; t < series.times.size(); ++t) {
        out << format_full(series.times[t]);
        for (size_t o : idx)
            out << "," << format_full(series.mean[o][t].real()) << ","
                << format_full(series.mean[o][t].imag()) << ","
                << format_full(series.std_error[o][t]) << "," << series.n_samples;
        out << "\n";
    }
}

int cmd_mcw(const CommonFlags& fl, int cutoff, long dense_limit) {
    ParsedConfig cfg = load_config(fl.config_path);
    apply_overrides(cfg, fl);
    if (ValidationReport rep = validate(cfg.network); !rep.ok()) {
        std::cerr << "invalid network: " << rep.joined() << "\n";
        return kInvalid;
    }
    for (const SiteParams& p : cfg.network.sites)
        if (p.spin.infinite) {
            std::cerr << "the oracle needs finite spins; found spin_s = inf\n";
            return kInvalid;
        }

    std::vector<SiteBasis> site_bases;
    for (const SiteParams& p : cfg.network.sites)
        site_bases.push_back(SiteBasis{cutoff, p.spin.s});
    const HilbertBasis basis(site_bases); // throws DimensionLimitError -> exit 2

    const SparseOp H = build_hamiltonian(cfg.network, basis);
    const std::vector<SparseOp> jumps = jump_operators(cfg.network, basis);
    const OracleColumns cols = oracle_observables(cfg.network, basis);

    const std::vector<Complex> photons = parse_initial(fl, cfg.network.n_sites());
    std::vector<Complex> alpha_bare(photons.size());
    for (size_t i = 0; i < photons.size(); ++i)
        alpha_bare[i] = photons[i] * std::sqrt(basis.site(static_cast<int>(i)).s);
    const Eigen::VectorXcd psi0 = coherent_lowest_weight_state(basis, alpha_bare);

    const double dt = fl.dt ? *fl.dt : effective_dt(cfg.simulation, cfg.network);
    const double t_final = cfg.simulation.t_final;
    const long stride = std::max<long>(1, fl.stride);
    const long n_traj = cfg.simulation.n_trajectories;

    const McwEnsembleResult mcw =
        mcw_ensemble(psi0, H, jumps, cols.ops, dt, t_final, stride,
                     cfg.simulation.master_seed, n_traj, fl.threads);

    OracleSeries mcw_series;
    mcw_series.times = mcw.times;
    mcw_series.n_samples = n_traj;
    mcw_series.mean.resize(cols.ops.size());
    mcw_series.std_error.resize(cols.ops.size());
    for (size_t o = 0; o < cols.ops.size(); ++o) {
        mcw_series.mean[o].resize(mcw.times.size());
        mcw_series.std_error[o].resize(mcw.times.size());
        for (size_t t = 0; t < mcw.times.size(); ++t) {
            mcw_series.mean[o][t] = cols.scale[o] * mcw.mean[o][t];
            mcw_series.std_error[o][t] = cols.scale[o] * mcw.std_error[o][t];
        }
    }

    const auto out = ensure_out_dir(fl.out_dir);
    for (int i = 0; i < cfg.network.n_sites(); ++i)
        write_oracle_site_csv((out / ("mcw_site_" + std::to_string(i) + ".csv")).string(),
                              cols, mcw_series, i);
    write_oracle_current_csv((out / "mcw_current.csv").string(), cols, mcw_series);

    double dense_trace_error = -1.0;
    std::vector<double> top_fock;
    const bool dense_ok = basis.dim() <= dense_limit;
    if (dense_ok) {
        const Eigen::MatrixXcd rho0 = psi0 * psi0.adjoint();
        const MasterEvolution master = evolve_master_dense(rho0, H, jumps, cols.ops, basis, dt,
                                                           t_final, stride, dense_limit);
        OracleSeries dense_series;
        dense_series.times = master.times;
        dense_series.n_samples = 1;
        dense_series.mean.resize(cols.ops.size());
        dense_series.std_error.resize(cols.ops.size());
        for (size_t o = 0; o < cols.ops.size(); ++o) {
            dense_series.mean[o].resize(master.times.size());
            dense_series.std_error[o].assign(master.times.size(), 0.0);
            for (size_t t = 0; t < master.times.size(); ++t)
                dense_series.mean[o][t] = cols.scale[o] * master.expectations[o][t];
        }
        for (int i = 0; i < cfg.network.n_sites(); ++i)
            write_oracle_site_csv(
                (out / ("dense_site_" + std::to_string(i) + ".csv")).string(), cols,
                dense_series, i);
        write_oracle_current_csv((out / "dense_current.csv").string(), cols, dense_series);
        dense_trace_error = 0.0;
        for (double e : master.trace_error) dense_trace_error = std::max(dense_trace_error, e);
        top_fock = master.top_fock_population;
    }

    {
        nlohmann::ordered_json j;
        j["hilbert_dim"] = basis.dim();
        j["fock_cutoff"] = cutoff;
        j["dt"] = dt;
        j["t_final"] = t_final;
        j["n_trajectories"] = n_traj;
        j["total_jumps"] = mcw.total_jumps;
        j["jump_channels"] = jumps.size();
        if (jumps.empty()) j["norm_drift"] = mcw.max_norm_drift;
        j["dense_emitted"] = dense_ok;
        if (dense_ok) {
            j["dense_max_trace_error"] = dense_trace_error;
            j["dense_top_fock_population"] = top_fock;
        }
        std::ofstream js(out / "mcw_summary.json");
        if (!js) throw IoError("cannot write mcw_summary.json");
        js << j.dump(2) << "\n";
    }

    std::cout << "hilbert dimension: " << basis.dim() << ", trajectories: " << n_traj
              << ", jumps: " << mcw.total_jumps << "\n";
    if (jumps.empty())
        std::cout << "closed evolution, norm drift: " << mcw.max_norm_drift << "\n";
    if (dense_ok)
        std::cout << "dense master equation emitted, max trace error: " << dense_trace_error
                  << "\n";
    else
        std::cout << "dense master equation skipped (dim " << basis.dim() << " > "
                  << dense_limit << ")\n";
    return kOk;
}

int cmd_verify(long draws, long samples, double perturb) {
    VerifyOptions options;
    options.factorization_draws = draws;
    options.covariance_samples = samples;
    options.perturb_quantum_factor = perturb;
    const std::vector<CheckResult> results = run_verification_suite(options);
    std::cout << "check,measured,threshold,status\n";
    for (const CheckResult& r : results)
        std::cout << r.name << "," << format_full(r.measured) << ","
                  << format_full(r.threshold) << "," << (r.passed ? "pass" : "FAIL") << "\n";
    const bool ok = all_passed(results);
    std::cerr << (ok ? "all checks passed\n" : "verification FAILED\n");
    return ok ? kOk : kVerifyFailed;
}

int guarded(const std::function<int()>& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const DimensionLimitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoFailed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoFailed;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"positive-P and classical phase-space simulator for driven "
                 "spin-boson networks"};
    app.require_subcommand(1);

    CommonFlags fl_run, fl_classical, fl_scan, fl_mcw;
    int mcw_cutoff = 10;
    long mcw_dense_limit = 128;
    long verify_draws = 1000;
    long verify_samples = 200000;
    double verify_perturb = 0.0;

    CLI::App* c_run = app.add_subcommand(
        "run", "integrate the doubled-phase-space ensemble and emit CSV series");
    add_common(c_run, fl_run);

    CLI::App* c_classical = app.add_subcommand(
        "classical", "integrate the spherical classical limit (all spins inf)");
    add_common(c_classical, fl_classical);

    CLI::App* c_scan = app.add_subcommand(
        "scan", "sweep one parameter and report window-averaged bond currents");
    add_common(c_scan, fl_scan, true);

    CLI::App* c_mcw = app.add_subcommand(
        "mcw", "exact-basis oracle: Monte Carlo wavefunction + dense master equation");
    add_common(c_mcw, fl_mcw);
    c_mcw->add_option("--cutoff", mcw_cutoff, "Fock cutoff per site (default 10)");
    c_mcw->add_option("--dense-limit", mcw_dense_limit,
                      "largest Hilbert dimension for the dense solver (default 128)");

    CLI::App* c_verify = app.add_subcommand("verify", "run the self-consistency suite");
    c_verify->add_option("--draws", verify_draws, "factorization sample count");
    c_verify->add_option("--samples", verify_samples, "noise covariance sample count");
    c_verify->add_option("--perturb-quantum", verify_perturb,
                         "test hook: additive perturbation of the quantum noise factor");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInvalid;
    }

    if (c_run->parsed()) return guarded([&] { return do_run(fl_run, Representation::Cartesian); });
    if (c_classical->parsed())
        return guarded([&] { return do_run(fl_classical, Representation::Spherical); });
    if (c_scan->parsed()) {
        return guarded([&] {
            ParsedConfig cfg = load_config(fl_scan.config_path);
            apply_overrides(cfg, fl_scan);
            return do_scan(cfg, fl_scan, Representation::Auto);
        });
    }
    if (c_mcw->parsed())
        return guarded([&] { return cmd_mcw(fl_mcw, mcw_cutoff, mcw_dense_limit); });
    if (c_verify->parsed())
        return guarded([&] { return cmd_verify(verify_draws, verify_samples, verify_perturb); });
    return kInvalid;
}
