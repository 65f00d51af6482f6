#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

// End-to-end checks of the installed command-line interface. The binary path
// arrives via the SPINBOSON_CLI environment variable set by the test runner.

namespace {

namespace fs = std::filesystem;

std::string cli_path() {
    const char* env = std::getenv("SPINBOSON_CLI");
    REQUIRE_MESSAGE(env != nullptr, "SPINBOSON_CLI must point at the executable");
    return env;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("spinboson_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    REQUIRE(raw != -1);
    return WEXITSTATUS(raw);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), ("missing file " + p.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

const char* kQuantumDimer = R"([network]
n_sites = 2

[site.0]
g = 1.0
kappa = 2.0
nbar = 0.2
spin_s = 1.0
drive_amplitude = 1.0

[site.1]
g = 1.0
kappa = 2.0
nbar = 0.2
spin_s = 1.0

[hopping]
0 1 = 1.0

[simulation]
dt = 1e-3
t_final = 0.4
n_trajectories = 120
master_seed = 4242
)";

const char* kClassicalDimer = R"([network]
n_sites = 2

[site.0]
kappa = 20.0
spin_s = inf
drive_amplitude = 70.710678118654755

[site.1]
kappa = 20.0
spin_s = inf

[hopping]
0 1 = 1.0

[simulation]
dt = 1e-5
t_final = 2.0
n_trajectories = 1
master_seed = 1
)";

} // namespace

TEST_CASE("run emits the full file set with exit 0") {
    TempDir dir;
    write_file(dir.path / "c.ini", kQuantumDimer);
    const int rc = run_cli("run --config " + (dir.path / "c.ini").string() + " --out " +
                           (dir.path / "out").string() + " --stride 20");
    CHECK(rc == 0);
    CHECK(fs::exists(dir.path / "out/site_0.csv"));
    CHECK(fs::exists(dir.path / "out/site_1.csv"));
    CHECK(fs::exists(dir.path / "out/current.csv"));
    CHECK(fs::exists(dir.path / "out/summary.json"));

    const std::string head = slurp(dir.path / "out/site_0.csv").substr(0, 5);
    CHECK(head == "time,");
}

TEST_CASE("byte-identical reruns, including across thread counts") {
    TempDir dir;
    write_file(dir.path / "c.ini", kQuantumDimer);
    const std::string base = "run --config " + (dir.path / "c.ini").string() + " --stride 20";
    REQUIRE(run_cli(base + " --out " + (dir.path / "a").string() + " --threads 1") == 0);
    REQUIRE(run_cli(base + " --out " + (dir.path / "b").string() + " --threads 3") == 0);
    REQUIRE(run_cli(base + " --out " + (dir.path / "c").string() + " --threads 2") == 0);

    for (const std::string name : {"site_0.csv", "site_1.csv", "current.csv", "summary.json"}) {
        const std::string a = slurp(dir.path / "a" / name);
        CHECK(a == slurp(dir.path / "b" / name));
        CHECK(a == slurp(dir.path / "c" / name));
    }

    // A different seed changes the bytes.
    REQUIRE(run_cli(base + " --out " + (dir.path / "d").string() + " --seed 777") == 0);
    CHECK(slurp(dir.path / "a/current.csv") != slurp(dir.path / "d/current.csv"));
}

TEST_CASE("classical demands infinite spins, exit 2") {
    TempDir dir;
    write_file(dir.path / "c.ini", kQuantumDimer);
    const int rc = run_cli("classical --config " + (dir.path / "c.ini").string() + " --out " +
                           (dir.path / "out").string());
    CHECK(rc == 2);
}

TEST_CASE("classical integrates all-infinite networks") {
    TempDir dir;
    write_file(dir.path / "c.ini", kClassicalDimer);
    const int rc = run_cli("classical --config " + (dir.path / "c.ini").string() + " --out " +
                           (dir.path / "out").string() +
                           " --stride 1000 --steady-window 1.5:2.0");
    CHECK(rc == 0);
    CHECK(fs::exists(dir.path / "out/site_0.csv"));
    CHECK(fs::exists(dir.path / "out/summary.json"));
}

TEST_CASE("invalid configuration text reports exit 2") {
    TempDir dir;
    write_file(dir.path / "bad.ini", "[network]\nn_sites = 2\n[site.0]\nkappa = -3\n");
    CHECK(run_cli("run --config " + (dir.path / "bad.ini").string()) == 2);

    write_file(dir.path / "worse.ini", "[network]\nn_sites = 1\n[site.0]\nwhat = 1\n");
    CHECK(run_cli("run --config " + (dir.path / "worse.ini").string()) == 2);

    CHECK(run_cli("run --config " + (dir.path / "absent.ini").string()) == 4);
}

TEST_CASE("mcw rejects infinite spins and oversized bases with exit 2") {
    TempDir dir;
    write_file(dir.path / "inf.ini", kClassicalDimer);
    CHECK(run_cli("mcw --config " + (dir.path / "inf.ini").string() + " --out " +
                  (dir.path / "x").string()) == 2);

    write_file(dir.path / "q.ini", kQuantumDimer);
    CHECK(run_cli("mcw --config " + (dir.path / "q.ini").string() + " --out " +
                  (dir.path / "y").string() + " --cutoff 900") == 2);
}

TEST_CASE("mcw emits overlay files with the site-file schema") {
    TempDir dir;
    write_file(dir.path / "q.ini", std::string(kQuantumDimer));
    const int rc = run_cli("mcw --config " + (dir.path / "q.ini").string() + " --out " +
                           (dir.path / "out").string() +
                           " --cutoff 4 --trajectories 40 --stride 40 --dt 2e-3");
    CHECK(rc == 0);
    REQUIRE(fs::exists(dir.path / "out/mcw_site_0.csv"));
    REQUIRE(fs::exists(dir.path / "out/mcw_current.csv"));
    REQUIRE(fs::exists(dir.path / "out/mcw_summary.json"));
    // dim = (4+1 Fock x 3 spin)^2 = 225 > default dense limit: no dense files
    CHECK_FALSE(fs::exists(dir.path / "out/dense_site_0.csv"));

    // Overlay schema matches the ensemble site files column for column.
    write_file(dir.path / "c.ini", kQuantumDimer);
    REQUIRE(run_cli("run --config " + (dir.path / "c.ini").string() + " --out " +
                    (dir.path / "pp").string() + " --stride 40") == 0);
    std::istringstream pp(slurp(dir.path / "pp/site_0.csv"));
    std::istringstream mc(slurp(dir.path / "out/mcw_site_0.csv"));
    std::string pp_head, mc_head;
    std::getline(pp, pp_head);
    std::getline(mc, mc_head);
    CHECK(pp_head == mc_head);

    std::istringstream ppc(slurp(dir.path / "pp/current.csv"));
    std::istringstream mcc(slurp(dir.path / "out/mcw_current.csv"));
    std::getline(ppc, pp_head);
    std::getline(mcc, mc_head);
    CHECK(pp_head == mc_head);
}

TEST_CASE("mcw dense limit produces dense files when the basis fits") {
    TempDir dir;
    const std::string single = R"([network]
n_sites = 1

[site.0]
omega_c = 1.0
omega_s = 1.0
g = 0.5
kappa = 0.4
spin_s = 0.5
drive_amplitude = 0.3

[simulation]
dt = 2e-3
t_final = 1.0
n_trajectories = 30
master_seed = 5
)";
    write_file(dir.path / "s.ini", single);
    const int rc = run_cli("mcw --config " + (dir.path / "s.ini").string() + " --out " +
                           (dir.path / "out").string() + " --cutoff 6 --stride 100");
    CHECK(rc == 0);
    CHECK(fs::exists(dir.path / "out/dense_site_0.csv"));
    CHECK(fs::exists(dir.path / "out/dense_current.csv"));
    CHECK(slurp(dir.path / "out/mcw_summary.json").find("dense_max_trace_error") !=
          std::string::npos);
}

TEST_CASE("scan requires the sweep flag on the scan subcommand") {
    TempDir dir;
    write_file(dir.path / "c.ini", kClassicalDimer);
    CHECK(run_cli("scan --config " + (dir.path / "c.ini").string()) == 2);

    const int rc = run_cli("scan --config " + (dir.path / "c.ini").string() + " --out " +
                           (dir.path / "out").string() +
                           " --scan J=0.5:1.5:0.5 --steady-window 1.5:2.0 --stride 500");
    CHECK(rc == 0);
    CHECK(fs::exists(dir.path / "out/scan_current.csv"));
    CHECK(fs::exists(dir.path / "out/scan_series.csv"));

    // Malformed sweep expressions are configuration errors.
    CHECK(run_cli("scan --config " + (dir.path / "c.ini").string() +
                  " --scan J=1:0:1 --steady-window 1.5:2.0") == 2);
    CHECK(run_cli("scan --config " + (dir.path / "c.ini").string() +
                  " --scan J=zap --steady-window 1.5:2.0") == 2);
}

TEST_CASE("broken-heavy ensembles exit 3 under a strict budget") {
    TempDir dir;
    const std::string fragile = R"([network]
n_sites = 2

[site.0]
g = 4.0
kappa = 2.0
spin_s = 1.0
drive_amplitude = 6.0

[site.1]
g = 4.0
kappa = 2.0
spin_s = 1.0

[hopping]
0 1 = 1.0

[simulation]
dt = 0.05
t_final = 5.0
n_trajectories = 30
master_seed = 5
breakdown_threshold = 1e-2
)";
    write_file(dir.path / "f.ini", fragile);
    const int rc = run_cli("run --config " + (dir.path / "f.ini").string() + " --out " +
                           (dir.path / "out").string() + " --stride 10 --max-broken 0.01");
    CHECK(rc == 3);
    // The same run under the default tolerance succeeds if enough survive;
    // either way the file set must exist (statistics are still written).
    CHECK(fs::exists(dir.path / "out/summary.json"));
}

TEST_CASE("verify reports a table and fails under the perturbation hook") {
    TempDir dir;
    const std::string table_path = (dir.path / "table.csv").string();
    const int rc = std::system((cli_path() + " verify > " + table_path + " 2>/dev/null").c_str());
    REQUIRE(rc != -1);
    CHECK(WEXITSTATUS(rc) == 0);
    const std::string table = slurp(table_path);
    CHECK(table.find("check,measured,threshold,status") == 0);
    CHECK(table.find("factorization:thermal") != std::string::npos);
    CHECK(table.find("FAIL") == std::string::npos);

    CHECK(run_cli("verify --draws 100 --samples 2000 --perturb-quantum 1e-6") == 1);
}

TEST_CASE("help and bad flags use parse-error exit codes") {
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("run --config") == 2);      // missing value
    CHECK(run_cli("frobnicate") == 2);        // unknown subcommand
    CHECK(run_cli("") == 2);                  // subcommand required
}
