#include "spinboson/config_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "spinboson/csv.hpp"

namespace spinboson {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& value, const std::string& where) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad number '" + value + "' for " + where);
    }
}

long parse_long(const std::string& value, const std::string& where) {
    try {
        size_t pos = 0;
        long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad integer '" + value + "' for " + where);
    }
}

unsigned long long parse_u64(const std::string& value, const std::string& where) {
    try {
        size_t pos = 0;
        unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad seed '" + value + "' for " + where);
    }
}

} // namespace

ParsedConfig parse_config_text(const std::string& text) {
    ParsedConfig out;
    int n_sites = -1;
    std::set<std::string> seen_keys;
    std::set<int> seen_sites;
    std::string section;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (size_t hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::string line = trim(raw);
        if (line.empty()) continue;
        const std::string at = "line " + std::to_string(line_no);

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section at " + at);
            section = trim(line.substr(1, line.size() - 2));
            if (section != "network" && section != "hopping" && section != "simulation" &&
                section.rfind("site.", 0) != 0)
                throw ConfigError("unknown section [" + section + "] at " + at);
            if (section.rfind("site.", 0) == 0) {
                const int idx =
                    static_cast<int>(parse_long(section.substr(5), "section " + section));
                if (!seen_sites.insert(idx).second)
                    throw ConfigError("duplicate section [" + section + "]");
            }
            continue;
        }

        const size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value at " + at);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ConfigError("empty key or value at " + at);
        if (section.empty()) throw ConfigError("key outside any section at " + at);
        if (!seen_keys.insert(section + "/" + key).second)
            throw ConfigError("duplicate key '" + key + "' in [" + section + "]");

        if (section == "network") {
            if (key == "n_sites") {
                n_sites = static_cast<int>(parse_long(value, key));
                if (n_sites < 1) throw ConfigError("n_sites must be >= 1");
                out.network.sites.resize(static_cast<size_t>(n_sites));
            } else {
                throw ConfigError("unknown key '" + key + "' in [network]");
            }
        } else if (section.rfind("site.", 0) == 0) {
            const int idx = static_cast<int>(parse_long(section.substr(5), section));
            if (n_sites < 0) throw ConfigError("[network] must precede " + section);
            if (idx < 0 || idx >= n_sites)
                throw ConfigError("section [" + section + "] outside 0.." +
                                  std::to_string(n_sites - 1));
            SiteParams& p = out.network.sites[static_cast<size_t>(idx)];
            if (key == "omega_c") p.omega_c = parse_double(value, key);
            else if (key == "omega_s") p.omega_s = parse_double(value, key);
            else if (key == "g") p.g = parse_double(value, key);
            else if (key == "kappa") p.kappa = parse_double(value, key);
            else if (key == "gamma") p.gamma = parse_double(value, key);
            else if (key == "nbar") p.nbar = parse_double(value, key);
            else if (key == "drive_amplitude") p.drive_amplitude = parse_double(value, key);
            else if (key == "drive_ramp_time") p.drive_ramp_time = parse_double(value, key);
            else if (key == "spin_s") {
                if (value == "inf" || value == "infinite") p.spin = Spin::inf();
                else p.spin = Spin::finite(parse_double(value, key));
            } else {
                throw ConfigError("unknown key '" + key + "' in [" + section + "]");
            }
        } else if (section == "hopping") {
            if (n_sites < 0) throw ConfigError("[network] must precede [hopping]");
            std::istringstream pair(key);
            int i = -1, j = -1;
            if (!(pair >> i >> j) || !(pair >> std::ws).eof())
                throw ConfigError("hopping key must be two site indices, got '" + key + "'");
            if (i < 0 || j < 0 || i >= n_sites || j >= n_sites || i == j)
                throw ConfigError("hopping pair " + key + " out of range");
            out.network.set_hopping(i, j, parse_double(value, "hopping " + key));
        } else if (section == "simulation") {
            SimulationConfig& c = out.simulation;
            if (key == "dt") {
                c.dt = parse_double(value, key);
                if (!(c.dt > 0.0)) throw ConfigError("dt must be positive");
            } else if (key == "t_final") c.t_final = parse_double(value, key);
            else if (key == "n_trajectories") c.n_trajectories = parse_long(value, key);
            else if (key == "master_seed") c.master_seed = parse_u64(value, key);
            else if (key == "regularization_epsilon")
                c.regularization_epsilon = parse_double(value, key);
            else if (key == "breakdown_threshold")
                c.breakdown_threshold = parse_double(value, key);
            else if (key == "divergence_radius") c.divergence_radius = parse_double(value, key);
            else if (key == "initial_spin_offset") {
                std::istringstream two(value);
                if (!(two >> c.initial_spin_offset_re >> c.initial_spin_offset_im) ||
                    !(two >> std::ws).eof())
                    throw ConfigError("initial_spin_offset wants two reals, got '" + value +
                                      "'");
            } else if (key == "spike_policy") {
                auto p = spike_policy_from_string(value);
                if (!p) throw ConfigError("unknown spike_policy '" + value + "'");
                c.spike_policy = *p;
            } else {
                throw ConfigError("unknown key '" + key + "' in [simulation]");
            }
        }
    }

    if (n_sites < 0) throw ConfigError("missing [network] section with n_sites");
    for (int i = 0; i < n_sites; ++i)
        if (!seen_sites.count(i))
            throw ConfigError("missing section [site." + std::to_string(i) + "]");
    if (ValidationReport rep = validate(out.network); !rep.ok())
        throw ConfigError(rep.joined());
    if (ValidationReport rep = validate(out.simulation, out.network); !rep.ok())
        throw ConfigError(rep.joined());
    return out;
}

ParsedConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string render_config(const NetworkSpec& spec, const SimulationConfig& config) {
    std::ostringstream out;
    out << "[network]\n";
    out << "n_sites = " << spec.n_sites() << "\n";
    for (int i = 0; i < spec.n_sites(); ++i) {
        const SiteParams& p = spec.sites[static_cast<size_t>(i)];
        out << "\n[site." << i << "]\n";
        out << "omega_c = " << format_full(p.omega_c) << "\n";
        out << "omega_s = " << format_full(p.omega_s) << "\n";
        out << "g = " << format_full(p.g) << "\n";
        out << "kappa = " << format_full(p.kappa) << "\n";
        out << "gamma = " << format_full(p.gamma) << "\n";
        out << "nbar = " << format_full(p.nbar) << "\n";
        if (p.spin.infinite) out << "spin_s = inf\n";
        else out << "spin_s = " << format_full(p.spin.s) << "\n";
        out << "drive_amplitude = " << format_full(p.drive_amplitude) << "\n";
        out << "drive_ramp_time = " << format_full(p.drive_ramp_time) << "\n";
    }
    if (!spec.hopping.empty()) {
        out << "\n[hopping]\n";
        for (const auto& [key, J] : spec.hopping)
            out << key.first << " " << key.second << " = " << format_full(J) << "\n";
    }
    out << "\n[simulation]\n";
    if (config.dt > 0.0) out << "dt = " << format_full(config.dt) << "\n";
    out << "t_final = " << format_full(config.t_final) << "\n";
    out << "n_trajectories = " << config.n_trajectories << "\n";
    out << "master_seed = " << config.master_seed << "\n";
    out << "regularization_epsilon = " << format_full(config.regularization_epsilon) << "\n";
    out << "initial_spin_offset = " << format_full(config.initial_spin_offset_re) << " "
        << format_full(config.initial_spin_offset_im) << "\n";
    out << "breakdown_threshold = " << format_full(config.breakdown_threshold) << "\n";
    out << "divergence_radius = " << format_full(config.divergence_radius) << "\n";
    out << "spike_policy = " << to_string(config.spike_policy) << "\n";
    return out.str();
}

} // namespace spinboson
