#include "spinboson/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spinboson/config_file.hpp"

namespace spinboson {

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    return out;
}

const ObservableSeries* find_series(const EnsembleSummary& summary, const std::string& name) {
    for (const ObservableSeries& s : summary.series)
        if (s.name == name) return &s;
    return nullptr;
}

void emit_group(std::ostream& out, const ObservableSeries& s, size_t t) {
    out << "," << format_full(s.mean[t].real()) << "," << format_full(s.mean[t].imag())
        << "," << format_full(s.std_error[t]) << "," << s.n_samples[t];
}

} // namespace

void write_site_csv(const std::string& path, const EnsembleSummary& summary, int site) {
    const std::string tag = std::to_string(site);
    const std::vector<std::string> names = {
        "photon_number_" + tag, "spin_z_" + tag, "spin_x_" + tag,
        "spin_y_" + tag,        "alpha_" + tag,  "beta_" + tag,
    };
    std::ofstream out = open_out(path);
    out << "time";
    for (const std::string& n : names)
        out << "," << n << "_re_mean," << n << "_im_mean," << n << "_std_error," << n
            << "_n_samples";
    out << ",homodyne_h,homodyne_im_i,homodyne_im_q\n";
    for (size_t t = 0; t < summary.times.size(); ++t) {
        out << format_full(summary.times[t]);
        for (const std::string& n : names) emit_group(out, summary.series_for(n), t);
        const HomodyneSignal h = summary.homodyne_at(site, t);
        out << "," << format_full(h.h) << "," << format_full(h.im_i) << ","
            << format_full(h.im_q) << "\n";
    }
}

void write_current_csv(const std::string& path, const EnsembleSummary& summary) {
    std::vector<const ObservableSeries*> cols;
    for (const ObservableSeries& s : summary.series)
        if (s.name.rfind("current_", 0) == 0) cols.push_back(&s);
    if (const ObservableSeries* mon = find_series(summary, "monitor")) cols.push_back(mon);

    std::ofstream out = open_out(path);
    out << "time";
    for (const ObservableSeries* s : cols)
        out << "," << s->name << "_re_mean," << s->name << "_im_mean," << s->name
            << "_std_error," << s->name << "_n_samples";
    out << "\n";
    for (size_t t = 0; t < summary.times.size(); ++t) {
        out << format_full(summary.times[t]);
        for (const ObservableSeries* s : cols) emit_group(out, *s, t);
        out << "\n";
    }
}

void write_histogram_csv(const std::string& path, const Histogram& histogram) {
    std::ofstream out = open_out(path);
    out << "bin_left,bin_right,probability\n";
    for (size_t b = 0; b < histogram.probability.size(); ++b)
        out << format_full(histogram.bin_left[b]) << "," << format_full(histogram.bin_right[b])
            << "," << format_full(histogram.probability[b]) << "\n";
}

void write_scan_csv(const std::string& path, const ScanResult& result) {
    std::ofstream out = open_out(path);
    out << result.parameter << "," << result.current_name << "_re_mean,"
        << result.current_name << "_im_mean," << result.current_name
        << "_std_error,n_window_trajectories,n_broken,n_diverged\n";
    for (const ScanPoint& p : result.points) {
        out << format_full(p.value) << "," << format_full(p.current.mean.real()) << ","
            << format_full(p.current.mean.imag()) << "," << format_full(p.current.std_error)
            << "," << p.current.n_trajectories << "," << p.n_broken << "," << p.n_diverged
            << "\n";
    }
}

void write_scan_series_csv(const std::string& path, const ScanResult& result) {
    std::ofstream out = open_out(path);
    out << result.parameter << ",time," << result.current_name << "_re_mean,"
        << result.current_name << "_im_mean," << result.current_name << "_std_error\n";
    for (const ScanPoint& p : result.points)
        for (size_t t = 0; t < result.times.size() && t < p.current_mean.size(); ++t)
            out << format_full(p.value) << "," << format_full(result.times[t]) << ","
                << format_full(p.current_mean[t].real()) << ","
                << format_full(p.current_mean[t].imag()) << ","
                << format_full(p.current_std_error[t]) << "\n";
}

void write_summary_json(const std::string& path, const NetworkSpec& spec,
                        const SimulationConfig& config, const EnsembleSummary& summary) {
    nlohmann::ordered_json j;
    j["config"] = render_config(spec, config);
    j["n_sites"] = spec.n_sites();
    j["n_trajectories"] = summary.n_trajectories;
    j["n_recorded_times"] = summary.times.size();
    j["t_first"] = summary.times.empty() ? 0.0 : summary.times.front();
    j["t_last"] = summary.times.empty() ? 0.0 : summary.times.back();
    j["dt"] = effective_dt(config, spec);
    j["spike_policy"] = to_string(config.spike_policy);
    j["n_broken"] = summary.n_broken;
    j["n_diverged"] = summary.n_diverged;
    j["clamp_events"] = summary.clamp_events;
    j["breakdown_times"] = summary.breakdown_times;
    if (!summary.window.empty()) {
        nlohmann::ordered_json w;
        for (const auto& [name, stats] : summary.window) {
            w[name] = {{"re_mean", stats.mean.real()},
                       {"im_mean", stats.mean.imag()},
                       {"std_error", stats.std_error},
                       {"std_error_im", stats.std_error_im},
                       {"n_trajectories", stats.n_trajectories}};
        }
        j["window"] = w;
    }
    std::ofstream out = open_out(path);
    out << j.dump(2) << "\n";
}

size_t CsvTable::column(const std::string& name) const {
    for (size_t c = 0; c < header.size(); ++c)
        if (header[c] == name) return c;
    throw IoError("no CSV column named " + name);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty CSV " + path);
    std::istringstream head(line);
    std::string cell;
    while (std::getline(head, cell, ',')) table.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream cells(line);
        while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != table.header.size())
            throw IoError("ragged CSV row in " + path);
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace spinboson
