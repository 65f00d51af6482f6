#pragma once

#include <string>
#include <vector>

#include "ensemble.hpp"

namespace spinboson {

// 17 significant digits; round-trips every finite double exactly.
std::string format_full(double v);

// Per-site observable series: time plus re_mean / im_mean / std_error /
// n_samples column groups for each observable of the site, then the
// homodyne signal columns.
void write_site_csv(const std::string& path, const EnsembleSummary& summary, int site);

// Bond currents and the excitation monitor on the same grid.
void write_current_csv(const std::string& path, const EnsembleSummary& summary);

// bin_left, bin_right, probability rows.
void write_histogram_csv(const std::string& path, const Histogram& histogram);

// value plus window-averaged current statistics per scan point.
void write_scan_csv(const std::string& path, const ScanResult& result);

// Long-format current time series, one block of rows per scan value.
void write_scan_series_csv(const std::string& path, const ScanResult& result);

// Deterministic run metadata: configuration echo, grid, spike statistics,
// window averages. Wall-clock time is deliberately left out so reruns are
// byte-identical.
void write_summary_json(const std::string& path, const NetworkSpec& spec,
                        const SimulationConfig& config, const EnsembleSummary& summary);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

} // namespace spinboson
