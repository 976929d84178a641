#pragma once

// Output serialization. Tables are CSV: one "# units: ..." comment line, one
// header line, then rows with every number printed as %.17g so values
// round-trip exactly.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "synccool/observables.hpp"
#include "synccool/semiclassical.hpp"

namespace synccool {

/// Shortest text that reads back to the same double ("%.17g"); nan/inf spelled out.
std::string format_double(double v);

/// Unit label of a known column name, "1" for dimensionless, "" if unknown.
std::string column_unit(const std::string& name);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
};

void write_csv(const std::filesystem::path& path, const Table& table);
/// Reads a file produced by write_csv; the comment line is skipped.
Table read_csv(const std::filesystem::path& path);

void write_timeseries_csv(const std::filesystem::path& path, const TimeSeries& series);
/// Inverse of write_timeseries_csv; the first column is time.
TimeSeries read_timeseries_csv(const std::filesystem::path& path);

/// One row per atom per snapshot: t, trajectory, atom, x, p.
void write_snapshots_csv(const std::filesystem::path& path, const std::vector<Snapshot>& snaps,
                         int n_atoms);

void write_histogram1d_csv(const std::filesystem::path& path, const Histogram1D& h,
                           const std::string& variable);
/// Dense text matrix: comment lines carrying the bin edges, then one row per
/// x bin with one column per p bin.
void write_histogram2d(const std::filesystem::path& path, const Histogram2D& h);

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s);
void write_peaks_csv(const std::filesystem::path& path, const std::vector<Peak>& peaks);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace synccool
