#pragma once

// Command layer: runs one configured command and writes its output files.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "synccool/config.hpp"

namespace synccool {

/// Version string recorded in every metadata file.
std::string tool_version();

/// Worker count from SYNCCOOL_THREADS, else the hardware concurrency.
unsigned default_threads();

struct RunOptions {
  std::filesystem::path out_dir = ".";
  unsigned threads = 1;
};

struct RunReport {
  /// Contents of metadata.json.
  nlohmann::json metadata;
  /// File names relative to the output directory.
  std::vector<std::string> outputs;
};

/// Runs the configured command. Throws InvalidParameter, NumericalBlowup,
/// PsdViolation or ConsistencyError; nothing is written on a config error.
RunReport run_command(const RunConfig& config, const RunOptions& options);

/// Spectrum of one channel of an existing timeseries.csv.
RunReport run_spectrum(const std::filesystem::path& series_file, const SpectrumOptions& spectrum,
                       const RunOptions& options);

/// Fraction of energies inside the band |E - e0| <= half_width, and the
/// largest fraction inside any of the equal-width bands stacked below it
/// down to the lowest energy.
struct BandMasses {
  double center = 0.0;
  double lower_max = 0.0;
};
BandMasses separatrix_band_masses(std::span<const double> energies, double e0, double half_width);

/// Machine-readable error report written to stderr and error.json.
nlohmann::json error_report(const std::string& kind, const std::string& message);

}  // namespace synccool
