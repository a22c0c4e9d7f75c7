#pragma once

#include <iosfwd>

#include "gapflow/cli/config.hpp"

namespace gapflow::cli {

/// Runs one mode and writes its artifacts into config.out_dir:
///   oracle       scattering_data.json
///   reconstruct  transmission.csv (from config.scattering_data, or the
///                JSON in out_dir)
///   verify       scattering_data.json, transmission.csv, report.txt
///   periods      periods.csv
///   blaschke     blaschke.csv
///   translate    scattering_data.json, translated.csv
/// Progress and per-point failures go to `log`. Returns 0, or 1 when the
/// run could not produce its artifacts.
int run(const RunConfig& config, std::ostream& log);

}  // namespace gapflow::cli
