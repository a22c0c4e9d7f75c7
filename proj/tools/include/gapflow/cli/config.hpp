#pragma once

// Run configuration of the gapflow tool, read from TOML:
//
//   scattering_data = "data.json"   # optional input for reconstruct
//   [background.left]   a, b
//   [background.right]  a, b
//   [[perturbation]]    n, a?, b?
//   [grids]             samples_per_band, edge_margin, chebyshev, scan_points,
//                       points, complex_points, poles, threads
//   [tolerances]        rel_tol, abs_tol, eigen_tol, verify, identities
//   [reconstruction]    delta_variant, select_arg_branch,
//                       transmission_at_infinity, path_height_scale

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gapflow/reconstruct.hpp"
#include "gapflow/scatter.hpp"

namespace gapflow::cli {

enum class Mode { kOracle, kReconstruct, kVerify, kPeriods, kBlaschke, kTranslate };

std::optional<Mode> parse_mode(std::string_view name);
std::string_view mode_name(Mode mode);

/// Bad configuration text or values. what() starts with "<source>:<line>:"
/// when the position is known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Mode mode = Mode::kOracle;
  Background left;
  Background right;
  std::vector<PerturbationEntry> perturbation;

  ScatteringGrids grids;
  std::vector<cplx> points;  // evaluation points; empty means a default grid
  std::vector<double> poles;  // Blaschke poles for the blaschke mode
  unsigned threads = 0;

  ReconstructionOptions reconstruction;
  // Set when the config fixes T_+ at infinity; otherwise it is taken from
  // the perturbation table.
  std::optional<cplx> transmission_at_infinity;

  double verify_tol = 1e-3;      // relative error of reconstructed T_+
  double identity_tol = 1e-8;    // scattering identities

  std::filesystem::path scattering_data;  // relative paths resolve against base_dir
  std::filesystem::path base_dir;
  std::filesystem::path out_dir = ".";

  SteplikeOperator make_operator() const;
  /// The configured points, or points off sigma when none are given.
  std::vector<cplx> evaluation_points() const;
  /// Throws ConfigError when a field required by `mode` is missing.
  void validate() const;
};

/// Parses TOML text. `source` names the text in diagnostics.
RunConfig parse_config(std::string_view text, std::string_view source = "config");
RunConfig load_config(const std::filesystem::path& path);

}  // namespace gapflow::cli
