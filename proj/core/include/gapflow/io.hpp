#pragma once

// ScatteringData as JSON and transmission results as CSV.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "gapflow/reconstruct.hpp"
#include "gapflow/scatter.hpp"

namespace gapflow {

/// %.17g; enough digits for a bit-identical round trip.
std::string format_double(double x);

std::string to_json(const ScatteringData& data);
ScatteringData scattering_data_from_json(const std::string& text);

void write_scattering_data(const std::filesystem::path& path, const ScatteringData& data);
ScatteringData read_scattering_data(const std::filesystem::path& path);

/// re_z, im_z, re_T, im_T, abs_T, arg_T, err_est; failed points are written
/// as nan.
void write_transmission_csv(std::ostream& os, std::span<const GridPoint> points);
void write_transmission_csv(const std::filesystem::path& path, std::span<const GridPoint> points);

}  // namespace gapflow
