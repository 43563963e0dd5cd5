#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "pcactl/pulse.hpp"

namespace pcactl {

/// Shortest round-trip decimal form, '.' separator regardless of locale.
std::string format_number(double value);
/// Empty string for a missing value.
std::string format_number(const std::optional<double>& value);

/// First row: "omega_THz/t_fs" then the t axis; then one row per omega.
void write_wigner_csv(const WignerMap& map, std::ostream& out);
/// Non-negative frequencies only: freq_THz,re,im,magnitude,phase.
void write_intensity_spectrum_csv(const IntensitySpectrum& spectrum, std::ostream& out);

/// Opens `path` for writing (binary, so line endings stay LF) or throws StoreError.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace pcactl
