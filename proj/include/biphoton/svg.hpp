#pragma once

#include <filesystem>
#include <string>

#include "biphoton/phasematch.hpp"

namespace biphoton {

// Render a pump/signal spectral-density map as a self-contained SVG heatmap
// (no external assets). Cell colors follow a perceptual dark-to-bright ramp
// normalized to the peak density; axes carry wavelength tick labels in nm.
void spectral_map_to_svg(const SpectralDensityMap& map, const std::filesystem::path& path,
                         const std::string& title = "");

}  // namespace biphoton
