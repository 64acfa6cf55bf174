#pragma once

#include "scalp/grid.hpp"
#include "scalp/params.hpp"

#include <filesystem>
#include <vector>

namespace scalp {

/// Pixels with at least one 4-neighbor (6-neighbor in volumes) carrying a
/// different label.
Grid<unsigned char> boundary_mask(const LabelMap& labels);

/// Reads an 8- or 16-bit grayscale PGM/PNG and normalizes it to [0,1].
/// Throws IoError if unreadable, std::invalid_argument if `expected` is given
/// and the dimensions differ.
ContourMap load_contour_map(const std::filesystem::path& path, const Extent* expected = nullptr);

/// Default scale set spanning 25 to 1000 superpixels.
std::vector<int> default_prior_scales();

/// Averages the boundary masks of decompositions (gamma = 0, no prior) at
/// each K in `scales`, then zeroes values below `threshold`. Scales run on
/// up to `threads` worker threads; the result does not depend on it.
ContourMap multiscale_boundary_prior(const FeatureImage& image, const std::vector<int>& scales,
                                     const ScalpParams& params, double threshold,
                                     unsigned threads = 1);

} // namespace scalp
