#pragma once

#include "scalp/grid.hpp"

#include <array>
#include <cstdint>

namespace scalp {

/// sRGB (D65) 8-bit triple to CIELab.
std::array<double, 3> srgb_to_lab(Rgb8 rgb);

/// CIELab to sRGB, rounded and clamped to [0,255].
Rgb8 lab_to_srgb(const std::array<double, 3>& lab);

LabImage rgb_to_lab(const RgbImage& image);

/// Adds white Gaussian noise of the given variance (0..255 scale) to every
/// channel independently, then rounds and clamps. Same seed, same output.
RgbImage add_gaussian_noise(const RgbImage& image, double variance, std::uint64_t seed);

} // namespace scalp
