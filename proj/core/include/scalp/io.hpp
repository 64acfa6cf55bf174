#pragma once

#include "scalp/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace scalp {

class IoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Grayscale samples at their stored bit depth.
struct GrayImage
{
    Grid<std::uint16_t> samples;
    int max_value = 255; ///< 255 or 65535
};

/// PNG (8/16-bit gray, RGB or RGBA with alpha dropped) or binary PPM (P6).
RgbImage read_rgb(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const RgbImage& image);
void write_png(const std::filesystem::path& path, const RgbImage& image);

/// PNG or binary PGM (P5), 8 or 16 bit.
GrayImage read_gray(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

/// Label map as 16-bit PGM; throws std::invalid_argument if a label exceeds 65535.
void write_label_pgm(const std::filesystem::path& path, const LabelMap& labels);
/// Label map from 8/16-bit PGM or PNG, or CSV (by extension).
LabelMap read_label_map(const std::filesystem::path& path);

/// Row-major CSV, one label per cell, rows separated by '\n'.
void write_label_csv(const std::filesystem::path& path, const LabelMap& labels);
LabelMap read_label_csv(const std::filesystem::path& path);

/// Real map in [0,1] written as 16-bit PGM, value = round(v * 65535).
void write_unit_map_pgm(const std::filesystem::path& path, const Grid<double>& map);

/// Input image with superpixel borders painted in `color`.
RgbImage boundary_overlay(const RgbImage& image, const LabelMap& labels, Rgb8 color = {255, 0, 0});

/// Raw little-endian voxels plus a JSON sidecar `<path>.json` holding
/// {"width","height","depth","channels","dtype"} with dtype one of uint8,
/// uint16, float32.
Volume read_volume(const std::filesystem::path& raw_path);
void write_volume(const std::filesystem::path& raw_path, const Volume& volume);

/// 3D labels as raw little-endian uint32 plus JSON sidecar (dtype "uint32").
void write_label_volume(const std::filesystem::path& raw_path, const LabelMap& labels);
LabelMap read_label_volume(const std::filesystem::path& raw_path);

} // namespace scalp
