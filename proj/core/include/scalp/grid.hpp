#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace scalp {

/// Dimensions of a pixel (depth == 1) or voxel grid. Elements are stored
/// x-fastest, then y, then z.
struct Extent
{
    int width = 0;
    int height = 0;
    int depth = 1;

    [[nodiscard]] std::size_t size() const
    {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
               static_cast<std::size_t>(depth);
    }

    [[nodiscard]] bool is_volume() const { return depth > 1; }

    [[nodiscard]] bool contains(int x, int y, int z = 0) const
    {
        return x >= 0 && y >= 0 && z >= 0 && x < width && y < height && z < depth;
    }

    [[nodiscard]] std::size_t index(int x, int y, int z = 0) const
    {
        return (static_cast<std::size_t>(z) * static_cast<std::size_t>(height) +
                static_cast<std::size_t>(y)) *
                   static_cast<std::size_t>(width) +
               static_cast<std::size_t>(x);
    }

    friend bool operator==(const Extent&, const Extent&) = default;
};

inline void require_valid(const Extent& e)
{
    if (e.width < 1 || e.height < 1 || e.depth < 1)
    {
        throw std::invalid_argument("grid dimensions must be >= 1");
    }
}

/// Integer grid coordinate. z is 0 for images.
struct Point
{
    int x = 0;
    int y = 0;
    int z = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline Point point_of(const Extent& e, std::size_t idx)
{
    const auto plane = static_cast<std::size_t>(e.width) * static_cast<std::size_t>(e.height);
    const auto z = idx / plane;
    const auto rem = idx % plane;
    return {static_cast<int>(rem % static_cast<std::size_t>(e.width)),
            static_cast<int>(rem / static_cast<std::size_t>(e.width)), static_cast<int>(z)};
}

/// Dense row-major grid of values.
template <typename T>
class Grid
{
public:
    Grid() = default;

    explicit Grid(Extent extent, T fill = T{})
        : extent_(extent)
        , data_(extent.size(), fill)
    {
        require_valid(extent_);
    }

    Grid(int width, int height, T fill = T{})
        : Grid(Extent{width, height, 1}, fill)
    {
    }

    [[nodiscard]] const Extent& extent() const { return extent_; }
    [[nodiscard]] int width() const { return extent_.width; }
    [[nodiscard]] int height() const { return extent_.height; }
    [[nodiscard]] int depth() const { return extent_.depth; }
    [[nodiscard]] std::size_t size() const { return data_.size(); }
    [[nodiscard]] bool empty() const { return data_.empty(); }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    T& at(int x, int y, int z = 0) { return data_[extent_.index(x, y, z)]; }
    const T& at(int x, int y, int z = 0) const { return data_[extent_.index(x, y, z)]; }

    [[nodiscard]] std::span<T> values() { return data_; }
    [[nodiscard]] std::span<const T> values() const { return data_; }

    auto begin() { return data_.begin(); }
    auto end() { return data_.end(); }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    Extent extent_{};
    std::vector<T> data_;
};

struct Rgb8
{
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb8&, const Rgb8&) = default;
};

using RgbImage = Grid<Rgb8>;

/// Per-pixel contour confidence in [0,1].
using ContourMap = Grid<double>;

/// Superpixel (or supervoxel) label per element.
using LabelMap = Grid<std::int32_t>;

/// Multi-channel real-valued feature grid (CIELab for images, intensity or
/// color for volumes). Channels are interleaved per element.
class FeatureImage
{
public:
    FeatureImage() = default;

    FeatureImage(Extent extent, int channels)
        : extent_(extent)
        , channels_(channels)
        , data_(extent.size() * static_cast<std::size_t>(channels), 0.0)
    {
        require_valid(extent_);
        if (channels < 1)
        {
            throw std::invalid_argument("feature image needs at least one channel");
        }
    }

    [[nodiscard]] const Extent& extent() const { return extent_; }
    [[nodiscard]] int channels() const { return channels_; }
    [[nodiscard]] std::size_t pixel_count() const { return extent_.size(); }

    [[nodiscard]] std::span<double> pixel(std::size_t idx)
    {
        return {data_.data() + idx * static_cast<std::size_t>(channels_),
                static_cast<std::size_t>(channels_)};
    }

    [[nodiscard]] std::span<const double> pixel(std::size_t idx) const
    {
        return {data_.data() + idx * static_cast<std::size_t>(channels_),
                static_cast<std::size_t>(channels_)};
    }

    [[nodiscard]] std::span<const double> values() const { return data_; }
    [[nodiscard]] std::span<double> values() { return data_; }

    friend bool operator==(const FeatureImage&, const FeatureImage&) = default;

private:
    Extent extent_{};
    int channels_ = 0;
    std::vector<double> data_;
};

/// A FeatureImage whose three channels hold (L, a, b).
using LabImage = FeatureImage;

/// A 3D FeatureImage (depth >= 1), one or three channels.
using Volume = FeatureImage;

inline void require_same_extent(const Extent& a, const Extent& b, const char* what)
{
    if (!(a == b))
    {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    }
}

} // namespace scalp
