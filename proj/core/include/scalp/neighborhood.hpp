#pragma once

#include "scalp/grid.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace scalp {

/// Per-pixel weighted neighborhood moments of the features: f1 is the
/// weighted mean and f2 the weighted mean of squares, per channel, over the
/// (2n+1)^d window truncated at the borders. Weights compare each neighbor to
/// the center pixel only, so the moments depend on the input image alone.
class MomentImages
{
public:
    MomentImages() = default;

    [[nodiscard]] const Extent& extent() const { return extent_; }
    [[nodiscard]] int channels() const { return channels_; }
    [[nodiscard]] int radius() const { return radius_; }
    [[nodiscard]] double sigma() const { return sigma_; }

    [[nodiscard]] std::span<const double> f1(std::size_t idx) const
    {
        return {f1_.data() + idx * static_cast<std::size_t>(channels_),
                static_cast<std::size_t>(channels_)};
    }

    [[nodiscard]] std::span<const double> f2(std::size_t idx) const
    {
        return {f2_.data() + idx * static_cast<std::size_t>(channels_),
                static_cast<std::size_t>(channels_)};
    }

    /// Neighborhood color distance between the element at `idx` and a
    /// cluster feature: sum over channels of f2 + F^2 - 2 F f1. Constant work
    /// regardless of the neighborhood radius.
    [[nodiscard]] double color_distance(std::size_t idx, std::span<const double> feature) const
    {
        const double* m1 = f1_.data() + idx * static_cast<std::size_t>(channels_);
        const double* m2 = f2_.data() + idx * static_cast<std::size_t>(channels_);
        double d = 0.0;
        for (int c = 0; c < channels_; ++c)
        {
            const double f = feature[static_cast<std::size_t>(c)];
            d += m2[c] + f * f - 2.0 * f * m1[c];
        }
        return d;
    }

    friend MomentImages precompute_moments(const FeatureImage& image, int n, double sigma);

private:
    Extent extent_{};
    int channels_ = 0;
    int radius_ = 0;
    double sigma_ = 1.0;
    std::vector<double> f1_;
    std::vector<double> f2_;
};

/// Throws std::invalid_argument if n < 0 or sigma <= 0.
MomentImages precompute_moments(const FeatureImage& image, int n, double sigma);

/// Free-function form of MomentImages::color_distance.
inline double color_distance_o1(const MomentImages& moments, std::size_t idx,
                                 std::span<const double> cluster_feature)
{
    return moments.color_distance(idx, cluster_feature);
}

} // namespace scalp
