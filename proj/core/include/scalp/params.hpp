#pragma once

#include <cstddef>
#include <cstdint>

namespace scalp {

/// Memoization of color distances along linear paths within one
/// (iteration, cluster) scan.
enum class PathCache
{
    off,         ///< recompute every path pixel distance
    exact,       ///< memoize per-pixel color distances; identical results
    approximate, ///< reuse the stored path average when crossing a processed pixel
};

struct ScalpParams
{
    int k = 250;
    double m2_scale = 0.075; ///< m^2 = m2_scale * r^2
    double lambda = 0.5;
    double gamma = 50.0;
    int n = 3;
    double sigma = 40.0;
    int iterations = 5;
    std::uint64_t rng_seed = 0;
    PathCache path_cache = PathCache::off;
};

/// Throws std::invalid_argument when a parameter is out of range for an
/// input of `element_count` pixels or voxels.
void validate(const ScalpParams& params, std::size_t element_count);

} // namespace scalp
