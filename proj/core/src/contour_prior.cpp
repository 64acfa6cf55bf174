#include "scalp/contour_prior.hpp"

#include "scalp/clustering.hpp"
#include "scalp/io.hpp"

#include <algorithm>
#include <future>
#include <stdexcept>

namespace scalp {

Grid<unsigned char> boundary_mask(const LabelMap& labels)
{
    const Extent& e = labels.extent();
    Grid<unsigned char> mask(e, 0);
    for (int z = 0; z < e.depth; ++z)
    {
        for (int y = 0; y < e.height; ++y)
        {
            for (int x = 0; x < e.width; ++x)
            {
                const auto v = labels.at(x, y, z);
                const bool edge = (x > 0 && labels.at(x - 1, y, z) != v) ||
                                  (x + 1 < e.width && labels.at(x + 1, y, z) != v) ||
                                  (y > 0 && labels.at(x, y - 1, z) != v) ||
                                  (y + 1 < e.height && labels.at(x, y + 1, z) != v) ||
                                  (z > 0 && labels.at(x, y, z - 1) != v) ||
                                  (z + 1 < e.depth && labels.at(x, y, z + 1) != v);
                mask.at(x, y, z) = edge ? 1 : 0;
            }
        }
    }
    return mask;
}

ContourMap load_contour_map(const std::filesystem::path& path, const Extent* expected)
{
    const GrayImage g = read_gray(path);
    if (expected != nullptr && !(g.samples.extent() == *expected))
    {
        throw std::invalid_argument(path.string() + ": contour map size does not match the image");
    }
    ContourMap map(g.samples.extent());
    const double scale = 1.0 / g.max_value;
    for (std::size_t i = 0; i < map.size(); ++i)
    {
        map[i] = std::min(1.0, g.samples[i] * scale);
    }
    return map;
}

std::vector<int> default_prior_scales()
{
    return {25, 50, 100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
}

ContourMap multiscale_boundary_prior(const FeatureImage& image, const std::vector<int>& scales,
                                     const ScalpParams& params, double threshold, unsigned threads)
{
    if (scales.empty())
    {
        throw std::invalid_argument("multiscale_boundary_prior: no scales given");
    }
    if (!(threshold >= 0.0 && threshold <= 1.0))
    {
        throw std::invalid_argument("multiscale_boundary_prior: threshold must lie in [0,1]");
    }

    auto boundaries_at = [&](int k) {
        ScalpParams p = params;
        p.k = k;
        p.gamma = 0.0;
        return boundary_mask(run_scalp(image, p, nullptr));
    };

    std::vector<Grid<unsigned char>> masks(scales.size());
    const std::size_t workers = std::max(1u, threads);
    for (std::size_t first = 0; first < scales.size(); first += workers)
    {
        const std::size_t last = std::min(scales.size(), first + workers);
        std::vector<std::future<Grid<unsigned char>>> pending;
        for (std::size_t s = first; s < last; ++s)
        {
            pending.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred,
                                         boundaries_at, scales[s]));
        }
        for (std::size_t s = first; s < last; ++s)
        {
            masks[s] = pending[s - first].get();
        }
    }

    ContourMap average(image.extent(), 0.0);
    for (const auto& mask : masks)
    {
        for (std::size_t i = 0; i < average.size(); ++i)
        {
            average[i] += mask[i];
        }
    }
    const double inv = 1.0 / static_cast<double>(scales.size());
    for (double& v : average)
    {
        v *= inv;
        if (v < threshold)
        {
            v = 0.0;
        }
    }
    return average;
}

} // namespace scalp
