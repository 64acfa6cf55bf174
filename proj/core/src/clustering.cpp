#include "scalp/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace scalp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Block boundaries of `count` near-equal blocks over `length` elements.
int block_start(int i, int count, int length)
{
    return static_cast<int>((static_cast<long long>(i) * length) / count);
}

int block_of(int coord, int count, int length)
{
    // Largest i with block_start(i) <= coord.
    int i = static_cast<int>((static_cast<long long>(coord) * count) / length);
    while (i + 1 < count && block_start(i + 1, count, length) <= coord)
    {
        ++i;
    }
    while (i > 0 && block_start(i, count, length) > coord)
    {
        --i;
    }
    return i;
}

double contour_at(const ContourMap& contour, const Point& q)
{
    return contour.at(q.x, q.y, q.z);
}

} // namespace

double grid_step(const Extent& extent, int k)
{
    const double ratio = static_cast<double>(extent.size()) / static_cast<double>(k);
    return extent.is_volume() ? std::cbrt(ratio) : std::sqrt(ratio);
}

DecompositionState init_grid(const Extent& extent, int k)
{
    require_valid(extent);
    if (k < 1 || static_cast<std::size_t>(k) > extent.size())
    {
        throw std::invalid_argument("init_grid: K out of range");
    }

    const double r = grid_step(extent, k);
    auto clamp_count = [](double v, int hi) {
        return std::clamp(static_cast<int>(std::lround(v)), 1, hi);
    };

    int nx = 1;
    int ny = 1;
    int nz = 1;
    if (extent.is_volume())
    {
        nx = clamp_count(extent.width / r, extent.width);
        ny = clamp_count(extent.height / r, extent.height);
        nz = clamp_count(static_cast<double>(k) / (nx * ny), extent.depth);
    }
    else
    {
        nx = clamp_count(extent.width / r, extent.width);
        ny = clamp_count(static_cast<double>(k) / nx, extent.height);
    }

    DecompositionState state;
    state.step = r;
    state.labels = LabelMap(extent);
    state.best_distance.assign(extent.size(), kInf);
    state.clusters.resize(static_cast<std::size_t>(nx) * ny * nz);

    for (int bz = 0; bz < nz; ++bz)
    {
        const int z0 = block_start(bz, nz, extent.depth);
        const int z1 = block_start(bz + 1, nz, extent.depth);
        for (int by = 0; by < ny; ++by)
        {
            const int y0 = block_start(by, ny, extent.height);
            const int y1 = block_start(by + 1, ny, extent.height);
            for (int bx = 0; bx < nx; ++bx)
            {
                const int x0 = block_start(bx, nx, extent.width);
                const int x1 = block_start(bx + 1, nx, extent.width);
                auto& c = state.clusters[(static_cast<std::size_t>(bz) * ny + by) * nx + bx];
                c.barycenter = {(x0 + x1 - 1) / 2.0, (y0 + y1 - 1) / 2.0, (z0 + z1 - 1) / 2.0};
                c.population = static_cast<std::size_t>(x1 - x0) * (y1 - y0) * (z1 - z0);
            }
        }
    }

    for (int z = 0; z < extent.depth; ++z)
    {
        const int bz = block_of(z, nz, extent.depth);
        for (int y = 0; y < extent.height; ++y)
        {
            const int by = block_of(y, ny, extent.height);
            for (int x = 0; x < extent.width; ++x)
            {
                const int bx = block_of(x, nx, extent.width);
                state.labels.at(x, y, z) = (bz * ny + by) * nx + bx;
            }
        }
    }
    return state;
}

DecompositionState init_grid(int width, int height, int k)
{
    return init_grid(Extent{width, height, 1}, k);
}

DecompositionState init_from_labels(const LabelMap& labels, const FeatureImage& image,
                                    const LabelMap* regions)
{
    require_same_extent(labels.extent(), image.extent(), "init_from_labels");
    if (regions != nullptr)
    {
        require_same_extent(labels.extent(), regions->extent(), "init_from_labels");
    }
    const auto max_it = std::max_element(labels.begin(), labels.end());
    const int count = *max_it + 1;

    DecompositionState state;
    state.labels = labels;
    state.best_distance.assign(labels.size(), kInf);
    state.clusters.resize(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < labels.size(); ++i)
    {
        if (labels[i] < 0)
        {
            throw std::invalid_argument("init_from_labels: negative label");
        }
        if (regions != nullptr)
        {
            state.clusters[static_cast<std::size_t>(labels[i])].region = (*regions)[i];
        }
    }
    update_clusters(state, image);
    state.step = grid_step(labels.extent(), static_cast<int>(state.clusters.size()));
    return state;
}

void update_clusters(DecompositionState& state, const FeatureImage& image)
{
    const Extent& e = state.labels.extent();
    require_same_extent(e, image.extent(), "update_clusters");
    const auto nc = static_cast<std::size_t>(image.channels());
    const std::size_t count = state.clusters.size();

    std::vector<double> feature_sum(count * nc, 0.0);
    std::vector<std::array<double, 3>> position_sum(count, {0.0, 0.0, 0.0});
    std::vector<std::size_t> population(count, 0);

    for (int z = 0; z < e.depth; ++z)
    {
        for (int y = 0; y < e.height; ++y)
        {
            for (int x = 0; x < e.width; ++x)
            {
                const std::size_t idx = e.index(x, y, z);
                const auto k = static_cast<std::size_t>(state.labels[idx]);
                const auto f = image.pixel(idx);
                for (std::size_t c = 0; c < nc; ++c)
                {
                    feature_sum[k * nc + c] += f[c];
                }
                position_sum[k][0] += x;
                position_sum[k][1] += y;
                position_sum[k][2] += z;
                ++population[k];
            }
        }
    }

    std::vector<std::int32_t> remap(count, -1);
    std::vector<ClusterState> kept;
    kept.reserve(count);
    for (std::size_t k = 0; k < count; ++k)
    {
        if (population[k] == 0)
        {
            continue;
        }
        ClusterState c;
        c.region = state.clusters[k].region;
        c.population = population[k];
        const auto inv = 1.0 / static_cast<double>(population[k]);
        c.mean_feature.resize(nc);
        for (std::size_t ch = 0; ch < nc; ++ch)
        {
            c.mean_feature[ch] = feature_sum[k * nc + ch] * inv;
        }
        c.barycenter = {position_sum[k][0] * inv, position_sum[k][1] * inv, position_sum[k][2] * inv};
        remap[k] = static_cast<std::int32_t>(kept.size());
        kept.push_back(std::move(c));
    }

    if (kept.size() != count)
    {
        for (auto& label : state.labels)
        {
            label = remap[static_cast<std::size_t>(label)];
        }
    }
    state.clusters = std::move(kept);
}

Point nearest_pixel(const std::array<double, 3>& position, const Extent& extent)
{
    auto round_clamp = [](double v, int hi) {
        return static_cast<int>(std::clamp(std::lround(v), 0L, static_cast<long>(hi - 1)));
    };
    return {round_clamp(position[0], extent.width), round_clamp(position[1], extent.height),
            round_clamp(position[2], extent.depth)};
}

double spatial_distance(Point p, const ClusterState& cluster)
{
    const double dx = p.x - cluster.barycenter[0];
    const double dy = p.y - cluster.barycenter[1];
    const double dz = p.z - cluster.barycenter[2];
    return dx * dx + dy * dy + dz * dz;
}

double path_color_distance(std::size_t p, const ClusterState& cluster, std::span<const Point> path,
                           const MomentImages& moments, double lambda)
{
    if (path.empty())
    {
        throw std::invalid_argument("path_color_distance: empty path");
    }
    const double own = moments.color_distance(p, cluster.mean_feature);
    if (lambda == 1.0)
    {
        return own;
    }
    const Extent& e = moments.extent();
    double sum = 0.0;
    for (const Point& q : path)
    {
        sum += moments.color_distance(e.index(q.x, q.y, q.z), cluster.mean_feature);
    }
    return lambda * own + (1.0 - lambda) * (sum / static_cast<double>(path.size()));
}

double contour_weight(std::span<const Point> path, const ContourMap& contour, double gamma)
{
    double peak = 0.0;
    for (const Point& q : path)
    {
        peak = std::max(peak, contour_at(contour, q));
    }
    return 1.0 + gamma * peak;
}

double total_distance(Point p, const ClusterState& cluster, std::span<const Point> path,
                      const MomentImages& moments, const ContourMap* contour,
                      const ScalpParams& params)
{
    const std::size_t idx = moments.extent().index(p.x, p.y, p.z);
    const double color = path_color_distance(idx, cluster, path, moments, params.lambda);
    const double weight = contour != nullptr ? contour_weight(path, *contour, params.gamma) : 1.0;
    return (color + spatial_distance(p, cluster) * params.m2_scale) * weight;
}

// ---------------------------------------------------------------------------

struct ScalpEngine::Scratch
{
    std::vector<Point> path;

    // Window-local memo, indexed by position inside the scanned window.
    std::vector<double> dc;
    std::vector<unsigned char> dc_known;

    // Approximate mode: stored path sums from a pixel to the barycenter.
    std::vector<double> path_sum;
    std::vector<int> path_count;
    std::vector<double> path_peak;
    std::vector<unsigned char> path_known;
    // Window offsets ordered by Chebyshev distance to the center.
    std::vector<Point> rings;
    int rings_radius = -1;
    int rings_depth = -1;
};

ScalpEngine::ScalpEngine(const FeatureImage& image, const ScalpParams& params,
                         const ContourMap* contour, const LabelMap* regions)
    : image_(image)
    , params_(params)
    , contour_(contour)
    , regions_(regions)
{
    validate(params_, image_.pixel_count());
    if (contour_ != nullptr)
    {
        require_same_extent(contour_->extent(), image_.extent(), "contour map");
    }
    if (regions_ != nullptr)
    {
        require_same_extent(regions_->extent(), image_.extent(), "region map");
    }
    moments_ = precompute_moments(image_, params_.n, params_.sigma);
}

DecompositionState ScalpEngine::initial_state() const
{
    DecompositionState state = init_grid(image_.extent(), params_.k);
    update_clusters(state, image_);
    return state;
}

int ScalpEngine::window_radius(const DecompositionState& state) const
{
    return std::max(1, static_cast<int>(std::ceil(state.step)));
}

bool ScalpEngine::window_covers(const DecompositionState& state, std::size_t cluster,
                                std::size_t pixel) const
{
    const Extent& e = image_.extent();
    const auto& c = state.clusters[cluster];
    if (regions_ != nullptr && (*regions_)[pixel] != c.region)
    {
        return false;
    }
    const Point b = nearest_pixel(c.barycenter, e);
    const Point p = point_of(e, pixel);
    const int radius = window_radius(state);
    const int rz = e.is_volume() ? radius : 0;
    return std::abs(p.x - b.x) <= radius && std::abs(p.y - b.y) <= radius &&
           std::abs(p.z - b.z) <= rz;
}

double ScalpEngine::distance(const DecompositionState& state, std::size_t pixel,
                             std::size_t cluster) const
{
    const Extent& e = image_.extent();
    const auto& c = state.clusters[cluster];
    const Point p = point_of(e, pixel);
    const Point b = nearest_pixel(c.barycenter, e);
    const PixelPath path = linear_path_3d(p, b);
    const ContourMap* contour = params_.gamma > 0.0 ? contour_ : nullptr;
    return total_distance(p, c, path, moments_, contour, params_);
}

void ScalpEngine::scan_cluster(DecompositionState& state, std::size_t k, Scratch& scratch) const
{
    const Extent& e = image_.extent();
    const ClusterState& c = state.clusters[k];
    const Point b = nearest_pixel(c.barycenter, e);
    const int radius = window_radius(state);
    const int rz = e.is_volume() ? radius : 0;

    const int x0 = std::max(0, b.x - radius);
    const int x1 = std::min(e.width - 1, b.x + radius);
    const int y0 = std::max(0, b.y - radius);
    const int y1 = std::min(e.height - 1, b.y + radius);
    const int z0 = std::max(0, b.z - rz);
    const int z1 = std::min(e.depth - 1, b.z + rz);
    const int wx = x1 - x0 + 1;
    const int wy = y1 - y0 + 1;
    const int wz = z1 - z0 + 1;
    const auto window_size = static_cast<std::size_t>(wx) * wy * wz;

    const bool use_contour = contour_ != nullptr && params_.gamma > 0.0;
    const bool need_path = params_.lambda < 1.0 || use_contour;
    const bool memo = params_.path_cache != PathCache::off;
    const bool approximate = params_.path_cache == PathCache::approximate;
    const double lambda = params_.lambda;
    const std::span<const double> feature = c.mean_feature;

    if (memo)
    {
        scratch.dc.resize(window_size);
        scratch.dc_known.assign(window_size, 0);
    }
    if (approximate)
    {
        scratch.path_sum.resize(window_size);
        scratch.path_count.resize(window_size);
        scratch.path_peak.resize(window_size);
        scratch.path_known.assign(window_size, 0);
    }

    auto local_index = [&](const Point& q) {
        return (static_cast<std::size_t>(q.z - z0) * wy + static_cast<std::size_t>(q.y - y0)) * wx +
               static_cast<std::size_t>(q.x - x0);
    };
    auto color_at = [&](const Point& q) {
        const std::size_t idx = e.index(q.x, q.y, q.z);
        if (!memo)
        {
            return moments_.color_distance(idx, feature);
        }
        const std::size_t li = local_index(q);
        if (!scratch.dc_known[li])
        {
            scratch.dc[li] = moments_.color_distance(idx, feature);
            scratch.dc_known[li] = 1;
        }
        return scratch.dc[li];
    };

    // Approximate mode visits pixels from the center outwards so that the
    // next pixel of every path has already been evaluated.
    if (approximate && (scratch.rings_radius != radius || scratch.rings_depth != rz))
    {
        scratch.rings.clear();
        for (int dz = -rz; dz <= rz; ++dz)
            for (int dy = -radius; dy <= radius; ++dy)
                for (int dx = -radius; dx <= radius; ++dx)
                    scratch.rings.push_back({dx, dy, dz});
        std::stable_sort(scratch.rings.begin(), scratch.rings.end(), [](const Point& a, const Point& b) {
            return std::max({std::abs(a.x), std::abs(a.y), std::abs(a.z)}) <
                   std::max({std::abs(b.x), std::abs(b.y), std::abs(b.z)});
        });
        scratch.rings_radius = radius;
        scratch.rings_depth = rz;
    }

    auto visit = [&](int x, int y, int z) {
        const std::size_t idx = e.index(x, y, z);
        if (regions_ != nullptr && (*regions_)[idx] != c.region)
        {
            return;
        }
        const Point p{x, y, z};
        const double own = color_at(p);
        double color = own;
        double peak = 0.0;

        if (need_path)
        {
            double sum = 0.0;
            int count = 0;
            // Center-out order: the next pixel toward the center is usually known.
            const std::size_t ln = approximate && p != b ? local_index(linear_path_point(p, b, 1)) : 0;
            if (approximate && p != b && scratch.path_known[ln])
            {
                sum = own + scratch.path_sum[ln];
                count = 1 + scratch.path_count[ln];
                peak = use_contour ? std::max(contour_at(*contour_, p), scratch.path_peak[ln])
                                   : 0.0;
                const std::size_t lp = local_index(p);
                scratch.path_sum[lp] = sum;
                scratch.path_count[lp] = count;
                scratch.path_peak[lp] = peak;
                scratch.path_known[lp] = 1;
            }
            else if (approximate)
            {
                scratch.path.clear();
                append_linear_path(p, b, scratch.path);
                for (std::size_t j = 0; j < scratch.path.size(); ++j)
                {
                    const Point& q = scratch.path[j];
                    const std::size_t lq = local_index(q);
                    if (j > 0 && scratch.path_known[lq])
                    {
                        sum += scratch.path_sum[lq];
                        count += scratch.path_count[lq];
                        peak = std::max(peak, scratch.path_peak[lq]);
                        break;
                    }
                    sum += color_at(q);
                    ++count;
                    if (use_contour)
                    {
                        peak = std::max(peak, contour_at(*contour_, q));
                    }
                }
                const std::size_t lp = local_index(p);
                scratch.path_sum[lp] = sum;
                scratch.path_count[lp] = count;
                scratch.path_peak[lp] = peak;
                scratch.path_known[lp] = 1;
            }
            else
            {
                scratch.path.clear();
                append_linear_path(p, b, scratch.path);
                for (const Point& q : scratch.path)
                {
                    sum += color_at(q);
                    if (use_contour)
                    {
                        peak = std::max(peak, contour_at(*contour_, q));
                    }
                }
                count = static_cast<int>(scratch.path.size());
            }
            if (lambda != 1.0)
            {
                color = lambda * own + (1.0 - lambda) * (sum / static_cast<double>(count));
            }
        }

        const double weight = use_contour ? 1.0 + params_.gamma * peak : 1.0;
        const double d = (color + spatial_distance(p, c) * params_.m2_scale) * weight;
        if (d < state.best_distance[idx])
        {
            state.best_distance[idx] = d;
            state.labels[idx] = static_cast<std::int32_t>(k);
        }
    };

    if (approximate)
    {
        for (const Point& o : scratch.rings)
        {
            const int x = b.x + o.x;
            const int y = b.y + o.y;
            const int z = b.z + o.z;
            if (x >= x0 && x <= x1 && y >= y0 && y <= y1 && z >= z0 && z <= z1)
            {
                visit(x, y, z);
            }
        }
        return;
    }
    for (int z = z0; z <= z1; ++z)
    {
        for (int y = y0; y <= y1; ++y)
        {
            for (int x = x0; x <= x1; ++x)
            {
                visit(x, y, z);
            }
        }
    }
}

void ScalpEngine::assign_pass(DecompositionState& state) const
{
    std::fill(state.best_distance.begin(), state.best_distance.end(), kInf);
    Scratch scratch;
    for (std::size_t k = 0; k < state.clusters.size(); ++k)
    {
        scan_cluster(state, k, scratch);
    }
}

LabelMap ScalpEngine::run(DecompositionState state) const
{
    for (int it = 0; it < params_.iterations; ++it)
    {
        assign_pass(state);
        update_clusters(state, image_);
    }
    return enforce_connectivity(state.labels, regions_);
}

LabelMap ScalpEngine::run() const
{
    return run(initial_state());
}

LabelMap run_scalp(const FeatureImage& image, const ScalpParams& params, const ContourMap* contour)
{
    const ScalpEngine engine(image, params, contour);
    return engine.run();
}

} // namespace scalp
