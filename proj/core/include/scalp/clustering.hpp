#pragma once

#include "scalp/grid.hpp"
#include "scalp/linear_path.hpp"
#include "scalp/neighborhood.hpp"
#include "scalp/params.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace scalp {

/// One superpixel cluster: mean feature F_k, continuous barycenter X_k and
/// member count.
struct ClusterState
{
    std::vector<double> mean_feature;
    std::array<double, 3> barycenter{}; ///< (x, y, z); z is 0 for images
    std::size_t population = 0;
    int region = -1; ///< region the cluster is confined to; -1 when unconstrained
};

struct DecompositionState
{
    std::vector<ClusterState> clusters;
    LabelMap labels;
    std::vector<double> best_distance;
    double step = 0.0; ///< grid step r
};

/// r = sqrt(N/K) for images, cbrt(N/K) for volumes.
double grid_step(const Extent& extent, int k);

/// Regular block grid of about K clusters. Barycenters are the block means,
/// labels are the block indices. Mean features are left empty until
/// update_clusters runs. Throws std::invalid_argument if K is out of range.
DecompositionState init_grid(const Extent& extent, int k);
DecompositionState init_grid(int width, int height, int k);

/// Builds clusters from an existing labeling (labels must be 0..K-1).
/// `regions`, when given, tags each cluster with the region of its pixels.
DecompositionState init_from_labels(const LabelMap& labels, const FeatureImage& image,
                                    const LabelMap* regions = nullptr);

/// Recomputes mean features and barycenters from the current labels. Empty
/// clusters are dropped and labels re-indexed.
void update_clusters(DecompositionState& state, const FeatureImage& image);

/// Pixel containing (or nearest to) a continuous position, clamped to the grid.
Point nearest_pixel(const std::array<double, 3>& position, const Extent& extent);

double spatial_distance(Point p, const ClusterState& cluster);

/// lambda * D_c(p) + (1 - lambda) * mean of D_c over the path.
double path_color_distance(std::size_t p, const ClusterState& cluster, std::span<const Point> path,
                           const MomentImages& moments, double lambda);

/// 1 + gamma * max of the contour map over the path.
double contour_weight(std::span<const Point> path, const ContourMap& contour, double gamma);

/// (path color distance + m2_scale * spatial distance) * contour weight.
/// `contour` may be null, in which case the weight is 1.
double total_distance(Point p, const ClusterState& cluster, std::span<const Point> path,
                      const MomentImages& moments, const ContourMap* contour,
                      const ScalpParams& params);

/// Iterative clustering with the linear-path distance. Holds the read-only
/// inputs of one decomposition; the state it operates on is passed in.
class ScalpEngine
{
public:
    /// `contour` and `regions` must outlive the engine. `regions`, when set,
    /// confines each cluster to pixels of its own region.
    ScalpEngine(const FeatureImage& image, const ScalpParams& params,
                const ContourMap* contour = nullptr, const LabelMap* regions = nullptr);

    [[nodiscard]] const MomentImages& moments() const { return moments_; }
    [[nodiscard]] const ScalpParams& params() const { return params_; }

    /// Grid initialization followed by a feature update.
    [[nodiscard]] DecompositionState initial_state() const;

    /// One assignment sweep over every cluster window with clusters frozen.
    void assign_pass(DecompositionState& state) const;

    /// Full distance D(p, C_k) as the assignment pass evaluates it (exact
    /// path, no memo).
    [[nodiscard]] double distance(const DecompositionState& state, std::size_t pixel,
                                  std::size_t cluster) const;

    /// Whether the window of `cluster` contains `pixel` (region mask included).
    [[nodiscard]] bool window_covers(const DecompositionState& state, std::size_t cluster,
                                     std::size_t pixel) const;

    /// Window half-width ceil(r).
    [[nodiscard]] int window_radius(const DecompositionState& state) const;

    /// Runs all iterations from `state`, then enforces connectivity.
    [[nodiscard]] LabelMap run(DecompositionState state) const;

    /// initial_state() then run().
    [[nodiscard]] LabelMap run() const;

private:
    struct Scratch;

    void scan_cluster(DecompositionState& state, std::size_t k, Scratch& scratch) const;

    const FeatureImage& image_;
    ScalpParams params_;
    const ContourMap* contour_;
    const LabelMap* regions_;
    MomentImages moments_;
};

/// Decomposes a feature image into superpixels. Throws std::invalid_argument
/// on invalid parameters or a contour map whose size differs from the image.
LabelMap run_scalp(const FeatureImage& image, const ScalpParams& params,
                   const ContourMap* contour = nullptr);

/// Makes every label 4-connected (6-connected for volumes). Each label keeps
/// its largest component; other components join the adjacent component
/// sharing the longest boundary. With `regions`, merges never cross regions.
/// Output labels are compacted to 0..K'-1.
LabelMap enforce_connectivity(const LabelMap& labels, const LabelMap* regions = nullptr);

/// Renumbers labels to 0..K-1 in increasing order of the original values.
LabelMap compact_labels(const LabelMap& labels);

} // namespace scalp
