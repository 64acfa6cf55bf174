#pragma once

#include "scalp/clustering.hpp"
#include "scalp/grid.hpp"
#include "scalp/params.hpp"

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace scalp {

/// Contour probability map of a hierarchical segmentation, values in [0,1].
/// Thresholding it at any level yields closed curves.
using HierarchicalMap = Grid<double>;

/// Boundary shared by two adjacent regions.
struct SharedBoundary
{
    /// Pixels of either region that touch the other (4-adjacency), sorted.
    std::vector<std::size_t> pixels;
    /// Segmentation probability of the boundary: the minimum, over 4-adjacent
    /// pixel pairs straddling it, of max(U_tau(p), U_tau(q)).
    double strength = 0.0;
};

struct RegionPartition
{
    LabelMap labels;                ///< region id per pixel, 0..R-1
    std::vector<std::size_t> sizes; ///< pixel count per region
    /// Adjacent region pairs (i < j) and their shared boundary.
    std::map<std::pair<int, int>, SharedBoundary> adjacency;
    double tau = 0.0;               ///< threshold the map was suppressed at
    /// For sub-region partitions: the region each sub-region was split from.
    std::vector<int> parent;

    [[nodiscard]] std::size_t region_count() const { return sizes.size(); }
    [[nodiscard]] std::vector<int> neighbors(int region) const;
};

/// Builds sizes and adjacency for a labeling (labels must be 0..R-1).
/// U_tau is the map with values below `tau` set to 0.
RegionPartition make_partition(LabelMap labels, const HierarchicalMap& ucm, double tau);

/// Suppresses values below tau, labels the 4-connected components of the
/// remaining non-contour pixels, then absorbs contour pixels into the
/// adjacent region holding most of their 4-neighbors (ties: lowest label),
/// wave by wave for thick contours.
RegionPartition threshold_regions(const HierarchicalMap& ucm, double tau);

/// Number of 8-connected contour components (values >= tau) that touch
/// fewer than two regions, i.e. curves that fail to close. 0 for a valid map.
std::size_t count_open_contours(const HierarchicalMap& ucm, double tau);

/// Repeatedly merges the smallest region with fewer than s*t pixels into the
/// neighbor sharing the weakest boundary (ties: lowest id) until none is
/// left below the threshold or a single region remains.
RegionPartition merge_small_regions(const RegionPartition& partition, const HierarchicalMap& ucm,
                                    double s, double t);

/// Splits every region with floor(|R|/s) >= 2 into that many sub-regions by
/// K-means on pixel coordinates alone. `parent` of the result maps each
/// sub-region to its region. Deterministic given `seed`.
RegionPartition partition_regions(const RegionPartition& partition, double s, std::uint64_t seed);

struct HcOptions
{
    double tau = 0.4;
    double t = 0.15;
    /// false: the regions only seed the clusters, assignments are not confined.
    bool constrain = true;
};

struct HcResult
{
    LabelMap labels;
    RegionPartition regions; ///< thresholded and merged regions
    RegionPartition seeds;   ///< sub-regions used as initial superpixels
};

/// Threshold, merge, partition, then decompose with every cluster confined
/// to its region. `contour` may be null.
HcResult run_scalp_hc(const FeatureImage& image, const ScalpParams& params, const ContourMap* contour,
                      const HierarchicalMap& ucm, const HcOptions& options = {});

} // namespace scalp
