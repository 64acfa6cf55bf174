#pragma once

#include "scalp/grid.hpp"

#include <vector>

namespace scalp {

/// Human annotations of one image, all of the same size.
using GroundTruthSet = std::vector<LabelMap>;

/// Achievable segmentation accuracy: (1/|I|) sum_k max_i |S_k ∩ T_i|.
double asa(const LabelMap& s, const LabelMap& t);

/// Same measure on voxel label volumes.
double asa_3d(const LabelMap& s, const LabelMap& t);

/// Fraction of ground-truth boundary pixels with a decomposition boundary
/// pixel at Euclidean distance strictly below `epsilon`. 1.0 when the ground
/// truth has no boundary.
double boundary_recall(const LabelMap& s, const LabelMap& t, double epsilon = 2.0);

/// Fraction of decomposition boundary pixels with a ground-truth boundary
/// pixel strictly within `epsilon`. 1.0 when the decomposition has no boundary.
double boundary_precision(const LabelMap& s, const LabelMap& t, double epsilon = 2.0);

/// Boundary pixels over image size.
double contour_density(const LabelMap& s);

/// Shape regularity criteria: sum_k |S_k|/|I| * CC(hull)/CC(S_k) * V_xy(S_k),
/// with CC = perimeter / area (exposed 4-edges / pixel count), the hull being
/// the pixels whose centers lie in the convex hull of S_k's pixel centers,
/// and V_xy = min(sx,sy)/max(sx,sy) with s the square root of the standard
/// deviation of the coordinates.
double shape_regularity(const LabelMap& s);

/// Per-superpixel terms of shape_regularity, indexed by label.
struct ShapeTerms
{
    std::size_t area = 0;
    std::size_t perimeter = 0;
    std::size_t hull_area = 0;
    std::size_t hull_perimeter = 0;
    double spread_balance = 1.0;
};
std::vector<ShapeTerms> shape_terms(const LabelMap& s);

struct PrPoint
{
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f = 0.0;
};

struct PrCurve
{
    std::vector<PrPoint> points; ///< increasing threshold
    double max_f = 0.0;
};

/// Sweeps every distinct positive value of `avg_boundary` as a threshold
/// (prediction = value >= threshold), averages precision and recall over the
/// annotators, and reports F = 2PR/(P+R). Thresholds with an empty prediction
/// are skipped.
PrCurve pr_curve(const Grid<double>& avg_boundary, const GroundTruthSet& gts, double epsilon = 2.0);

/// Metric values averaged over the annotators of one image.
struct MetricReport
{
    double asa = 0.0;
    double br = 0.0;
    double cd = 0.0;
    double src = 0.0;
    std::size_t superpixels = 0;
    std::size_t annotators = 0;
};

MetricReport evaluate(const LabelMap& s, const GroundTruthSet& gts, double epsilon = 2.0);

} // namespace scalp
