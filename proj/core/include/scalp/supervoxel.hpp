#pragma once

#include "scalp/clustering.hpp"
#include "scalp/grid.hpp"
#include "scalp/params.hpp"

namespace scalp {

/// Decomposes a volume (depth >= 1, one or more channels per voxel) into
/// supervoxels: r = cbrt(N/K), 3D windows, paths and barycenters, moments
/// over (2n+1)^3 neighborhoods. A depth-1 volume is decomposed exactly as the
/// image path would. `contour` may be null.
LabelMap run_scalp_3d(const Volume& volume, const ScalpParams& params, const ContourMap* contour = nullptr);

} // namespace scalp
