#include "scalp/supervoxel.hpp"

namespace scalp {

LabelMap run_scalp_3d(const Volume& volume, const ScalpParams& params, const ContourMap* contour)
{
    return run_scalp(volume, params, contour);
}

} // namespace scalp
