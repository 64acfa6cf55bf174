#pragma once

#include "scalp/clustering.hpp"
#include "scalp/color.hpp"
#include "scalp/contour_prior.hpp"
#include "scalp/grid.hpp"
#include "scalp/hard_constraint.hpp"
#include "scalp/io.hpp"
#include "scalp/linear_path.hpp"
#include "scalp/metrics.hpp"
#include "scalp/neighborhood.hpp"
#include "scalp/params.hpp"
#include "scalp/supervoxel.hpp"
