#include "scalp/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace scalp {

void validate(const ScalpParams& params, std::size_t element_count)
{
    if (params.k < 1 || static_cast<std::size_t>(params.k) > element_count)
    {
        throw std::invalid_argument("K must lie in [1, " + std::to_string(element_count) +
                                    "], got " + std::to_string(params.k));
    }
    if (!(params.lambda >= 0.0 && params.lambda <= 1.0))
    {
        throw std::invalid_argument("lambda must lie in [0,1]");
    }
    if (!(params.gamma >= 0.0) || !std::isfinite(params.gamma))
    {
        throw std::invalid_argument("gamma must be a finite value >= 0");
    }
    if (params.n < 0)
    {
        throw std::invalid_argument("neighborhood radius n must be >= 0");
    }
    if (!(params.sigma > 0.0))
    {
        throw std::invalid_argument("sigma must be > 0");
    }
    if (params.iterations < 1)
    {
        throw std::invalid_argument("iterations must be >= 1");
    }
    if (!(params.m2_scale >= 0.0) || !std::isfinite(params.m2_scale))
    {
        throw std::invalid_argument("m2_scale must be a finite value >= 0");
    }
}

} // namespace scalp
