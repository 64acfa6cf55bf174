#include "scalp/neighborhood.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scalp {

MomentImages precompute_moments(const FeatureImage& image, int n, double sigma)
{
    if (n < 0)
    {
        throw std::invalid_argument("neighborhood radius must be >= 0");
    }
    if (!(sigma > 0.0))
    {
        throw std::invalid_argument("sigma must be > 0");
    }

    const Extent& e = image.extent();
    const int channels = image.channels();
    const auto nc = static_cast<std::size_t>(channels);

    MomentImages m;
    m.extent_ = e;
    m.channels_ = channels;
    m.radius_ = n;
    m.sigma_ = sigma;
    m.f1_.assign(e.size() * nc, 0.0);
    m.f2_.assign(e.size() * nc, 0.0);

    const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
    const int nz = e.is_volume() ? n : 0;

    std::vector<double> acc1(nc);
    std::vector<double> acc2(nc);

    for (int z = 0; z < e.depth; ++z)
    {
        const int z0 = std::max(0, z - nz);
        const int z1 = std::min(e.depth - 1, z + nz);
        for (int y = 0; y < e.height; ++y)
        {
            const int y0 = std::max(0, y - n);
            const int y1 = std::min(e.height - 1, y + n);
            for (int x = 0; x < e.width; ++x)
            {
                const int x0 = std::max(0, x - n);
                const int x1 = std::min(e.width - 1, x + n);
                const std::size_t p = e.index(x, y, z);
                const auto fp = image.pixel(p);

                std::fill(acc1.begin(), acc1.end(), 0.0);
                std::fill(acc2.begin(), acc2.end(), 0.0);
                double z_norm = 0.0;

                for (int qz = z0; qz <= z1; ++qz)
                {
                    for (int qy = y0; qy <= y1; ++qy)
                    {
                        for (int qx = x0; qx <= x1; ++qx)
                        {
                            const auto fq = image.pixel(e.index(qx, qy, qz));
                            double d2 = 0.0;
                            for (std::size_t c = 0; c < nc; ++c)
                            {
                                const double diff = fp[c] - fq[c];
                                d2 += diff * diff;
                            }
                            const double w = std::exp(-d2 * inv_two_sigma2);
                            z_norm += w;
                            for (std::size_t c = 0; c < nc; ++c)
                            {
                                acc1[c] += w * fq[c];
                                acc2[c] += w * fq[c] * fq[c];
                            }
                        }
                    }
                }

                // z_norm >= 1: the center pixel always contributes exp(0).
                for (std::size_t c = 0; c < nc; ++c)
                {
                    m.f1_[p * nc + c] = acc1[c] / z_norm;
                    m.f2_[p * nc + c] = acc2[c] / z_norm;
                }
            }
        }
    }
    return m;
}

} // namespace scalp
