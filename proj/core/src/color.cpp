#include "scalp/color.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace scalp {

namespace {

// D65 reference white, Y normalized to 1.
constexpr double kWhiteX = 0.95047;
constexpr double kWhiteY = 1.0;
constexpr double kWhiteZ = 1.08883;

constexpr double kEpsilon = 216.0 / 24389.0;
constexpr double kKappa = 24389.0 / 27.0;

double srgb_to_linear(double c)
{
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double c)
{
    return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

double lab_f(double t)
{
    return t > kEpsilon ? std::cbrt(t) : (kKappa * t + 16.0) / 116.0;
}

double lab_f_inv(double f)
{
    const double f3 = f * f * f;
    return f3 > kEpsilon ? f3 : (116.0 * f - 16.0) / kKappa;
}

std::uint8_t to_byte(double v)
{
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

} // namespace

std::array<double, 3> srgb_to_lab(Rgb8 rgb)
{
    const double r = srgb_to_linear(rgb.r / 255.0);
    const double g = srgb_to_linear(rgb.g / 255.0);
    const double b = srgb_to_linear(rgb.b / 255.0);

    const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;

    const double fx = lab_f(x / kWhiteX);
    const double fy = lab_f(y / kWhiteY);
    const double fz = lab_f(z / kWhiteZ);

    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

Rgb8 lab_to_srgb(const std::array<double, 3>& lab)
{
    const double fy = (lab[0] + 16.0) / 116.0;
    const double fx = fy + lab[1] / 500.0;
    const double fz = fy - lab[2] / 200.0;

    const double x = kWhiteX * lab_f_inv(fx);
    const double y = kWhiteY * lab_f_inv(fy);
    const double z = kWhiteZ * lab_f_inv(fz);

    const double r = 3.2404542 * x - 1.5371385 * y - 0.4985314 * z;
    const double g = -0.9692660 * x + 1.8760108 * y + 0.0415560 * z;
    const double b = 0.0556434 * x - 0.2040259 * y + 1.0572252 * z;

    auto encode = [](double c) { return to_byte(255.0 * linear_to_srgb(std::clamp(c, 0.0, 1.0))); };
    return {encode(r), encode(g), encode(b)};
}

LabImage rgb_to_lab(const RgbImage& image)
{
    LabImage lab(image.extent(), 3);
    for (std::size_t i = 0; i < image.size(); ++i)
    {
        const auto v = srgb_to_lab(image[i]);
        auto px = lab.pixel(i);
        px[0] = v[0];
        px[1] = v[1];
        px[2] = v[2];
    }
    return lab;
}

RgbImage add_gaussian_noise(const RgbImage& image, double variance, std::uint64_t seed)
{
    if (!(variance >= 0.0))
    {
        throw std::invalid_argument("noise variance must be >= 0");
    }
    if (variance == 0.0)
    {
        return image;
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, std::sqrt(variance));

    RgbImage out(image.extent());
    for (std::size_t i = 0; i < image.size(); ++i)
    {
        const Rgb8 in = image[i];
        const double r = in.r + noise(rng);
        const double g = in.g + noise(rng);
        const double b = in.b + noise(rng);
        out[i] = {to_byte(r), to_byte(g), to_byte(b)};
    }
    return out;
}

} // namespace scalp
