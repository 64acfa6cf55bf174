#include "scalp/linear_path.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <stdexcept>
#include <tuple>

namespace scalp {

namespace {

bool lex_less(const Point& a, const Point& b)
{
    return std::tie(a.z, a.y, a.x) < std::tie(b.z, b.y, b.x);
}

// Minor-axis offsets are round-half-down of i * span / steps, tracked with an
// integer error term: err = 2*i*span - steps - 2*steps*offset, kept <= 0.
void rasterize(Point from, Point to, std::vector<Point>& out)
{
    const std::array<int, 3> delta{to.x - from.x, to.y - from.y, to.z - from.z};
    std::array<int, 3> span{};
    std::array<int, 3> sign{};
    for (int a = 0; a < 3; ++a)
    {
        span[a] = std::abs(delta[a]);
        sign[a] = delta[a] < 0 ? -1 : 1;
    }
    const int steps = std::max({span[0], span[1], span[2]});
    out.push_back(from);
    if (steps == 0)
    {
        return;
    }
    std::array<int, 3> c{from.x, from.y, from.z};
    std::array<int, 3> err{-steps, -steps, -steps};
    for (int i = 1; i <= steps; ++i)
    {
        for (int a = 0; a < 3; ++a)
        {
            err[a] += 2 * span[a];
            if (err[a] > 0)
            {
                c[a] += sign[a];
                err[a] -= 2 * steps;
            }
        }
        out.push_back({c[0], c[1], c[2]});
    }
}

// Offset of the element at step i from `from`; same rounding as rasterize.
Point step_point(Point from, Point to, int i, int steps)
{
    const std::array<int, 3> f{from.x, from.y, from.z};
    const std::array<int, 3> t{to.x, to.y, to.z};
    std::array<int, 3> c{};
    for (int a = 0; a < 3; ++a)
    {
        const long long span = std::abs(t[a] - f[a]);
        const auto off = static_cast<int>((2LL * i * span + steps - 1) / (2LL * steps));
        c[a] = f[a] + (t[a] < f[a] ? -off : off);
    }
    return {c[0], c[1], c[2]};
}

} // namespace

void append_linear_path(Point from, Point to, std::vector<Point>& out)
{
    if (lex_less(to, from))
    {
        const auto start = out.size();
        rasterize(to, from, out);
        std::reverse(out.begin() + static_cast<std::ptrdiff_t>(start), out.end());
    }
    else
    {
        rasterize(from, to, out);
    }
}

PixelPath linear_path(Point from, Point to)
{
    if (from.z != to.z)
    {
        throw std::invalid_argument("linear_path: endpoints must lie in the same plane");
    }
    PixelPath path;
    append_linear_path(from, to, path);
    return path;
}

PixelPath linear_path_3d(Point from, Point to)
{
    PixelPath path;
    append_linear_path(from, to, path);
    return path;
}

Point linear_path_point(Point from, Point to, int i)
{
    const int steps = linear_path_length(from, to) - 1;
    if (i < 0 || i > steps)
    {
        throw std::out_of_range("linear_path_point: index outside the path");
    }
    if (steps == 0)
    {
        return from;
    }
    if (lex_less(to, from))
    {
        return step_point(to, from, steps - i, steps);
    }
    return step_point(from, to, i, steps);
}

int linear_path_length(Point from, Point to)
{
    return std::max({std::abs(to.x - from.x), std::abs(to.y - from.y), std::abs(to.z - from.z)}) + 1;
}

} // namespace scalp
