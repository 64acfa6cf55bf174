#include "scalp/metrics.hpp"

#include "scalp/contour_prior.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace scalp {

namespace {

using Mask = Grid<unsigned char>;

struct Offset
{
    int dx;
    int dy;
};

std::vector<Offset> disc_offsets(double epsilon)
{
    std::vector<Offset> offsets;
    const int reach = static_cast<int>(std::ceil(epsilon));
    for (int dy = -reach; dy <= reach; ++dy)
    {
        for (int dx = -reach; dx <= reach; ++dx)
        {
            if (std::sqrt(static_cast<double>(dx * dx + dy * dy)) < epsilon)
            {
                offsets.push_back({dx, dy});
            }
        }
    }
    return offsets;
}

// Pixels lying strictly within epsilon of a set pixel of `mask`.
Mask dilate(const Mask& mask, double epsilon)
{
    const auto offsets = disc_offsets(epsilon);
    Mask out(mask.extent(), 0);
    for (int y = 0; y < mask.height(); ++y)
    {
        for (int x = 0; x < mask.width(); ++x)
        {
            if (!mask.at(x, y))
            {
                continue;
            }
            for (const auto& o : offsets)
            {
                const int qx = x + o.dx;
                const int qy = y + o.dy;
                if (qx >= 0 && qy >= 0 && qx < mask.width() && qy < mask.height())
                {
                    out.at(qx, qy) = 1;
                }
            }
        }
    }
    return out;
}

// Fraction of `from` pixels that fall inside `near_to` (a dilated mask).
double covered_fraction(const Mask& from, const Mask& near_to)
{
    std::size_t total = 0;
    std::size_t hit = 0;
    for (std::size_t i = 0; i < from.size(); ++i)
    {
        if (from[i])
        {
            ++total;
            hit += near_to[i] ? 1 : 0;
        }
    }
    return total == 0 ? 1.0 : static_cast<double>(hit) / static_cast<double>(total);
}

void require_plane(const LabelMap& s, const char* what)
{
    if (s.depth() != 1)
    {
        throw std::invalid_argument(std::string(what) + ": expects a 2D label map");
    }
}

long long cross(const Point& o, const Point& a, const Point& b)
{
    return static_cast<long long>(a.x - o.x) * (b.y - o.y) -
           static_cast<long long>(a.y - o.y) * (b.x - o.x);
}

// Andrew's monotone chain; counter-clockwise, collinear points removed.
std::vector<Point> convex_hull(std::vector<Point> pts)
{
    std::sort(pts.begin(), pts.end(),
              [](const Point& a, const Point& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3)
    {
        return pts;
    }
    std::vector<Point> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts)
    {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0)
        {
            --k;
        }
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;)
    {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0)
        {
            --k;
        }
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

bool inside_hull(const std::vector<Point>& hull, const Point& p)
{
    if (hull.size() == 1)
    {
        return hull[0] == p;
    }
    if (hull.size() == 2)
    {
        const Point& a = hull[0];
        const Point& b = hull[1];
        return cross(a, b, p) == 0 && std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
               std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
    }
    for (std::size_t i = 0; i < hull.size(); ++i)
    {
        if (cross(hull[i], hull[(i + 1) % hull.size()], p) < 0)
        {
            return false;
        }
    }
    return true;
}

// Exposed 4-edges of the set pixels in a local mask.
std::size_t exposed_edges(const std::vector<unsigned char>& mask, int w, int h)
{
    std::size_t edges = 0;
    auto in = [&](int x, int y) {
        return x >= 0 && y >= 0 && x < w && y < h && mask[static_cast<std::size_t>(y) * w + x];
    };
    for (int y = 0; y < h; ++y)
    {
        for (int x = 0; x < w; ++x)
        {
            if (!in(x, y))
            {
                continue;
            }
            edges += !in(x - 1, y);
            edges += !in(x + 1, y);
            edges += !in(x, y - 1);
            edges += !in(x, y + 1);
        }
    }
    return edges;
}

} // namespace

double asa(const LabelMap& s, const LabelMap& t)
{
    require_same_extent(s.extent(), t.extent(), "asa");
    std::unordered_map<std::uint64_t, std::size_t> overlap;
    overlap.reserve(1024);
    for (std::size_t i = 0; i < s.size(); ++i)
    {
        const auto key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s[i])) << 32) |
                         static_cast<std::uint32_t>(t[i]);
        ++overlap[key];
    }
    std::unordered_map<std::uint32_t, std::size_t> best;
    for (const auto& [key, count] : overlap)
    {
        auto& b = best[static_cast<std::uint32_t>(key >> 32)];
        b = std::max(b, count);
    }
    std::size_t total = 0;
    for (const auto& [label, count] : best)
    {
        total += count;
    }
    return static_cast<double>(total) / static_cast<double>(s.size());
}

double asa_3d(const LabelMap& s, const LabelMap& t)
{
    return asa(s, t);
}

double boundary_recall(const LabelMap& s, const LabelMap& t, double epsilon)
{
    require_same_extent(s.extent(), t.extent(), "boundary_recall");
    require_plane(s, "boundary_recall");
    return covered_fraction(boundary_mask(t), dilate(boundary_mask(s), epsilon));
}

double boundary_precision(const LabelMap& s, const LabelMap& t, double epsilon)
{
    require_same_extent(s.extent(), t.extent(), "boundary_precision");
    require_plane(s, "boundary_precision");
    return covered_fraction(boundary_mask(s), dilate(boundary_mask(t), epsilon));
}

double contour_density(const LabelMap& s)
{
    const Mask b = boundary_mask(s);
    const auto count = std::count(b.begin(), b.end(), static_cast<unsigned char>(1));
    return static_cast<double>(count) / static_cast<double>(s.size());
}

std::vector<ShapeTerms> shape_terms(const LabelMap& s)
{
    require_plane(s, "shape_regularity");
    const std::int32_t max_label = *std::max_element(s.begin(), s.end());
    const auto count = static_cast<std::size_t>(max_label) + 1;

    std::vector<std::vector<Point>> members(count);
    for (int y = 0; y < s.height(); ++y)
    {
        for (int x = 0; x < s.width(); ++x)
        {
            const auto v = s.at(x, y);
            if (v < 0)
            {
                throw std::invalid_argument("shape_regularity: negative label");
            }
            members[static_cast<std::size_t>(v)].push_back({x, y, 0});
        }
    }

    std::vector<ShapeTerms> terms(count);
    std::vector<unsigned char> local;
    for (std::size_t k = 0; k < count; ++k)
    {
        const auto& pts = members[k];
        if (pts.empty())
        {
            continue;
        }
        int x0 = pts[0].x, x1 = pts[0].x, y0 = pts[0].y, y1 = pts[0].y;
        double mx = 0.0, my = 0.0;
        for (const auto& p : pts)
        {
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
            mx += p.x;
            my += p.y;
        }
        const auto n = static_cast<double>(pts.size());
        mx /= n;
        my /= n;
        double vx = 0.0, vy = 0.0;
        for (const auto& p : pts)
        {
            vx += (p.x - mx) * (p.x - mx);
            vy += (p.y - my) * (p.y - my);
        }
        const double sx = std::sqrt(std::sqrt(vx / n));
        const double sy = std::sqrt(std::sqrt(vy / n));

        const int w = x1 - x0 + 1;
        const int h = y1 - y0 + 1;
        local.assign(static_cast<std::size_t>(w) * h, 0);
        for (const auto& p : pts)
        {
            local[static_cast<std::size_t>(p.y - y0) * w + (p.x - x0)] = 1;
        }

        ShapeTerms& st = terms[k];
        st.area = pts.size();
        st.perimeter = exposed_edges(local, w, h);
        st.spread_balance = std::max(sx, sy) > 0.0 ? std::min(sx, sy) / std::max(sx, sy) : 1.0;

        const auto hull = convex_hull(pts);
        std::fill(local.begin(), local.end(), 0);
        std::size_t hull_area = 0;
        for (int y = y0; y <= y1; ++y)
        {
            for (int x = x0; x <= x1; ++x)
            {
                if (inside_hull(hull, {x, y, 0}))
                {
                    local[static_cast<std::size_t>(y - y0) * w + (x - x0)] = 1;
                    ++hull_area;
                }
            }
        }
        st.hull_area = hull_area;
        st.hull_perimeter = exposed_edges(local, w, h);
    }
    return terms;
}

double shape_regularity(const LabelMap& s)
{
    const auto terms = shape_terms(s);
    const auto total = static_cast<double>(s.size());
    double src = 0.0;
    for (const auto& st : terms)
    {
        if (st.area == 0)
        {
            continue;
        }
        const double cc_shape = static_cast<double>(st.perimeter) / static_cast<double>(st.area);
        const double cc_hull = static_cast<double>(st.hull_perimeter) / static_cast<double>(st.hull_area);
        src += (static_cast<double>(st.area) / total) * (cc_hull / cc_shape) * st.spread_balance;
    }
    return src;
}

PrCurve pr_curve(const Grid<double>& avg_boundary, const GroundTruthSet& gts, double epsilon)
{
    if (gts.empty())
    {
        throw std::invalid_argument("pr_curve: empty ground-truth set");
    }
    std::vector<Mask> gt_boundary;
    std::vector<Mask> gt_near;
    for (const auto& t : gts)
    {
        require_same_extent(avg_boundary.extent(), t.extent(), "pr_curve");
        gt_boundary.push_back(boundary_mask(t));
        gt_near.push_back(dilate(gt_boundary.back(), epsilon));
    }

    std::set<double> levels;
    for (const double v : avg_boundary)
    {
        if (v > 0.0)
        {
            levels.insert(v);
        }
    }

    PrCurve curve;
    for (const double level : levels)
    {
        Mask predicted(avg_boundary.extent(), 0);
        for (std::size_t i = 0; i < predicted.size(); ++i)
        {
            predicted[i] = avg_boundary[i] >= level ? 1 : 0;
        }
        const Mask predicted_near = dilate(predicted, epsilon);
        double precision = 0.0;
        double recall = 0.0;
        for (std::size_t a = 0; a < gts.size(); ++a)
        {
            precision += covered_fraction(predicted, gt_near[a]);
            recall += covered_fraction(gt_boundary[a], predicted_near);
        }
        precision /= static_cast<double>(gts.size());
        recall /= static_cast<double>(gts.size());
        const double f = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        curve.points.push_back({level, precision, recall, f});
        curve.max_f = std::max(curve.max_f, f);
    }
    return curve;
}

MetricReport evaluate(const LabelMap& s, const GroundTruthSet& gts, double epsilon)
{
    if (gts.empty())
    {
        throw std::invalid_argument("evaluate: empty ground-truth set");
    }
    MetricReport r;
    for (const auto& t : gts)
    {
        r.asa += asa(s, t);
        r.br += boundary_recall(s, t, epsilon);
    }
    r.asa /= static_cast<double>(gts.size());
    r.br /= static_cast<double>(gts.size());
    r.cd = contour_density(s);
    r.src = shape_regularity(s);
    std::set<std::int32_t> labels(s.begin(), s.end());
    r.superpixels = labels.size();
    r.annotators = gts.size();
    return r;
}

} // namespace scalp
