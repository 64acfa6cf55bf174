#include "scalp/hard_constraint.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

namespace scalp {

namespace {

double suppressed(double value, double tau)
{
    return value >= tau ? value : 0.0;
}

bool is_contour(double value, double tau)
{
    return value > 0.0 && value >= tau;
}

void require_unit_interval(double v, const char* what)
{
    if (!(v >= 0.0 && v <= 1.0))
    {
        throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
    }
}

// 4-connected components of non-contour pixels; contour pixels get -1.
LabelMap label_open_area(const HierarchicalMap& ucm, double tau, int& count)
{
    const Extent& e = ucm.extent();
    LabelMap labels(e, -1);
    count = 0;
    std::vector<std::size_t> queue;
    for (std::size_t seed = 0; seed < ucm.size(); ++seed)
    {
        if (labels[seed] >= 0 || is_contour(ucm[seed], tau))
        {
            continue;
        }
        labels[seed] = count;
        queue.assign(1, seed);
        for (std::size_t head = 0; head < queue.size(); ++head)
        {
            const Point p = point_of(e, queue[head]);
            const Point nb[4] = {{p.x - 1, p.y, 0}, {p.x + 1, p.y, 0}, {p.x, p.y - 1, 0}, {p.x, p.y + 1, 0}};
            for (const Point& q : nb)
            {
                if (!e.contains(q.x, q.y))
                {
                    continue;
                }
                const std::size_t qi = e.index(q.x, q.y);
                if (labels[qi] < 0 && !is_contour(ucm[qi], tau))
                {
                    labels[qi] = count;
                    queue.push_back(qi);
                }
            }
        }
        ++count;
    }
    return labels;
}

struct KMeansResult
{
    std::vector<int> assignment;
    double inertia = 0.0;
};

KMeansResult spatial_kmeans(const std::vector<Point>& pts, int k, std::mt19937_64& rng, int max_iterations)
{
    const std::size_t n = pts.size();
    std::vector<std::array<double, 2>> centers;
    centers.reserve(static_cast<std::size_t>(k));

    // k-means++ seeding.
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const Point& first = pts[pick(rng)];
    centers.push_back({static_cast<double>(first.x), static_cast<double>(first.y)});
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    auto d2 = [](const Point& p, const std::array<double, 2>& c) {
        const double dx = p.x - c[0];
        const double dy = p.y - c[1];
        return dx * dx + dy * dy;
    };
    while (static_cast<int>(centers.size()) < k)
    {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            nearest[i] = std::min(nearest[i], d2(pts[i], centers.back()));
            total += nearest[i];
        }
        std::size_t chosen = 0;
        if (total > 0.0)
        {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng);
            for (chosen = 0; chosen + 1 < n; ++chosen)
            {
                target -= nearest[chosen];
                if (target < 0.0 && nearest[chosen] > 0.0)
                {
                    break;
                }
            }
        }
        centers.push_back({static_cast<double>(pts[chosen].x), static_cast<double>(pts[chosen].y)});
    }

    KMeansResult result;
    result.assignment.assign(n, -1);
    std::vector<std::array<double, 2>> sums(static_cast<std::size_t>(k));
    std::vector<std::size_t> counts(static_cast<std::size_t>(k));
    for (int it = 0; it < max_iterations; ++it)
    {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i)
        {
            int best = 0;
            double best_d = d2(pts[i], centers[0]);
            for (int c = 1; c < k; ++c)
            {
                const double d = d2(pts[i], centers[static_cast<std::size_t>(c)]);
                if (d < best_d)
                {
                    best_d = d;
                    best = c;
                }
            }
            if (result.assignment[i] != best)
            {
                result.assignment[i] = best;
                changed = true;
            }
        }
        if (!changed)
        {
            break;
        }
        std::fill(sums.begin(), sums.end(), std::array<double, 2>{0.0, 0.0});
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i)
        {
            const auto c = static_cast<std::size_t>(result.assignment[i]);
            sums[c][0] += pts[i].x;
            sums[c][1] += pts[i].y;
            ++counts[c];
        }
        for (std::size_t c = 0; c < centers.size(); ++c)
        {
            if (counts[c] > 0)
            {
                centers[c] = {sums[c][0] / counts[c], sums[c][1] / counts[c]};
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i)
    {
        result.inertia += d2(pts[i], centers[static_cast<std::size_t>(result.assignment[i])]);
    }
    return result;
}

} // namespace

std::vector<int> RegionPartition::neighbors(int region) const
{
    std::vector<int> out;
    for (const auto& [key, boundary] : adjacency)
    {
        if (key.first == region)
        {
            out.push_back(key.second);
        }
        else if (key.second == region)
        {
            out.push_back(key.first);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

RegionPartition make_partition(LabelMap labels, const HierarchicalMap& ucm, double tau)
{
    require_same_extent(labels.extent(), ucm.extent(), "make_partition");
    const Extent& e = labels.extent();
    RegionPartition part;
    part.tau = tau;
    const std::int32_t max_label = *std::max_element(labels.begin(), labels.end());
    part.sizes.assign(static_cast<std::size_t>(max_label) + 1, 0);
    for (const auto v : labels)
    {
        if (v < 0)
        {
            throw std::invalid_argument("make_partition: negative region label");
        }
        ++part.sizes[static_cast<std::size_t>(v)];
    }

    auto link = [&](std::size_t p, std::size_t q) {
        const int a = labels[p];
        const int b = labels[q];
        if (a == b)
        {
            return;
        }
        const auto key = std::minmax(a, b);
        const double strength = std::max(suppressed(ucm[p], tau), suppressed(ucm[q], tau));
        auto [it, inserted] = part.adjacency.try_emplace({key.first, key.second});
        if (inserted)
        {
            it->second.strength = strength;
        }
        else
        {
            it->second.strength = std::min(it->second.strength, strength);
        }
        it->second.pixels.push_back(p);
        it->second.pixels.push_back(q);
    };
    for (int y = 0; y < e.height; ++y)
    {
        for (int x = 0; x < e.width; ++x)
        {
            const std::size_t p = e.index(x, y);
            if (x + 1 < e.width)
            {
                link(p, p + 1);
            }
            if (y + 1 < e.height)
            {
                link(p, p + static_cast<std::size_t>(e.width));
            }
        }
    }
    for (auto& [key, boundary] : part.adjacency)
    {
        auto& px = boundary.pixels;
        std::sort(px.begin(), px.end());
        px.erase(std::unique(px.begin(), px.end()), px.end());
    }
    part.labels = std::move(labels);
    return part;
}

RegionPartition threshold_regions(const HierarchicalMap& ucm, double tau)
{
    require_unit_interval(tau, "tau");
    if (ucm.depth() != 1)
    {
        throw std::invalid_argument("threshold_regions: expects a 2D map");
    }
    const Extent& e = ucm.extent();
    int count = 0;
    LabelMap labels = label_open_area(ucm, tau, count);
    if (count == 0)
    {
        return make_partition(LabelMap(e, 0), ucm, tau);
    }

    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < labels.size(); ++i)
    {
        if (labels[i] < 0)
        {
            pending.push_back(i);
        }
    }
    std::vector<std::pair<std::size_t, std::int32_t>> wave;
    while (!pending.empty())
    {
        wave.clear();
        std::vector<std::size_t> still;
        for (const std::size_t p : pending)
        {
            const Point pt = point_of(e, p);
            std::array<std::int32_t, 4> seen{};
            int n = 0;
            const Point nb[4] = {{pt.x - 1, pt.y, 0}, {pt.x + 1, pt.y, 0}, {pt.x, pt.y - 1, 0}, {pt.x, pt.y + 1, 0}};
            for (const Point& q : nb)
            {
                if (e.contains(q.x, q.y) && labels.at(q.x, q.y) >= 0)
                {
                    seen[static_cast<std::size_t>(n++)] = labels.at(q.x, q.y);
                }
            }
            if (n == 0)
            {
                still.push_back(p);
                continue;
            }
            std::sort(seen.begin(), seen.begin() + n);
            std::int32_t best = seen[0];
            int best_votes = 0;
            for (int i = 0; i < n;)
            {
                int j = i;
                while (j < n && seen[static_cast<std::size_t>(j)] == seen[static_cast<std::size_t>(i)])
                {
                    ++j;
                }
                if (j - i > best_votes)
                {
                    best_votes = j - i;
                    best = seen[static_cast<std::size_t>(i)];
                }
                i = j;
            }
            wave.emplace_back(p, best);
        }
        for (const auto& [p, label] : wave)
        {
            labels[p] = label;
        }
        pending = std::move(still);
    }
    return make_partition(std::move(labels), ucm, tau);
}

std::size_t count_open_contours(const HierarchicalMap& ucm, double tau)
{
    const Extent& e = ucm.extent();
    int count = 0;
    const LabelMap open_area = label_open_area(ucm, tau, count);
    std::vector<unsigned char> visited(ucm.size(), 0);
    std::size_t open = 0;
    std::vector<std::size_t> queue;
    for (std::size_t seed = 0; seed < ucm.size(); ++seed)
    {
        if (visited[seed] || !is_contour(ucm[seed], tau))
        {
            continue;
        }
        std::set<std::int32_t> touching;
        visited[seed] = 1;
        queue.assign(1, seed);
        for (std::size_t head = 0; head < queue.size(); ++head)
        {
            const Point p = point_of(e, queue[head]);
            for (int dy = -1; dy <= 1; ++dy)
            {
                for (int dx = -1; dx <= 1; ++dx)
                {
                    if (!e.contains(p.x + dx, p.y + dy) || (dx == 0 && dy == 0))
                    {
                        continue;
                    }
                    const std::size_t q = e.index(p.x + dx, p.y + dy);
                    if (is_contour(ucm[q], tau))
                    {
                        if (!visited[q])
                        {
                            visited[q] = 1;
                            queue.push_back(q);
                        }
                    }
                    else if (dx == 0 || dy == 0)
                    {
                        touching.insert(open_area[q]);
                    }
                }
            }
        }
        if (count > 0 && touching.size() < 2)
        {
            ++open;
        }
    }
    return open;
}

RegionPartition merge_small_regions(const RegionPartition& partition, const HierarchicalMap& ucm,
                                    double s, double t)
{
    require_unit_interval(t, "t");
    if (!(s > 0.0))
    {
        throw std::invalid_argument("merge_small_regions: s must be > 0");
    }
    const double min_size = s * t;
    const std::size_t count = partition.region_count();

    std::vector<std::size_t> sizes = partition.sizes;
    std::vector<unsigned char> alive(count, 1);
    std::vector<int> merged_into(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        merged_into[i] = static_cast<int>(i);
    }
    std::map<std::pair<int, int>, double> strength;
    for (const auto& [key, boundary] : partition.adjacency)
    {
        strength[key] = boundary.strength;
    }

    for (std::size_t step = 0; step < count; ++step)
    {
        int victim = -1;
        for (std::size_t i = 0; i < count; ++i)
        {
            if (alive[i] && static_cast<double>(sizes[i]) < min_size &&
                (victim < 0 || sizes[i] < sizes[static_cast<std::size_t>(victim)]))
            {
                victim = static_cast<int>(i);
            }
        }
        if (victim < 0)
        {
            break;
        }
        int target = -1;
        double weakest = std::numeric_limits<double>::infinity();
        for (const auto& [key, value] : strength)
        {
            if (key.first != victim && key.second != victim)
            {
                continue;
            }
            const int other = key.first == victim ? key.second : key.first;
            if (value < weakest || (value == weakest && other < target))
            {
                weakest = value;
                target = other;
            }
        }
        if (target < 0)
        {
            break; // single region left
        }

        std::map<std::pair<int, int>, double> next;
        for (const auto& [key, value] : strength)
        {
            int a = key.first == victim ? target : key.first;
            int b = key.second == victim ? target : key.second;
            if (a == b)
            {
                continue;
            }
            const auto k2 = std::minmax(a, b);
            auto [it, inserted] = next.try_emplace({k2.first, k2.second}, value);
            if (!inserted)
            {
                it->second = std::min(it->second, value);
            }
        }
        strength = std::move(next);
        sizes[static_cast<std::size_t>(target)] += sizes[static_cast<std::size_t>(victim)];
        sizes[static_cast<std::size_t>(victim)] = 0;
        alive[static_cast<std::size_t>(victim)] = 0;
        merged_into[static_cast<std::size_t>(victim)] = target;
    }

    auto resolve = [&](int r) {
        while (merged_into[static_cast<std::size_t>(r)] != r)
        {
            r = merged_into[static_cast<std::size_t>(r)];
        }
        return r;
    };
    std::vector<int> compact(count, -1);
    int next_id = 0;
    for (std::size_t i = 0; i < count; ++i)
    {
        if (alive[i])
        {
            compact[i] = next_id++;
        }
    }
    LabelMap labels(partition.labels.extent());
    for (std::size_t i = 0; i < labels.size(); ++i)
    {
        labels[i] = compact[static_cast<std::size_t>(resolve(partition.labels[i]))];
    }
    return make_partition(std::move(labels), ucm, partition.tau);
}

RegionPartition partition_regions(const RegionPartition& partition, double s, std::uint64_t seed)
{
    if (!(s > 0.0))
    {
        throw std::invalid_argument("partition_regions: s must be > 0");
    }
    const Extent& e = partition.labels.extent();
    const std::size_t count = partition.region_count();

    std::vector<std::vector<std::size_t>> members(count);
    for (std::size_t i = 0; i < partition.labels.size(); ++i)
    {
        members[static_cast<std::size_t>(partition.labels[i])].push_back(i);
    }

    std::mt19937_64 rng(seed);
    LabelMap labels(e, 0);
    std::vector<int> parent;
    int next_id = 0;
    for (std::size_t r = 0; r < count; ++r)
    {
        const auto& px = members[r];
        if (px.empty())
        {
            continue;
        }
        const auto pieces = static_cast<int>(std::floor(static_cast<double>(px.size()) / s));
        if (pieces < 2)
        {
            for (const std::size_t p : px)
            {
                labels[p] = next_id;
            }
            parent.push_back(static_cast<int>(r));
            ++next_id;
            continue;
        }

        std::vector<Point> pts;
        pts.reserve(px.size());
        for (const std::size_t p : px)
        {
            pts.push_back(point_of(e, p));
        }
        const bool small = px.size() * static_cast<std::size_t>(pieces) <= 2'000'000;
        const int restarts = small ? 3 : 1;
        const int max_iterations = small ? 100 : 30;
        KMeansResult best;
        for (int attempt = 0; attempt < restarts; ++attempt)
        {
            KMeansResult candidate = spatial_kmeans(pts, pieces, rng, max_iterations);
            if (attempt == 0 || candidate.inertia < best.inertia)
            {
                best = std::move(candidate);
            }
        }
        // Empty clusters are skipped when numbering.
        std::vector<int> id_of(static_cast<std::size_t>(pieces), -1);
        for (std::size_t i = 0; i < px.size(); ++i)
        {
            auto& id = id_of[static_cast<std::size_t>(best.assignment[i])];
            if (id < 0)
            {
                id = next_id++;
                parent.push_back(static_cast<int>(r));
            }
            labels[px[i]] = id;
        }
    }

    // Adjacency strength is not meaningful between sub-regions: use a flat map.
    RegionPartition out = make_partition(std::move(labels), HierarchicalMap(e, 0.0), partition.tau);
    out.parent = std::move(parent);
    return out;
}

HcResult run_scalp_hc(const FeatureImage& image, const ScalpParams& params, const ContourMap* contour,
                      const HierarchicalMap& ucm, const HcOptions& options)
{
    const Extent& e = image.extent();
    validate(params, e.size());
    require_same_extent(ucm.extent(), e, "hierarchical map");
    if (contour != nullptr)
    {
        require_same_extent(contour->extent(), e, "contour map");
    }
    const double s = static_cast<double>(e.size()) / params.k;

    HcResult result;
    result.regions = merge_small_regions(threshold_regions(ucm, options.tau), ucm, s, options.t);
    result.seeds = partition_regions(result.regions, s, params.rng_seed);

    const LabelMap* regions = options.constrain ? &result.regions.labels : nullptr;
    DecompositionState state = init_from_labels(result.seeds.labels, image, regions);
    state.step = grid_step(e, params.k);
    const ScalpEngine engine(image, params, contour, regions);
    result.labels = engine.run(std::move(state));
    return result;
}

} // namespace scalp
