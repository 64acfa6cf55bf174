#include "scalp/clustering.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace scalp {

namespace {

// Face neighbors of an element: 4 in the plane, 6 in a volume.
template <typename F>
void for_each_face_neighbor(const Extent& e, std::size_t idx, F&& f)
{
    const Point p = point_of(e, idx);
    const auto w = static_cast<std::size_t>(e.width);
    const auto plane = w * static_cast<std::size_t>(e.height);
    if (p.x > 0) f(idx - 1);
    if (p.x + 1 < e.width) f(idx + 1);
    if (p.y > 0) f(idx - w);
    if (p.y + 1 < e.height) f(idx + w);
    if (p.z > 0) f(idx - plane);
    if (p.z + 1 < e.depth) f(idx + plane);
}

struct Components
{
    std::vector<std::int32_t> of_pixel;
    std::vector<std::int32_t> label;
    std::vector<std::size_t> size;
};

Components label_components(const LabelMap& labels)
{
    const Extent& e = labels.extent();
    Components cc;
    cc.of_pixel.assign(labels.size(), -1);
    std::vector<std::size_t> queue;
    for (std::size_t seed = 0; seed < labels.size(); ++seed)
    {
        if (cc.of_pixel[seed] >= 0)
        {
            continue;
        }
        const auto id = static_cast<std::int32_t>(cc.label.size());
        const std::int32_t value = labels[seed];
        queue.clear();
        queue.push_back(seed);
        cc.of_pixel[seed] = id;
        for (std::size_t head = 0; head < queue.size(); ++head)
        {
            for_each_face_neighbor(e, queue[head], [&](std::size_t q) {
                if (cc.of_pixel[q] < 0 && labels[q] == value)
                {
                    cc.of_pixel[q] = id;
                    queue.push_back(q);
                }
            });
        }
        cc.label.push_back(value);
        cc.size.push_back(queue.size());
    }
    return cc;
}

} // namespace

LabelMap compact_labels(const LabelMap& labels)
{
    std::vector<std::int32_t> values(labels.begin(), labels.end());
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    LabelMap out(labels.extent());
    for (std::size_t i = 0; i < labels.size(); ++i)
    {
        out[i] = static_cast<std::int32_t>(
            std::lower_bound(values.begin(), values.end(), labels[i]) - values.begin());
    }
    return out;
}

LabelMap enforce_connectivity(const LabelMap& labels, const LabelMap* regions)
{
    if (regions != nullptr)
    {
        require_same_extent(labels.extent(), regions->extent(), "enforce_connectivity");
    }
    const Extent& e = labels.extent();
    const Components cc = label_components(labels);
    const std::size_t count = cc.label.size();

    // Largest component of each label is kept; ties go to the earliest one.
    std::map<std::int32_t, std::int32_t> main_of_label;
    for (std::size_t c = 0; c < count; ++c)
    {
        auto [it, inserted] = main_of_label.try_emplace(cc.label[c], static_cast<std::int32_t>(c));
        if (!inserted && cc.size[c] > cc.size[static_cast<std::size_t>(it->second)])
        {
            it->second = static_cast<std::int32_t>(c);
        }
    }

    std::vector<std::size_t> orphans;
    for (std::size_t c = 0; c < count; ++c)
    {
        if (main_of_label.at(cc.label[c]) != static_cast<std::int32_t>(c))
        {
            orphans.push_back(c);
        }
    }
    if (orphans.empty())
    {
        return compact_labels(labels);
    }
    std::stable_sort(orphans.begin(), orphans.end(),
                     [&](std::size_t a, std::size_t b) { return cc.size[a] < cc.size[b]; });

    std::vector<std::size_t> parent(count);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&parent](std::size_t x) {
        while (parent[x] != x)
        {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    std::vector<std::vector<std::size_t>> members(count);
    for (std::size_t i = 0; i < labels.size(); ++i)
    {
        members[static_cast<std::size_t>(cc.of_pixel[i])].push_back(i);
    }
    // Sets with no admissible neighbor become standalone superpixels.
    std::vector<unsigned char> standalone(count, 0);

    for (const std::size_t orphan : orphans)
    {
        const std::size_t root = find(orphan);
        std::map<std::size_t, std::size_t> shared; // neighbor root -> boundary edges
        for (const std::size_t p : members[root])
        {
            for_each_face_neighbor(e, p, [&](std::size_t q) {
                const std::size_t other = find(static_cast<std::size_t>(cc.of_pixel[q]));
                if (other == root)
                {
                    return;
                }
                if (regions != nullptr && (*regions)[q] != (*regions)[p])
                {
                    return;
                }
                ++shared[other];
            });
        }
        if (shared.empty())
        {
            standalone[root] = 1;
            continue;
        }
        std::size_t best = shared.begin()->first;
        for (const auto& [other, edges] : shared)
        {
            const std::size_t best_edges = shared[best];
            if (edges > best_edges ||
                (edges == best_edges && cc.label[other] < cc.label[best]))
            {
                best = other;
            }
        }
        parent[root] = best;
        auto& into = members[best];
        into.insert(into.end(), members[root].begin(), members[root].end());
        members[root].clear();
        members[root].shrink_to_fit();
    }

    // Final key per pixel: the owning label, or a fresh key for standalone sets.
    const std::int32_t max_label = *std::max_element(labels.begin(), labels.end());
    LabelMap merged(e);
    for (std::size_t i = 0; i < labels.size(); ++i)
    {
        const std::size_t root = find(static_cast<std::size_t>(cc.of_pixel[i]));
        merged[i] = standalone[root] ? max_label + 1 + static_cast<std::int32_t>(root)
                                     : cc.label[root];
    }
    return compact_labels(merged);
}

} // namespace scalp
