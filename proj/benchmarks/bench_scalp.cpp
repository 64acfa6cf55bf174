#include "scalp/scalp.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace scalp;

namespace {

// Piecewise-constant cells plus noise, roughly like a natural image.
LabImage synthetic_lab(int w, int h, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> u(0, 255);
    std::vector<Rgb8> palette(40);
    for (auto& c : palette)
    {
        c = {static_cast<std::uint8_t>(u(rng)), static_cast<std::uint8_t>(u(rng)), static_cast<std::uint8_t>(u(rng))};
    }
    RgbImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            img.at(x, y) = palette[static_cast<std::size_t>((x / 37 + 3 * (y / 29)) % 40)];
    return rgb_to_lab(add_gaussian_noise(img, 20.0, seed));
}

const LabImage& bsd_sized()
{
    static const LabImage lab = synthetic_lab(481, 321, 1);
    return lab;
}

} // namespace

static void BM_ColorDistance(benchmark::State& state)
{
    const LabImage lab = synthetic_lab(128, 128, 2);
    const MomentImages m = precompute_moments(lab, static_cast<int>(state.range(0)), 40.0);
    const std::vector<double> f{50.0, 10.0, -10.0};
    std::size_t i = 0;
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(color_distance_o1(m, i, f));
        i = (i + 97) % lab.pixel_count();
    }
}
BENCHMARK(BM_ColorDistance)->Arg(1)->Arg(3)->Arg(7);

static void BM_PrecomputeMoments(benchmark::State& state)
{
    const LabImage lab = synthetic_lab(128, 128, 3);
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(precompute_moments(lab, static_cast<int>(state.range(0)), 40.0));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(lab.pixel_count()));
}
BENCHMARK(BM_PrecomputeMoments)->Arg(1)->Arg(3)->Arg(7)->Unit(benchmark::kMillisecond);

static void BM_LinearPath(benchmark::State& state)
{
    std::vector<Point> buf;
    const int len = static_cast<int>(state.range(0));
    int k = 0;
    for (auto _ : state)
    {
        buf.clear();
        append_linear_path({0, 0, 0}, {len, k % (len + 1), 0}, buf);
        benchmark::DoNotOptimize(buf.data());
        ++k;
    }
}
BENCHMARK(BM_LinearPath)->Arg(8)->Arg(32);

static void BM_RunScalp(benchmark::State& state)
{
    ScalpParams p;
    p.k = 250;
    p.path_cache = static_cast<PathCache>(state.range(0));
    const LabImage& lab = bsd_sized();
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(run_scalp(lab, p));
    }
}
BENCHMARK(BM_RunScalp)
    ->Arg(static_cast<int>(PathCache::off))
    ->Arg(static_cast<int>(PathCache::exact))
    ->Arg(static_cast<int>(PathCache::approximate))
    ->Unit(benchmark::kMillisecond);

static void BM_RunScalpWithPrior(benchmark::State& state)
{
    const LabImage& lab = bsd_sized();
    ContourMap prior(lab.extent(), 0.0);
    for (int y = 0; y < lab.extent().height; ++y)
        for (int x = 0; x < lab.extent().width; ++x)
            prior.at(x, y) = (x % 37 == 0 || y % 29 == 0) ? 1.0 : 0.0;
    ScalpParams p;
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(run_scalp(lab, p, &prior));
    }
}
BENCHMARK(BM_RunScalpWithPrior)->Unit(benchmark::kMillisecond);

static void BM_Evaluate(benchmark::State& state)
{
    const LabImage& lab = bsd_sized();
    ScalpParams p;
    const LabelMap s = run_scalp(lab, p);
    p.k = 20;
    const GroundTruthSet gts{run_scalp(lab, p)};
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(evaluate(s, gts));
    }
}
BENCHMARK(BM_Evaluate)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
