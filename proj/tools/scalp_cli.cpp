#include "scalp/scalp.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace scalp;

namespace {

// JSON config: top-level keys are option long names (without dashes), arrays
// become multiple values. An object under a subcommand name is also accepted.
class JsonConfig : public CLI::Config
{
public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override
    {
        nlohmann::json j;
        for (const CLI::Option* opt : app->get_options({}))
        {
            if (opt->get_lnames().empty() || !opt->get_configurable())
            {
                continue;
            }
            const std::string& name = opt->get_lnames()[0];
            if (opt->count() > 0)
            {
                const auto& res = opt->results();
                j[name] = res.size() == 1 ? nlohmann::json(res[0]) : nlohmann::json(res);
            }
            else if (default_also && !opt->get_default_str().empty())
            {
                j[name] = opt->get_default_str();
            }
        }
        return j.dump(2) + "\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override
    {
        nlohmann::json j;
        try
        {
            j = nlohmann::json::parse(input);
        }
        catch (const nlohmann::json::exception& e)
        {
            throw CLI::ConversionError(std::string("invalid JSON config: ") + e.what());
        }
        if (!j.is_object())
        {
            throw CLI::ConversionError("JSON config must be an object");
        }
        std::vector<CLI::ConfigItem> items;
        collect(j, {}, items);
        return items;
    }

private:
    static std::string scalar(const nlohmann::json& v)
    {
        return v.is_string() ? v.get<std::string>() : v.dump();
    }

    static void collect(const nlohmann::json& obj, const std::vector<std::string>& parents,
                        std::vector<CLI::ConfigItem>& items)
    {
        for (const auto& [key, value] : obj.items())
        {
            if (value.is_object())
            {
                auto nested = parents;
                nested.push_back(key);
                collect(value, nested, items);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (value.is_array())
            {
                for (const auto& v : value)
                {
                    item.inputs.push_back(scalar(v));
                }
            }
            else
            {
                item.inputs.push_back(scalar(value));
            }
            items.push_back(std::move(item));
        }
    }
};

struct EngineFlags
{
    ScalpParams params;
    std::string path_cache = "off";
    double noise_var = 0.0;
    std::string contour;
};

void add_engine_flags(CLI::App* cmd, EngineFlags& f)
{
    cmd->add_option("--k", f.params.k, "Target number of superpixels")->capture_default_str();
    cmd->add_option("--m2-scale", f.params.m2_scale, "Compactness: m^2 = value * r^2")->capture_default_str();
    cmd->add_option("--lambda", f.params.lambda, "Weight of the pixel's own color distance")->capture_default_str();
    cmd->add_option("--gamma", f.params.gamma, "Contour prior weight")->capture_default_str();
    cmd->add_option("--n", f.params.n, "Neighborhood half-size")->capture_default_str();
    cmd->add_option("--sigma", f.params.sigma, "Neighborhood color similarity scale")->capture_default_str();
    cmd->add_option("--iters", f.params.iterations, "Clustering iterations")->capture_default_str();
    cmd->add_option("--seed", f.params.rng_seed, "Seed for noise and region partitioning")->capture_default_str();
    cmd->add_option("--path-cache", f.path_cache, "Path distance memo: off, exact, approximate")
        ->check(CLI::IsMember({"off", "exact", "approximate"}))
        ->capture_default_str();
}

void add_image_flags(CLI::App* cmd, EngineFlags& f)
{
    add_engine_flags(cmd, f);
    cmd->add_option("--contour", f.contour, "Contour prior map (8/16-bit PGM or PNG)");
    cmd->add_option("--noise-var", f.noise_var, "Variance of Gaussian noise added to the input")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
}

ScalpParams resolved(const EngineFlags& f)
{
    ScalpParams p = f.params;
    if (f.path_cache == "exact")
    {
        p.path_cache = PathCache::exact;
    }
    else if (f.path_cache == "approximate")
    {
        p.path_cache = PathCache::approximate;
    }
    return p;
}

struct Outputs
{
    std::string labels;
    std::string overlay;
    std::string dir;
};

void add_output_flags(CLI::App* cmd, Outputs& o)
{
    cmd->add_option("--out-labels", o.labels, "Label map output (.pgm 16-bit or .csv)");
    cmd->add_option("--out-overlay", o.overlay, "Boundary overlay output (.png or .ppm)");
    cmd->add_option("--out-dir", o.dir, "Directory for per-input outputs when several inputs are given");
}

void write_labels(const fs::path& path, const LabelMap& labels)
{
    if (path.extension() == ".csv")
    {
        write_label_csv(path, labels);
    }
    else
    {
        write_label_pgm(path, labels);
    }
}

void write_image(const fs::path& path, const RgbImage& image)
{
    if (path.extension() == ".ppm")
    {
        write_ppm(path, image);
    }
    else
    {
        write_png(path, image);
    }
}

struct Target
{
    fs::path input;
    fs::path labels;
    fs::path overlay;
};

std::vector<Target> plan_outputs(const std::vector<std::string>& inputs, const Outputs& o,
                                 const std::string& label_ext)
{
    std::vector<Target> targets;
    if (inputs.size() == 1 && o.dir.empty())
    {
        targets.push_back({inputs[0], o.labels, o.overlay});
        return targets;
    }
    if (o.dir.empty() || !o.labels.empty() || !o.overlay.empty())
    {
        throw std::invalid_argument("several inputs require --out-dir instead of --out-labels/--out-overlay");
    }
    fs::create_directories(o.dir);
    for (const auto& in : inputs)
    {
        const std::string stem = fs::path(in).stem().string();
        targets.push_back({in, fs::path(o.dir) / (stem + label_ext), fs::path(o.dir) / (stem + "_overlay.png")});
    }
    return targets;
}

// Runs `job` over every target on up to `threads` workers; exceptions propagate
// in input order.
template <typename Job>
void for_each_target(const std::vector<Target>& targets, unsigned threads, Job job)
{
    threads = std::max(1u, threads);
    for (std::size_t begin = 0; begin < targets.size(); begin += threads)
    {
        const std::size_t end = std::min(targets.size(), begin + threads);
        std::vector<std::future<void>> batch;
        for (std::size_t i = begin; i < end; ++i)
        {
            batch.push_back(std::async(threads == 1 ? std::launch::deferred : std::launch::async, job,
                                       std::cref(targets[i])));
        }
        for (auto& f : batch)
        {
            f.get();
        }
    }
}

RgbImage load_input(const fs::path& path, const EngineFlags& f)
{
    RgbImage image = read_rgb(path);
    if (f.noise_var > 0.0)
    {
        image = add_gaussian_noise(image, f.noise_var, f.params.rng_seed);
    }
    return image;
}

std::optional<ContourMap> load_prior(const EngineFlags& f, const Extent& extent)
{
    if (f.contour.empty())
    {
        return std::nullopt;
    }
    return load_contour_map(f.contour, &extent);
}

void save_result(const Target& t, const RgbImage& image, const LabelMap& labels)
{
    if (!t.labels.empty())
    {
        write_labels(t.labels, labels);
    }
    if (!t.overlay.empty())
    {
        write_image(t.overlay, boundary_overlay(image, labels));
    }
}

std::vector<int> parse_int_list(const std::string& text)
{
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        if (!item.empty())
        {
            out.push_back(std::stoi(item));
        }
    }
    return out;
}

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        if (!item.empty())
        {
            out.push_back(item);
        }
    }
    return out;
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

struct MetricRow
{
    std::string file;
    int width = 0;
    int height = 0;
    MetricReport report;
    std::optional<double> max_f;
};

void write_metrics_csv(const fs::path& path, const std::vector<MetricRow>& rows, const MetricRow& mean)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw IoError("cannot write " + path.string());
    }
    out << "file,width,height,superpixels,annotators,asa,br,cd,src,max_f\n";
    auto line = [&](const MetricRow& r) {
        out << r.file << ',' << r.width << ',' << r.height << ',' << r.report.superpixels << ','
            << r.report.annotators << ',' << fmt(r.report.asa) << ',' << fmt(r.report.br) << ','
            << fmt(r.report.cd) << ',' << fmt(r.report.src) << ',' << (r.max_f ? fmt(*r.max_f) : "") << '\n';
    };
    for (const auto& r : rows)
    {
        line(r);
    }
    line(mean);
}

nlohmann::json row_json(const MetricRow& r)
{
    nlohmann::json j{{"file", r.file},
                     {"width", r.width},
                     {"height", r.height},
                     {"superpixels", r.report.superpixels},
                     {"annotators", r.report.annotators},
                     {"asa", r.report.asa},
                     {"br", r.report.br},
                     {"cd", r.report.cd},
                     {"src", r.report.src}};
    j["max_f"] = r.max_f ? nlohmann::json(*r.max_f) : nlohmann::json(nullptr);
    return j;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Superpixel and supervoxel decomposition with linear-path color and contour features"};
    app.config_formatter(std::make_shared<JsonConfig>());
    app.require_subcommand(1);

    unsigned threads = 1;

    // decompose
    auto* decompose = app.add_subcommand("decompose", "Decompose images into superpixels");
    decompose->set_config("--config", "", "JSON file supplying any flag; flags override it");
    std::vector<std::string> d_inputs;
    EngineFlags d_flags;
    Outputs d_out;
    decompose->add_option("inputs", d_inputs, "Input images (PNG or PPM)")->required()->check(CLI::ExistingFile);
    add_image_flags(decompose, d_flags);
    add_output_flags(decompose, d_out);
    decompose->add_option("--threads", threads, "Inputs processed concurrently")->capture_default_str();

    // prior
    auto* prior = app.add_subcommand("prior", "Build a contour prior from multiscale decompositions");
    prior->set_config("--config", "", "JSON file supplying any flag; flags override it");
    std::string p_input;
    std::string p_scales;
    double p_threshold = 0.5;
    std::string p_out;
    std::string p_out_average;
    EngineFlags p_flags;
    prior->add_option("input", p_input, "Input image")->required()->check(CLI::ExistingFile);
    prior->add_option("--scales", p_scales, "Comma-separated superpixel counts (default 25..1000)");
    prior->add_option("--threshold", p_threshold, "Average boundary values below it are zeroed")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    prior->add_option("--out", p_out, "Thresholded prior (16-bit PGM)")->required();
    prior->add_option("--out-average", p_out_average, "Unthresholded average boundary map (16-bit PGM)");
    prior->add_option("--noise-var", p_flags.noise_var, "Variance of Gaussian noise added to the input")
        ->check(CLI::NonNegativeNumber);
    add_engine_flags(prior, p_flags);
    prior->add_option("--threads", threads, "Scales processed concurrently")->capture_default_str();

    // hc
    auto* hc = app.add_subcommand("hc", "Decompose under a hard constraint from a hierarchical contour map");
    hc->set_config("--config", "", "JSON file supplying any flag; flags override it");
    std::vector<std::string> h_inputs;
    std::vector<std::string> h_ucm;
    HcOptions h_opts;
    bool h_soft = false;
    EngineFlags h_flags;
    Outputs h_out;
    std::string h_out_regions;
    hc->add_option("inputs", h_inputs, "Input images")->required()->check(CLI::ExistingFile);
    hc->add_option("--ucm", h_ucm, "Hierarchical contour map per input (PGM or PNG)")->required()->check(CLI::ExistingFile);
    hc->add_option("--tau", h_opts.tau, "Threshold on the hierarchical map")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    hc->add_option("--t", h_opts.t, "Regions smaller than t*N/K are merged")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    hc->add_flag("--soft-init", h_soft, "Use the regions for initialization only");
    hc->add_option("--out-regions", h_out_regions, "Merged region map (16-bit PGM), single input only");
    add_image_flags(hc, h_flags);
    add_output_flags(hc, h_out);
    hc->add_option("--threads", threads, "Inputs processed concurrently")->capture_default_str();

    // metrics
    auto* metrics = app.add_subcommand("metrics", "Evaluate decompositions against ground truth");
    metrics->set_config("--config", "", "JSON file supplying any flag; flags override it");
    std::vector<std::string> m_labels;
    std::vector<std::string> m_gt;
    std::vector<std::string> m_boundary;
    double m_epsilon = 2.0;
    std::string m_csv;
    std::string m_json;
    metrics->add_option("--labels", m_labels, "Decomposition label maps")->required()->check(CLI::ExistingFile);
    metrics->add_option("--gt", m_gt, "Per label map: comma-separated annotator label maps")->required();
    metrics->add_option("--boundary-map", m_boundary, "Per label map: averaged boundary map for the PR curve");
    metrics->add_option("--epsilon", m_epsilon, "Boundary matching distance (strict)")->capture_default_str();
    metrics->add_option("--out-csv", m_csv, "CSV report");
    metrics->add_option("--out-json", m_json, "JSON report");
    metrics->add_option("--threads", threads, "Images evaluated concurrently")->capture_default_str();

    // decompose3d
    auto* decompose3d = app.add_subcommand("decompose3d", "Decompose a volume into supervoxels");
    decompose3d->set_config("--config", "", "JSON file supplying any flag; flags override it");
    std::string v_input;
    std::string v_out;
    EngineFlags v_flags;
    decompose3d->add_option("input", v_input, "Raw volume with a JSON sidecar")->required()->check(CLI::ExistingFile);
    decompose3d->add_option("--out-labels", v_out, "Raw uint32 label volume (JSON sidecar written alongside)")->required();
    add_engine_flags(decompose3d, v_flags);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        return app.exit(e);
    }

    try
    {
        if (*decompose)
        {
            const ScalpParams params = resolved(d_flags);
            const auto targets = plan_outputs(d_inputs, d_out, ".pgm");
            for_each_target(targets, threads, [&](const Target& t) {
                const RgbImage image = load_input(t.input, d_flags);
                const auto prior_map = load_prior(d_flags, image.extent());
                const LabelMap labels =
                    run_scalp(rgb_to_lab(image), params, prior_map ? &*prior_map : nullptr);
                save_result(t, image, labels);
            });
        }
        else if (*prior)
        {
            ScalpParams params = resolved(p_flags);
            const auto scales = p_scales.empty() ? default_prior_scales() : parse_int_list(p_scales);
            const RgbImage image = load_input(p_input, p_flags);
            const LabImage lab = rgb_to_lab(image);
            const ContourMap average = multiscale_boundary_prior(lab, scales, params, 0.0, threads);
            ContourMap thresholded = average;
            for (auto& v : thresholded)
            {
                v = v >= p_threshold ? v : 0.0;
            }
            write_unit_map_pgm(p_out, thresholded);
            if (!p_out_average.empty())
            {
                write_unit_map_pgm(p_out_average, average);
            }
        }
        else if (*hc)
        {
            if (h_ucm.size() != h_inputs.size())
            {
                throw std::invalid_argument("--ucm needs one map per input");
            }
            if (!h_out_regions.empty() && h_inputs.size() != 1)
            {
                throw std::invalid_argument("--out-regions requires a single input");
            }
            h_opts.constrain = !h_soft;
            const ScalpParams params = resolved(h_flags);
            const auto targets = plan_outputs(h_inputs, h_out, ".pgm");
            for_each_target(targets, threads, [&](const Target& t) {
                const auto idx = static_cast<std::size_t>(&t - targets.data());
                const RgbImage image = load_input(t.input, h_flags);
                const HierarchicalMap ucm = load_contour_map(h_ucm[idx], &image.extent());
                if (const auto open = count_open_contours(ucm, h_opts.tau); open > 0)
                {
                    std::cerr << "scalp: warning: " << h_ucm[idx] << ": " << open
                              << " contour component(s) do not close at tau=" << h_opts.tau << "\n";
                }
                const auto prior_map = load_prior(h_flags, image.extent());
                const HcResult r = run_scalp_hc(rgb_to_lab(image), params, prior_map ? &*prior_map : nullptr,
                                                ucm, h_opts);
                save_result(t, image, r.labels);
                if (!h_out_regions.empty())
                {
                    write_label_pgm(h_out_regions, r.regions.labels);
                }
            });
        }
        else if (*metrics)
        {
            if (m_gt.size() != m_labels.size())
            {
                throw std::invalid_argument("--gt needs one annotator list per label map");
            }
            if (!m_boundary.empty() && m_boundary.size() != m_labels.size())
            {
                throw std::invalid_argument("--boundary-map needs one map per label map");
            }
            std::vector<Target> targets;
            for (const auto& l : m_labels)
            {
                targets.push_back({l, {}, {}});
            }
            std::vector<MetricRow> rows(targets.size());
            for_each_target(targets, threads, [&](const Target& t) {
                const auto idx = static_cast<std::size_t>(&t - targets.data());
                const LabelMap s = read_label_map(t.input);
                GroundTruthSet gts;
                for (const auto& g : split_list(m_gt[idx]))
                {
                    gts.push_back(read_label_map(g));
                }
                MetricRow& row = rows[idx];
                row.file = t.input.filename().string();
                row.width = s.width();
                row.height = s.height();
                row.report = evaluate(s, gts, m_epsilon);
                if (!m_boundary.empty())
                {
                    const Extent e = s.extent();
                    row.max_f = pr_curve(load_contour_map(m_boundary[idx], &e), gts, m_epsilon).max_f;
                }
            });

            MetricRow mean;
            mean.file = "mean";
            std::size_t with_f = 0;
            double sum_f = 0.0;
            for (const auto& r : rows)
            {
                mean.report.asa += r.report.asa;
                mean.report.br += r.report.br;
                mean.report.cd += r.report.cd;
                mean.report.src += r.report.src;
                mean.report.superpixels += r.report.superpixels;
                mean.report.annotators += r.report.annotators;
                if (r.max_f)
                {
                    sum_f += *r.max_f;
                    ++with_f;
                }
            }
            const auto n = static_cast<double>(rows.size());
            mean.report.asa /= n;
            mean.report.br /= n;
            mean.report.cd /= n;
            mean.report.src /= n;
            mean.report.superpixels = static_cast<std::size_t>(std::lround(mean.report.superpixels / n));
            mean.report.annotators = static_cast<std::size_t>(std::lround(mean.report.annotators / n));
            if (with_f > 0)
            {
                mean.max_f = sum_f / static_cast<double>(with_f);
            }

            if (!m_csv.empty())
            {
                write_metrics_csv(m_csv, rows, mean);
            }
            nlohmann::json report{{"epsilon", m_epsilon}, {"images", nlohmann::json::array()}};
            for (const auto& r : rows)
            {
                report["images"].push_back(row_json(r));
            }
            report["mean"] = row_json(mean);
            if (!m_json.empty())
            {
                std::ofstream out(m_json, std::ios::binary);
                if (!out)
                {
                    throw IoError("cannot write " + m_json);
                }
                out << report.dump(2) << "\n";
            }
            if (m_csv.empty() && m_json.empty())
            {
                std::cout << report.dump(2) << "\n";
            }
        }
        else if (*decompose3d)
        {
            const Volume volume = read_volume(v_input);
            write_label_volume(v_out, run_scalp_3d(volume, resolved(v_flags)));
        }
    }
    catch (const std::exception& e)
    {
        std::cerr << "scalp: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
