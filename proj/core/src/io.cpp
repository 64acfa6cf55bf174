#include "scalp/io.hpp"

#include <nlohmann/json.hpp>
#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

namespace scalp {

namespace fs = std::filesystem;

namespace {

std::string lower_extension(const fs::path& path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

bool is_png(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    unsigned char sig[8] = {};
    in.read(reinterpret_cast<char*>(sig), 8);
    return in.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

std::vector<unsigned char> read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw IoError("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---- Netpbm ---------------------------------------------------------------

struct Netpbm
{
    std::string magic;
    int width = 0;
    int height = 0;
    int max_value = 0;
    std::vector<unsigned char> payload;
};

Netpbm read_netpbm(const fs::path& path)
{
    const auto bytes = read_file(path);
    std::size_t pos = 0;
    auto skip_space = [&] {
        while (pos < bytes.size())
        {
            if (bytes[pos] == '#')
            {
                while (pos < bytes.size() && bytes[pos] != '\n')
                {
                    ++pos;
                }
            }
            else if (std::isspace(bytes[pos]))
            {
                ++pos;
            }
            else
            {
                break;
            }
        }
    };
    auto token = [&] {
        skip_space();
        std::string t;
        while (pos < bytes.size() && !std::isspace(bytes[pos]) && bytes[pos] != '#')
        {
            t.push_back(static_cast<char>(bytes[pos++]));
        }
        return t;
    };
    auto number = [&] {
        const std::string t = token();
        try
        {
            return std::stoi(t);
        }
        catch (const std::exception&)
        {
            throw IoError(path.string() + ": malformed netpbm header");
        }
    };

    Netpbm img;
    img.magic = token();
    if (img.magic != "P5" && img.magic != "P6")
    {
        throw IoError(path.string() + ": unsupported netpbm type '" + img.magic + "'");
    }
    img.width = number();
    img.height = number();
    img.max_value = number();
    if (img.width < 1 || img.height < 1 || img.max_value < 1 || img.max_value > 65535)
    {
        throw IoError(path.string() + ": invalid netpbm header");
    }
    ++pos; // single whitespace after maxval
    const std::size_t channels = img.magic == "P6" ? 3 : 1;
    const std::size_t bytes_per_sample = img.max_value > 255 ? 2 : 1;
    const std::size_t need = static_cast<std::size_t>(img.width) * img.height * channels * bytes_per_sample;
    if (bytes.size() < pos + need)
    {
        throw IoError(path.string() + ": truncated netpbm data");
    }
    img.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                       bytes.begin() + static_cast<std::ptrdiff_t>(pos + need));
    return img;
}

void write_netpbm(const fs::path& path, const std::string& magic, int width, int height,
                  int max_value, const std::vector<unsigned char>& payload)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw IoError("cannot write " + path.string());
    }
    out << magic << '\n' << width << ' ' << height << '\n' << max_value << '\n';
    out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    if (!out)
    {
        throw IoError("write failed: " + path.string());
    }
}

// ---- PNG -------------------------------------------------------------------

struct PngPixels
{
    int width = 0;
    int height = 0;
    int channels = 0; // 1 or 3 after transforms
    int bit_depth = 8;
    std::vector<unsigned char> rows; // big-endian samples for 16 bit
};

struct FileCloser
{
    void operator()(std::FILE* f) const { std::fclose(f); }
};

PngPixels read_png(const fs::path& path)
{
    std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.string().c_str(), "rb"));
    if (!file)
    {
        throw IoError("cannot open " + path.string());
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (png == nullptr || info == nullptr)
    {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng initialization failed");
    }

    PngPixels out;
    std::vector<png_bytep> row_ptrs;
    if (setjmp(png_jmpbuf(png)))
    {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path.string() + ": corrupt PNG");
    }
    png_init_io(png, file.get());
    png_read_info(png, info);

    const auto color_type = png_get_color_type(png, info);
    const auto depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE)
    {
        png_set_palette_to_rgb(png);
    }
    if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8)
    {
        png_set_expand_gray_1_2_4_to_8(png);
    }
    if (png_get_valid(png, info, PNG_INFO_tRNS))
    {
        png_set_tRNS_to_alpha(png);
    }
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.channels = png_get_channels(png, info);
    out.bit_depth = png_get_bit_depth(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    out.rows.resize(stride * static_cast<std::size_t>(out.height));
    row_ptrs.resize(static_cast<std::size_t>(out.height));
    for (int y = 0; y < out.height; ++y)
    {
        row_ptrs[static_cast<std::size_t>(y)] = out.rows.data() + stride * static_cast<std::size_t>(y);
    }
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

void write_png_raw(const fs::path& path, int width, int height, int color_type, int bit_depth,
                   const std::vector<unsigned char>& rows)
{
    std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.string().c_str(), "wb"));
    if (!file)
    {
        throw IoError("cannot write " + path.string());
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (png == nullptr || info == nullptr)
    {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng initialization failed");
    }
    std::vector<png_bytep> row_ptrs(static_cast<std::size_t>(height));
    const std::size_t stride = rows.size() / static_cast<std::size_t>(height);
    for (int y = 0; y < height; ++y)
    {
        row_ptrs[static_cast<std::size_t>(y)] =
            const_cast<png_bytep>(rows.data() + stride * static_cast<std::size_t>(y));
    }
    if (setjmp(png_jmpbuf(png)))
    {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG encoding failed: " + path.string());
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, row_ptrs.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

std::uint16_t sample_at(const std::vector<unsigned char>& bytes, std::size_t i, bool wide)
{
    return wide ? static_cast<std::uint16_t>((bytes[2 * i] << 8) | bytes[2 * i + 1]) : bytes[i];
}

std::uint8_t to_8bit(std::uint16_t v, int max_value)
{
    if (max_value == 255)
    {
        return static_cast<std::uint8_t>(v);
    }
    return static_cast<std::uint8_t>(std::lround(255.0 * v / max_value));
}

// ---- raw volumes -----------------------------------------------------------

fs::path sidecar_of(const fs::path& raw)
{
    fs::path p = raw;
    p += ".json";
    return p;
}

template <typename T>
T read_le(const unsigned char* p)
{
    T v{};
    std::memcpy(&v, p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1)
    {
        auto* b = reinterpret_cast<unsigned char*>(&v);
        std::reverse(b, b + sizeof(T));
    }
    return v;
}

template <typename T>
void append_le(std::vector<unsigned char>& out, T v)
{
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1)
    {
        std::reverse(b, b + sizeof(T));
    }
    out.insert(out.end(), b, b + sizeof(T));
}

nlohmann::json read_sidecar(const fs::path& raw)
{
    std::ifstream in(sidecar_of(raw));
    if (!in)
    {
        throw IoError("missing volume header " + sidecar_of(raw).string());
    }
    try
    {
        return nlohmann::json::parse(in);
    }
    catch (const nlohmann::json::exception& e)
    {
        throw IoError(sidecar_of(raw).string() + ": " + e.what());
    }
}

void write_sidecar(const fs::path& raw, const nlohmann::json& header)
{
    std::ofstream out(sidecar_of(raw));
    if (!out)
    {
        throw IoError("cannot write " + sidecar_of(raw).string());
    }
    out << header.dump(2) << '\n';
}

} // namespace

RgbImage read_rgb(const fs::path& path)
{
    if (is_png(path))
    {
        const PngPixels png = read_png(path);
        const bool wide = png.bit_depth == 16;
        const int max_value = wide ? 65535 : 255;
        RgbImage img(png.width, png.height);
        for (std::size_t i = 0; i < img.size(); ++i)
        {
            if (png.channels == 1)
            {
                const auto g = to_8bit(sample_at(png.rows, i, wide), max_value);
                img[i] = {g, g, g};
            }
            else
            {
                img[i] = {to_8bit(sample_at(png.rows, 3 * i, wide), max_value),
                          to_8bit(sample_at(png.rows, 3 * i + 1, wide), max_value),
                          to_8bit(sample_at(png.rows, 3 * i + 2, wide), max_value)};
            }
        }
        return img;
    }

    const Netpbm pnm = read_netpbm(path);
    const bool wide = pnm.max_value > 255;
    RgbImage img(pnm.width, pnm.height);
    for (std::size_t i = 0; i < img.size(); ++i)
    {
        if (pnm.magic == "P5")
        {
            const auto g = to_8bit(sample_at(pnm.payload, i, wide), pnm.max_value);
            img[i] = {g, g, g};
        }
        else
        {
            img[i] = {to_8bit(sample_at(pnm.payload, 3 * i, wide), pnm.max_value),
                      to_8bit(sample_at(pnm.payload, 3 * i + 1, wide), pnm.max_value),
                      to_8bit(sample_at(pnm.payload, 3 * i + 2, wide), pnm.max_value)};
        }
    }
    return img;
}

void write_ppm(const fs::path& path, const RgbImage& image)
{
    std::vector<unsigned char> payload;
    payload.reserve(image.size() * 3);
    for (const Rgb8& px : image)
    {
        payload.insert(payload.end(), {px.r, px.g, px.b});
    }
    write_netpbm(path, "P6", image.width(), image.height(), 255, payload);
}

void write_png(const fs::path& path, const RgbImage& image)
{
    std::vector<unsigned char> rows;
    rows.reserve(image.size() * 3);
    for (const Rgb8& px : image)
    {
        rows.insert(rows.end(), {px.r, px.g, px.b});
    }
    write_png_raw(path, image.width(), image.height(), PNG_COLOR_TYPE_RGB, 8, rows);
}

GrayImage read_gray(const fs::path& path)
{
    GrayImage out;
    if (is_png(path))
    {
        const PngPixels png = read_png(path);
        if (png.channels != 1)
        {
            throw IoError(path.string() + ": expected a grayscale PNG");
        }
        const bool wide = png.bit_depth == 16;
        out.max_value = wide ? 65535 : 255;
        out.samples = Grid<std::uint16_t>(png.width, png.height);
        for (std::size_t i = 0; i < out.samples.size(); ++i)
        {
            out.samples[i] = sample_at(png.rows, i, wide);
        }
        return out;
    }
    const Netpbm pnm = read_netpbm(path);
    if (pnm.magic != "P5")
    {
        throw IoError(path.string() + ": expected a grayscale PGM (P5)");
    }
    const bool wide = pnm.max_value > 255;
    out.max_value = pnm.max_value;
    out.samples = Grid<std::uint16_t>(pnm.width, pnm.height);
    for (std::size_t i = 0; i < out.samples.size(); ++i)
    {
        out.samples[i] = sample_at(pnm.payload, i, wide);
    }
    return out;
}

void write_pgm(const fs::path& path, const GrayImage& image)
{
    const bool wide = image.max_value > 255;
    std::vector<unsigned char> payload;
    payload.reserve(image.samples.size() * (wide ? 2 : 1));
    for (const std::uint16_t v : image.samples)
    {
        if (wide)
        {
            payload.push_back(static_cast<unsigned char>(v >> 8));
        }
        payload.push_back(static_cast<unsigned char>(v & 0xFF));
    }
    write_netpbm(path, "P5", image.samples.width(), image.samples.height(), image.max_value, payload);
}

void write_label_pgm(const fs::path& path, const LabelMap& labels)
{
    if (labels.depth() != 1)
    {
        throw std::invalid_argument("write_label_pgm: volumes need write_label_volume");
    }
    GrayImage g{Grid<std::uint16_t>(labels.width(), labels.height()), 65535};
    for (std::size_t i = 0; i < labels.size(); ++i)
    {
        if (labels[i] < 0 || labels[i] > 65535)
        {
            throw std::invalid_argument("write_label_pgm: label outside [0,65535]");
        }
        g.samples[i] = static_cast<std::uint16_t>(labels[i]);
    }
    write_pgm(path, g);
}

LabelMap read_label_map(const fs::path& path)
{
    if (lower_extension(path) == ".csv")
    {
        return read_label_csv(path);
    }
    const GrayImage g = read_gray(path);
    LabelMap labels(g.samples.extent());
    for (std::size_t i = 0; i < labels.size(); ++i)
    {
        labels[i] = g.samples[i];
    }
    return labels;
}

void write_label_csv(const fs::path& path, const LabelMap& labels)
{
    std::ofstream out(path);
    if (!out)
    {
        throw IoError("cannot write " + path.string());
    }
    for (int y = 0; y < labels.height(); ++y)
    {
        for (int x = 0; x < labels.width(); ++x)
        {
            if (x > 0)
            {
                out << ',';
            }
            out << labels.at(x, y);
        }
        out << '\n';
    }
}

LabelMap read_label_csv(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw IoError("cannot open " + path.string());
    }
    std::vector<std::int32_t> values;
    int width = -1;
    int height = 0;
    std::string line;
    while (std::getline(in, line))
    {
        if (line.empty() || line == "\r")
        {
            continue;
        }
        std::stringstream row(line);
        std::string cell;
        int count = 0;
        while (std::getline(row, cell, ','))
        {
            try
            {
                values.push_back(std::stoi(cell));
            }
            catch (const std::exception&)
            {
                throw IoError(path.string() + ": bad label '" + cell + "'");
            }
            ++count;
        }
        if (width >= 0 && count != width)
        {
            throw IoError(path.string() + ": ragged CSV rows");
        }
        width = count;
        ++height;
    }
    if (height == 0 || width <= 0)
    {
        throw IoError(path.string() + ": empty label CSV");
    }
    LabelMap labels(width, height);
    std::copy(values.begin(), values.end(), labels.begin());
    return labels;
}

void write_unit_map_pgm(const fs::path& path, const Grid<double>& map)
{
    GrayImage g{Grid<std::uint16_t>(map.width(), map.height()), 65535};
    for (std::size_t i = 0; i < map.size(); ++i)
    {
        g.samples[i] = static_cast<std::uint16_t>(std::lround(std::clamp(map[i], 0.0, 1.0) * 65535.0));
    }
    write_pgm(path, g);
}

RgbImage boundary_overlay(const RgbImage& image, const LabelMap& labels, Rgb8 color)
{
    require_same_extent(image.extent(), labels.extent(), "boundary_overlay");
    RgbImage out = image;
    for (int y = 0; y < labels.height(); ++y)
    {
        for (int x = 0; x < labels.width(); ++x)
        {
            const auto v = labels.at(x, y);
            const bool edge = (x + 1 < labels.width() && labels.at(x + 1, y) != v) ||
                              (y + 1 < labels.height() && labels.at(x, y + 1) != v) ||
                              (x > 0 && labels.at(x - 1, y) != v) ||
                              (y > 0 && labels.at(x, y - 1) != v);
            if (edge)
            {
                out.at(x, y) = color;
            }
        }
    }
    return out;
}

Volume read_volume(const fs::path& raw_path)
{
    const nlohmann::json h = read_sidecar(raw_path);
    Extent e;
    int channels = 1;
    std::string dtype;
    try
    {
        e = {h.at("width").get<int>(), h.at("height").get<int>(), h.at("depth").get<int>()};
        channels = h.value("channels", 1);
        dtype = h.at("dtype").get<std::string>();
    }
    catch (const nlohmann::json::exception& ex)
    {
        throw IoError(sidecar_of(raw_path).string() + ": " + ex.what());
    }
    if (e.width < 1 || e.height < 1 || e.depth < 1 || (channels != 1 && channels != 3))
    {
        throw IoError(sidecar_of(raw_path).string() + ": invalid dimensions or channel count");
    }
    std::size_t width_bytes = 0;
    if (dtype == "uint8")
        width_bytes = 1;
    else if (dtype == "uint16")
        width_bytes = 2;
    else if (dtype == "float32")
        width_bytes = 4;
    else
        throw IoError(sidecar_of(raw_path).string() + ": unsupported dtype " + dtype);

    const auto bytes = read_file(raw_path);
    const std::size_t samples = e.size() * static_cast<std::size_t>(channels);
    if (bytes.size() != samples * width_bytes)
    {
        throw IoError(raw_path.string() + ": size does not match header");
    }
    Volume v(e, channels);
    auto out = v.values();
    for (std::size_t i = 0; i < samples; ++i)
    {
        const unsigned char* p = bytes.data() + i * width_bytes;
        double value = 0.0;
        if (width_bytes == 1)
            value = p[0];
        else if (width_bytes == 2)
            value = read_le<std::uint16_t>(p);
        else
            value = read_le<float>(p);
        if (!std::isfinite(value))
        {
            throw IoError(raw_path.string() + ": non-finite voxel value");
        }
        out[i] = value;
    }
    return v;
}

void write_volume(const fs::path& raw_path, const Volume& volume)
{
    std::vector<unsigned char> bytes;
    bytes.reserve(volume.values().size() * 4);
    for (const double v : volume.values())
    {
        append_le(bytes, static_cast<float>(v));
    }
    std::ofstream out(raw_path, std::ios::binary);
    if (!out)
    {
        throw IoError("cannot write " + raw_path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    const Extent& e = volume.extent();
    write_sidecar(raw_path, {{"width", e.width},
                             {"height", e.height},
                             {"depth", e.depth},
                             {"channels", volume.channels()},
                             {"dtype", "float32"}});
}

void write_label_volume(const fs::path& raw_path, const LabelMap& labels)
{
    std::vector<unsigned char> bytes;
    bytes.reserve(labels.size() * 4);
    for (const auto v : labels)
    {
        append_le(bytes, static_cast<std::uint32_t>(v));
    }
    std::ofstream out(raw_path, std::ios::binary);
    if (!out)
    {
        throw IoError("cannot write " + raw_path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    const Extent& e = labels.extent();
    write_sidecar(raw_path, {{"width", e.width},
                             {"height", e.height},
                             {"depth", e.depth},
                             {"channels", 1},
                             {"dtype", "uint32"}});
}

LabelMap read_label_volume(const fs::path& raw_path)
{
    const nlohmann::json h = read_sidecar(raw_path);
    Extent e;
    try
    {
        e = {h.at("width").get<int>(), h.at("height").get<int>(), h.at("depth").get<int>()};
        if (h.at("dtype").get<std::string>() != "uint32")
        {
            throw IoError(sidecar_of(raw_path).string() + ": label volumes must be uint32");
        }
    }
    catch (const nlohmann::json::exception& ex)
    {
        throw IoError(sidecar_of(raw_path).string() + ": " + ex.what());
    }
    const auto bytes = read_file(raw_path);
    if (e.width < 1 || e.height < 1 || e.depth < 1 || bytes.size() != e.size() * 4)
    {
        throw IoError(raw_path.string() + ": size does not match header");
    }
    LabelMap labels(e);
    for (std::size_t i = 0; i < labels.size(); ++i)
    {
        labels[i] = static_cast<std::int32_t>(read_le<std::uint32_t>(bytes.data() + 4 * i));
    }
    return labels;
}

} // namespace scalp
