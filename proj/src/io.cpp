#include "radsim/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace radsim {
namespace {

constexpr std::uint32_t kFormatVersion = 1;

// The toolkit only targets little-endian hosts; byte-level appends below
// assume it. Guard rather than silently writing a byte-swapped file.
static_assert(std::endian::native == std::endian::little, "little-endian host required");

void append_raw(std::string& out, const void* data, std::size_t size) {
    out.append(static_cast<const char*>(data), size);
}

void append_u32(std::string& out, std::uint32_t v) { append_raw(out, &v, sizeof v); }
void append_u64(std::string& out, std::uint64_t v) { append_raw(out, &v, sizeof v); }
void append_f32(std::string& out, float v) { append_raw(out, &v, sizeof v); }
void append_f64(std::string& out, double v) { append_raw(out, &v, sizeof v); }

class Cursor {
  public:
    Cursor(const std::string& bytes, std::string path) : bytes_(bytes), path_(std::move(path)) {}

    void read_raw(void* out, std::size_t size) {
        if (pos_ + size > bytes_.size()) {
            throw std::runtime_error(path_ + ": file truncated");
        }
        std::memcpy(out, bytes_.data() + pos_, size);
        pos_ += size;
    }

    std::uint32_t read_u32() { std::uint32_t v; read_raw(&v, sizeof v); return v; }
    std::uint64_t read_u64() { std::uint64_t v; read_raw(&v, sizeof v); return v; }
    float read_f32() { float v; read_raw(&v, sizeof v); return v; }
    double read_f64() { double v; read_raw(&v, sizeof v); return v; }

    void expect_magic(const char* magic) {
        char got[8];
        read_raw(got, sizeof got);
        if (std::memcmp(got, magic, 8) != 0) {
            throw std::runtime_error(path_ + ": bad magic, expected " + std::string(magic, 8));
        }
        std::uint32_t version = read_u32();
        if (version != kFormatVersion) {
            throw std::runtime_error(path_ + ": unsupported format version " + std::to_string(version));
        }
    }

    void expect_end() const {
        if (pos_ != bytes_.size()) {
            throw std::runtime_error(path_ + ": trailing bytes after payload");
        }
    }

    const std::string& path() const { return path_; }

  private:
    const std::string& bytes_;
    std::string path_;
    std::size_t pos_ = 0;
};

void begin(std::string& out, const char* magic) {
    append_raw(out, magic, 8);
    append_u32(out, kFormatVersion);
}

void append_f32_span(std::string& out, const std::vector<float>& values) {
    append_raw(out, values.data(), values.size() * sizeof(float));
}

void read_f32_span(Cursor& in, std::vector<float>& values, std::size_t count) {
    values.resize(count);
    in.read_raw(values.data(), count * sizeof(float));
}

}  // namespace

void atomic_write_file(const std::string& path, const std::string& bytes) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error(path + ": cannot open for writing");
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            throw std::runtime_error(path + ": write failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        throw std::runtime_error(path + ": rename failed: " + ec.message());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error(path + ": cannot open for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!in.good() && !in.eof()) {
        throw std::runtime_error(path + ": read failed");
    }
    return std::move(buf).str();
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= bytes[i];
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::uint64_t file_digest(const std::string& path) {
    std::string bytes = read_file(path);
    return fnv1a64(bytes.data(), bytes.size());
}

std::string to_hex(std::uint64_t value) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::uint64_t from_hex(const std::string& text) {
    std::size_t consumed = 0;
    std::uint64_t value = std::stoull(text, &consumed, 16);
    if (consumed != text.size()) {
        throw std::runtime_error("bad hex literal: " + text);
    }
    return value;
}

void save_pointcloud(const std::vector<ReflectionPoint>& points, const std::string& path) {
    std::string out;
    begin(out, "RSIMPC01");
    append_u64(out, points.size());
    for (const auto& p : points) {
        append_f32(out, static_cast<float>(p.x_m));
        append_f32(out, static_cast<float>(p.y_m));
        append_f32(out, static_cast<float>(p.radial_velocity_mps));
        append_f32(out, static_cast<float>(std::abs(p.reflectivity)));
        append_f32(out, static_cast<float>(std::arg(p.reflectivity)));
    }
    atomic_write_file(path, out);
}

std::vector<ReflectionPoint> load_pointcloud(const std::string& path) {
    std::string bytes = read_file(path);
    Cursor in(bytes, path);
    in.expect_magic("RSIMPC01");
    std::uint64_t count = in.read_u64();
    std::vector<ReflectionPoint> points;
    points.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        ReflectionPoint p;
        p.x_m = in.read_f32();
        p.y_m = in.read_f32();
        p.radial_velocity_mps = in.read_f32();
        double mag = in.read_f32();
        double phase = in.read_f32();
        p.reflectivity = std::polar(mag, phase);
        points.push_back(p);
    }
    in.expect_end();
    return points;
}

void save_cube(const RawDataCube& cube, const std::string& path) {
    std::string out;
    begin(out, "RSIMDC01");
    append_u32(out, static_cast<std::uint32_t>(cube.num_rx));
    append_u32(out, static_cast<std::uint32_t>(cube.num_chirps));
    append_u32(out, static_cast<std::uint32_t>(cube.num_samples));
    append_u64(out, cube.skipped_points);
    for (std::size_t m = 0; m < cube.num_chirps; ++m) {
        append_u32(out, static_cast<std::uint32_t>(cube.tx_schedule[m]));
    }
    for (const auto& s : cube.samples) {
        append_f32(out, static_cast<float>(s.real()));
        append_f32(out, static_cast<float>(s.imag()));
    }
    atomic_write_file(path, out);
}

RawDataCube load_cube(const std::string& path) {
    std::string bytes = read_file(path);
    Cursor in(bytes, path);
    in.expect_magic("RSIMDC01");
    RawDataCube cube;
    cube.num_rx = in.read_u32();
    cube.num_chirps = in.read_u32();
    cube.num_samples = in.read_u32();
    cube.skipped_points = in.read_u64();
    cube.tx_schedule.resize(cube.num_chirps);
    for (auto& tx : cube.tx_schedule) {
        tx = in.read_u32();
    }
    std::size_t total = cube.num_rx * cube.num_chirps * cube.num_samples;
    cube.samples.resize(total);
    for (auto& s : cube.samples) {
        float re = in.read_f32();
        float im = in.read_f32();
        s = {re, im};
    }
    in.expect_end();
    return cube;
}

void save_image(const RadarImage& image, const std::string& path) {
    std::string out;
    begin(out, "RSIMIM01");
    append_u32(out, 3);
    append_u32(out, static_cast<std::uint32_t>(image.num_range_bins));
    append_u32(out, static_cast<std::uint32_t>(image.num_angle_bins));
    append_f64(out, image.range_bin_spacing_m);
    append_f32_span(out, image.real);
    append_f32_span(out, image.imag);
    append_f32_span(out, image.doppler_mps);
    atomic_write_file(path, out);
}

RadarImage load_image(const std::string& path) {
    std::string bytes = read_file(path);
    Cursor in(bytes, path);
    in.expect_magic("RSIMIM01");
    std::uint32_t channels = in.read_u32();
    if (channels != 3) {
        throw std::runtime_error(path + ": expected 3 channels, found " + std::to_string(channels));
    }
    RadarImage image;
    image.num_range_bins = in.read_u32();
    image.num_angle_bins = in.read_u32();
    image.range_bin_spacing_m = in.read_f64();
    std::size_t pixels = image.num_range_bins * image.num_angle_bins;
    read_f32_span(in, image.real, pixels);
    read_f32_span(in, image.imag, pixels);
    read_f32_span(in, image.doppler_mps, pixels);
    in.expect_end();
    return image;
}

void save_probability_map(const ProbabilityMap& map, const std::string& path) {
    std::string out;
    begin(out, "RSIMPM01");
    append_u32(out, static_cast<std::uint32_t>(map.num_range_bins));
    append_u32(out, static_cast<std::uint32_t>(map.num_angle_bins));
    append_f64(out, map.range_bin_spacing_m);
    append_f32_span(out, map.values);
    atomic_write_file(path, out);
}

ProbabilityMap load_probability_map(const std::string& path) {
    std::string bytes = read_file(path);
    Cursor in(bytes, path);
    in.expect_magic("RSIMPM01");
    ProbabilityMap map;
    map.num_range_bins = in.read_u32();
    map.num_angle_bins = in.read_u32();
    map.range_bin_spacing_m = in.read_f64();
    read_f32_span(in, map.values, map.num_range_bins * map.num_angle_bins);
    in.expect_end();
    return map;
}

void save_partition(const PixelPartition& partition, const std::string& path) {
    std::string out;
    begin(out, "RSIMLB01");
    append_u32(out, static_cast<std::uint32_t>(partition.num_range_bins));
    append_u32(out, static_cast<std::uint32_t>(partition.num_angle_bins));
    append_f64(out, partition.amplitude_threshold);
    append_raw(out, partition.labels.data(), partition.labels.size());
    atomic_write_file(path, out);
}

PixelPartition load_partition(const std::string& path) {
    std::string bytes = read_file(path);
    Cursor in(bytes, path);
    in.expect_magic("RSIMLB01");
    PixelPartition partition;
    partition.num_range_bins = in.read_u32();
    partition.num_angle_bins = in.read_u32();
    partition.amplitude_threshold = in.read_f64();
    partition.labels.resize(partition.num_range_bins * partition.num_angle_bins);
    in.read_raw(partition.labels.data(), partition.labels.size());
    in.expect_end();
    return partition;
}

void save_cartesian(const CartesianImage& image, const std::string& path) {
    std::string out;
    begin(out, "RSIMCT01");
    append_u32(out, image.ny);
    append_u32(out, image.nx);
    append_f64(out, image.pixel_size_m);
    append_f64(out, image.x0_m);
    append_f64(out, image.y0_m);
    append_f32_span(out, image.values);
    append_raw(out, image.valid.data(), image.valid.size());
    atomic_write_file(path, out);
}

CartesianImage load_cartesian(const std::string& path) {
    std::string bytes = read_file(path);
    Cursor in(bytes, path);
    in.expect_magic("RSIMCT01");
    CartesianImage image;
    image.ny = in.read_u32();
    image.nx = in.read_u32();
    image.pixel_size_m = in.read_f64();
    image.x0_m = in.read_f64();
    image.y0_m = in.read_f64();
    std::size_t pixels = static_cast<std::size_t>(image.ny) * image.nx;
    read_f32_span(in, image.values, pixels);
    image.valid.resize(pixels);
    in.read_raw(image.valid.data(), pixels);
    in.expect_end();
    return image;
}

void save_eval_report(const EvalReport& report, const std::string& path) {
    std::ostringstream out;
    out.precision(17);
    out << "# match_radius_m " << report.match_radius_m << "\n";
    out << "# columns: threshold precision recall\n";
    for (const auto& point : report.curve) {
        out << point.threshold << " " << point.precision << " " << point.recall << "\n";
    }
    out << "# ap " << report.average_precision << "\n";
    atomic_write_file(path, std::move(out).str());
}

EvalReport load_eval_report(const std::string& path) {
    std::istringstream in(read_file(path));
    EvalReport report;
    bool have_ap = false;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        if (line[0] == '#') {
            std::string hash, key;
            fields >> hash >> key;
            if (key == "ap") {
                fields >> report.average_precision;
                have_ap = true;
            } else if (key == "match_radius_m") {
                fields >> report.match_radius_m;
            }
            continue;
        }
        PrPoint point;
        fields >> point.threshold >> point.precision >> point.recall;
        if (!fields) {
            throw std::runtime_error(path + ": malformed report row: " + line);
        }
        report.curve.push_back(point);
    }
    if (!have_ap) {
        throw std::runtime_error(path + ": missing ap record");
    }
    return report;
}

}  // namespace radsim
