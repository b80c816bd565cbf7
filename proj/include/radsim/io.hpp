#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radsim/dsp.hpp"
#include "radsim/eval.hpp"
#include "radsim/groundtruth.hpp"
#include "radsim/scene.hpp"
#include "radsim/synthesis.hpp"

namespace radsim {

// All binary artifacts are little-endian with an 8-byte magic and a u32
// version. Writers are atomic (temp file + rename).

void save_pointcloud(const std::vector<ReflectionPoint>& points, const std::string& path);
std::vector<ReflectionPoint> load_pointcloud(const std::string& path);

void save_cube(const RawDataCube& cube, const std::string& path);
RawDataCube load_cube(const std::string& path);

void save_image(const RadarImage& image, const std::string& path);
RadarImage load_image(const std::string& path);

void save_probability_map(const ProbabilityMap& map, const std::string& path);
ProbabilityMap load_probability_map(const std::string& path);

void save_partition(const PixelPartition& partition, const std::string& path);
PixelPartition load_partition(const std::string& path);

void save_cartesian(const CartesianImage& image, const std::string& path);
CartesianImage load_cartesian(const std::string& path);

// Plottable text table: comment header, "threshold precision recall" rows,
// trailing "# ap <value>" record.
void save_eval_report(const EvalReport& report, const std::string& path);
EvalReport load_eval_report(const std::string& path);

void atomic_write_file(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t file_digest(const std::string& path);

std::string to_hex(std::uint64_t value);
std::uint64_t from_hex(const std::string& text);

}  // namespace radsim
