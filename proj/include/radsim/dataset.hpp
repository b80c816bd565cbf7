#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "radsim/eval.hpp"
#include "radsim/groundtruth.hpp"
#include "radsim/pair.hpp"
#include "radsim/radar_config.hpp"
#include "radsim/scene.hpp"

namespace radsim {

// On-disk layout of a generated run:
//   <root>/manifest.json
//   <root>/frames/000000/{input.rimg, super.rimg, scene.pc, meta.json}
// Single-radar runs (kappa accounting absent) store image.rimg instead of the
// input/super pair. Ground truth adds gt.pmap and labels.part per frame,
// evaluation adds report.txt at the root.

struct FrameRecord {
    std::uint32_t index = 0;
    std::uint64_t seed = 0;
    std::string dir;  // relative to the dataset root
    std::uint64_t scene_digest = 0;
};

struct RunManifest {
    std::uint64_t master_seed = 0;
    std::uint32_t kappa = 1;
    std::uint32_t frame_count = 0;
    RadarConfig config;
    std::uint64_t config_digest_value = 0;
    std::uint64_t super_config_digest_value = 0;
    std::string scene_source = "procedural";
    bool with_noise = true;
    std::vector<FrameRecord> frames;
};

void save_manifest(const RunManifest& manifest, const std::string& path);
RunManifest load_manifest(const std::string& path);

std::string frame_dir_name(std::uint32_t index);

struct DatasetJob {
    RadarConfig config;
    std::uint32_t kappa = 12;
    std::uint32_t frame_count = 1;
    std::uint64_t master_seed = 1;
    std::string out_dir;
    std::uint32_t jobs = 1;
    bool with_noise = true;
    bool save_cubes = false;  // single-radar runs only
    ProcessingOptions processing;
    // Scene template applied to every frame with a per-frame seed; absent
    // means fully procedural scenes from make_random_scene_spec.
    std::optional<SceneSpec> scene_template;
    std::string scene_source = "procedural";
};

struct FrameFailure {
    std::uint32_t index = 0;
    std::string message;
};

struct DatasetResult {
    RunManifest manifest;
    std::vector<FrameFailure> failures;
    bool reused = false;  // an identical run already existed; nothing rewritten
};

// Paired low-/high-resolution dataset. Re-running with identical parameters
// over a complete output directory is a no-op. Failed frames are skipped and
// reported; the manifest lists only the frames that were written.
DatasetResult generate_pair_dataset(const DatasetJob& job);

// Single-radar variant (image.rimg per frame, optional cube.rdc).
DatasetResult generate_single_dataset(const DatasetJob& job);

struct GroundTruthOptions {
    // Hard 0/1 maps at this intensity threshold instead of the soft posterior.
    std::optional<double> binary_intensity_threshold;
};

struct GroundTruthSummary {
    double noise_std = 0.0;  // calibrated input-radar amplitude floor
    std::uint32_t frames_written = 0;
};

// Writes gt.pmap (from the super image) and labels.part (input image vs the
// calibrated noise floor, on the super grid) for every frame in the manifest.
GroundTruthSummary write_ground_truth(const std::string& dataset_root,
                                      const GroundTruthOptions& options = {});

struct LossSummary {
    std::vector<double> per_frame;
    double total = 0.0;
    double mean = 0.0;
};

// Loss of a prediction against the stored ground truth. `prediction_root`
// mirrors the dataset layout (frames/NNNNNN/gt.pmap); empty compares the
// ground truth against itself.
LossSummary compute_dataset_loss(const std::string& dataset_root,
                                 const std::string& prediction_root = {},
                                 const LossOptions& options = {});

struct DatasetEvalOptions {
    bool use_super_image = false;  // score the super image instead of the input
    double gt_snr_db = 8.0;        // ground-truth threshold over the noise floor
    std::size_t threshold_count = 100;
    double match_radius_m = kMatchRadiusM;
};

struct DatasetEvalResult {
    EvalReport report;          // pooled across frames
    double gt_noise_std = 0.0;  // super-radar amplitude floor behind the GT cut
    std::uint32_t frames = 0;
};

// Pooled detection scoring over a paired dataset: ground truth from each
// frame's super image at noise_std * 10^(gt_snr_db/20), detections from the
// scored image across a shared log-spaced threshold sweep.
DatasetEvalResult evaluate_dataset(const std::string& dataset_root,
                                   const DatasetEvalOptions& options = {});

}  // namespace radsim
