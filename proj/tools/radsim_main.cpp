// radsim: FMCW MIMO radar simulation and evaluation toolkit.
//
// Subcommands cover the full pipeline: paired dataset generation (pair,
// simulate), ground-truth derivation (gt), loss computation (loss), detection
// scoring (eval), point-spread measurement (psf) and Cartesian resampling
// (to-cartesian). Run `radsim <subcommand> --help` for the flag reference.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "radsim/dataset.hpp"
#include "radsim/io.hpp"
#include "radsim/pair.hpp"
#include "radsim/radar_config.hpp"

namespace {

using namespace radsim;

// Radar parameters resolve as: command-line flag > config-file value >
// built-in default.
struct ConfigArgs {
    std::string config_path;
    std::uint32_t angle_bins = 0;
    double noise_variance = 0.0;
    CLI::Option* angle_bins_opt = nullptr;
    CLI::Option* noise_variance_opt = nullptr;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "Radar config JSON (partial files allowed)")
            ->check(CLI::ExistingFile);
        angle_bins_opt =
            cmd->add_option("--angle-bins", angle_bins, "Override the angle bin count");
        noise_variance_opt = cmd->add_option("--noise-variance", noise_variance,
                                             "Override sigma_n^2 (per-quadrature pixel variance)");
    }

    RadarConfig resolve() const {
        RadarConfig config =
            config_path.empty() ? default_config() : load_config(config_path);
        if (angle_bins_opt->count() > 0) config.angle_bins = angle_bins;
        if (noise_variance_opt->count() > 0) config.noise_image_variance = noise_variance;
        config.validate();
        return config;
    }
};

// Default output location: $RADSIM_OUT/<name> when the flag is omitted.
std::string resolve_out(const std::string& cli_value, const std::string& default_name) {
    if (!cli_value.empty()) return cli_value;
    if (const char* root = std::getenv("RADSIM_OUT")) {
        return (std::filesystem::path(root) / default_name).string();
    }
    return default_name;
}

int report_dataset_result(const DatasetResult& result, const std::string& out_dir) {
    if (result.reused) {
        std::printf("up to date: %s (%u frames)\n", out_dir.c_str(),
                    result.manifest.frame_count);
        return 0;
    }
    std::printf("wrote %zu/%u frames to %s\n", result.manifest.frames.size(),
                result.manifest.frame_count, out_dir.c_str());
    for (const auto& failure : result.failures) {
        std::fprintf(stderr, "frame %06u failed: %s\n", failure.index,
                     failure.message.c_str());
    }
    return result.failures.empty() ? 0 : 1;
}

void write_psf_cut(const PsfMetrics& metrics, const std::string& path) {
    std::ostringstream out;
    out.precision(9);
    out << "# columns: sin_azimuth amplitude\n";
    for (std::size_t i = 0; i < metrics.cut_sin.size(); ++i) {
        out << metrics.cut_sin[i] << " " << metrics.cut_amplitude[i] << "\n";
    }
    atomic_write_file(path, std::move(out).str());
}

int run(int argc, char** argv) {
    CLI::App app{"FMCW MIMO radar simulation and evaluation toolkit"};
    app.require_subcommand(1);

    // pair ------------------------------------------------------------------
    auto* pair_cmd = app.add_subcommand(
        "pair", "Generate a paired low-/high-resolution reflection dataset");
    ConfigArgs pair_config;
    pair_config.attach(pair_cmd);
    std::string pair_out;
    std::string pair_scene_spec;
    std::string pair_window = "rect";
    std::uint64_t pair_seed = 1;
    std::uint32_t pair_frames = 8, pair_kappa = 12, pair_jobs = 1;
    bool pair_no_noise = false;
    pair_cmd->add_option("--out", pair_out, "Output directory (default $RADSIM_OUT/pair_run)");
    pair_cmd->add_option("--seed", pair_seed, "Master seed")->capture_default_str();
    pair_cmd->add_option("--frames", pair_frames, "Frame count")->capture_default_str()
        ->check(CLI::PositiveNumber);
    pair_cmd->add_option("--kappa", pair_kappa, "Resolution boost factor")->capture_default_str()
        ->check(CLI::PositiveNumber);
    pair_cmd->add_option("--jobs", pair_jobs, "Worker threads")->capture_default_str()
        ->check(CLI::PositiveNumber);
    pair_cmd->add_flag("--no-noise", pair_no_noise, "Disable receiver noise");
    pair_cmd->add_option("--scene-spec", pair_scene_spec,
                         "Scene spec JSON applied to every frame (per-frame seeds)")
        ->check(CLI::ExistingFile);
    pair_cmd->add_option("--window", pair_window, "FFT window: rect | hann")->capture_default_str();

    // simulate ----------------------------------------------------------------
    auto* sim_cmd =
        app.add_subcommand("simulate", "Generate single-radar frames (no paired branch)");
    ConfigArgs sim_config;
    sim_config.attach(sim_cmd);
    std::string sim_out;
    std::string sim_scene_spec;
    std::string sim_window = "rect";
    std::uint64_t sim_seed = 1;
    std::uint32_t sim_frames = 8, sim_jobs = 1;
    bool sim_no_noise = false, sim_save_cubes = false;
    sim_cmd->add_option("--out", sim_out, "Output directory (default $RADSIM_OUT/sim_run)");
    sim_cmd->add_option("--seed", sim_seed, "Master seed")->capture_default_str();
    sim_cmd->add_option("--frames", sim_frames, "Frame count")->capture_default_str()->check(CLI::PositiveNumber);
    sim_cmd->add_option("--jobs", sim_jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    sim_cmd->add_flag("--no-noise", sim_no_noise, "Disable receiver noise");
    sim_cmd->add_flag("--save-cubes", sim_save_cubes, "Also store raw data cubes");
    sim_cmd->add_option("--scene-spec", sim_scene_spec, "Scene spec JSON for every frame")
        ->check(CLI::ExistingFile);
    sim_cmd->add_option("--window", sim_window, "FFT window: rect | hann")->capture_default_str();

    // gt ----------------------------------------------------------------------
    auto* gt_cmd = app.add_subcommand(
        "gt", "Write probability maps and pixel partitions for a pair run");
    std::string gt_dataset;
    double gt_binary_threshold = 0.0;
    gt_cmd->add_option("--dataset", gt_dataset, "Pair run directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    auto* gt_binary_opt = gt_cmd->add_option(
        "--binary-threshold", gt_binary_threshold,
        "Emit hard 0/1 maps at this intensity threshold instead of the soft posterior");

    // loss ----------------------------------------------------------------------
    auto* loss_cmd =
        app.add_subcommand("loss", "Weighted per-set loss of a prediction vs ground truth");
    std::string loss_dataset, loss_pred;
    bool loss_l1 = false, loss_per_set_mean = false, loss_per_frame = false;
    LossWeights loss_weights;
    loss_cmd->add_option("--dataset", loss_dataset, "Pair run directory (after gt)")
        ->required()
        ->check(CLI::ExistingDirectory);
    loss_cmd->add_option("--pred", loss_pred,
                         "Prediction root mirroring frames/NNNNNN/gt.pmap (default: ground "
                         "truth against itself)");
    loss_cmd->add_flag("--l1", loss_l1, "L1 distance instead of cross entropy");
    loss_cmd->add_flag("--per-set-mean", loss_per_set_mean,
                       "Average within each pixel set instead of summing");
    loss_cmd->add_flag("--per-frame", loss_per_frame, "Print one line per frame");
    loss_cmd->add_option("--rho-r", loss_weights.rho_r, "Reflection set weight")->capture_default_str();
    loss_cmd->add_option("--rho-n", loss_weights.rho_n, "Noise set weight")->capture_default_str();
    loss_cmd->add_option("--rho-s", loss_weights.rho_s, "Spread set weight")->capture_default_str();

    // eval ----------------------------------------------------------------------
    auto* eval_cmd =
        app.add_subcommand("eval", "Pooled precision/recall and AP over a pair run");
    std::string eval_dataset, eval_report_path;
    DatasetEvalOptions eval_options;
    eval_cmd->add_option("--dataset", eval_dataset, "Pair run directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    eval_cmd->add_flag("--super", eval_options.use_super_image,
                       "Score the high-resolution image instead of the input image");
    eval_cmd->add_option("--snr-db", eval_options.gt_snr_db,
                         "Ground-truth threshold over the noise floor, dB")->capture_default_str();
    eval_cmd->add_option("--thresholds", eval_options.threshold_count,
                         "Detection threshold count")->capture_default_str()
        ->check(CLI::PositiveNumber);
    eval_cmd->add_option("--radius", eval_options.match_radius_m, "Match radius, m")->capture_default_str()
        ->check(CLI::PositiveNumber);
    eval_cmd->add_option("--report", eval_report_path,
                         "Report file (default <dataset>/report.txt)");

    // psf ----------------------------------------------------------------------
    auto* psf_cmd = app.add_subcommand(
        "psf", "Angular point-spread metrics for a config and its boosted variant");
    ConfigArgs psf_config;
    psf_config.attach(psf_cmd);
    std::string psf_out;
    std::string psf_window = "rect";
    double psf_range = 25.0;
    std::uint32_t psf_kappa = 12, psf_oversample = 16384;
    psf_cmd->add_option("--out", psf_out, "Output directory (default $RADSIM_OUT/psf)");
    psf_cmd->add_option("--range", psf_range, "Point range, m")->capture_default_str()
        ->check(CLI::PositiveNumber);
    psf_cmd->add_option("--kappa", psf_kappa, "Resolution boost factor")->capture_default_str()
        ->check(CLI::PositiveNumber);
    psf_cmd->add_option("--oversample", psf_oversample, "Angle cut sample count")->capture_default_str();
    psf_cmd->add_option("--window", psf_window, "Angle FFT window: rect | hann")->capture_default_str();

    // to-cartesian ----------------------------------------------------------------
    auto* cart_cmd =
        app.add_subcommand("to-cartesian", "Resample a reflection image onto a Cartesian grid");
    std::string cart_image, cart_out, cart_channel = "intensity";
    CartesianSpec cart_spec;
    cart_cmd->add_option("--image", cart_image, "Input .rimg file")
        ->required()
        ->check(CLI::ExistingFile);
    cart_cmd->add_option("--out", cart_out, "Output .cart file (default alongside the input)");
    cart_cmd->add_option("--channel", cart_channel,
                         "real | imag | doppler | intensity")->capture_default_str();
    cart_cmd->add_option("--pixel-size", cart_spec.pixel_size_m, "Pixel size, m")->capture_default_str()
        ->check(CLI::PositiveNumber);
    cart_cmd->add_option("--x-extent", cart_spec.x_half_extent_m,
                         "Half extent in x, m (0 = grid reach)");
    cart_cmd->add_option("--y-extent", cart_spec.y_extent_m, "Extent in y, m (0 = grid reach)");

    CLI11_PARSE(app, argc, argv);

    if (pair_cmd->parsed()) {
        DatasetJob job;
        job.config = pair_config.resolve();
        job.kappa = pair_kappa;
        job.frame_count = pair_frames;
        job.master_seed = pair_seed;
        job.out_dir = resolve_out(pair_out, "pair_run");
        job.jobs = pair_jobs;
        job.with_noise = !pair_no_noise;
        const Window window = window_from_name(pair_window);
        job.processing = {window, window, window};
        if (!pair_scene_spec.empty()) {
            job.scene_template = load_scene_spec(pair_scene_spec);
            job.scene_source = "spec:" + pair_scene_spec;
        }
        return report_dataset_result(generate_pair_dataset(job), job.out_dir);
    }

    if (sim_cmd->parsed()) {
        DatasetJob job;
        job.config = sim_config.resolve();
        job.frame_count = sim_frames;
        job.master_seed = sim_seed;
        job.out_dir = resolve_out(sim_out, "sim_run");
        job.jobs = sim_jobs;
        job.with_noise = !sim_no_noise;
        job.save_cubes = sim_save_cubes;
        const Window window = window_from_name(sim_window);
        job.processing = {window, window, window};
        if (!sim_scene_spec.empty()) {
            job.scene_template = load_scene_spec(sim_scene_spec);
            job.scene_source = "spec:" + sim_scene_spec;
        }
        return report_dataset_result(generate_single_dataset(job), job.out_dir);
    }

    if (gt_cmd->parsed()) {
        GroundTruthOptions options;
        if (gt_binary_opt->count() > 0) {
            options.binary_intensity_threshold = gt_binary_threshold;
        }
        GroundTruthSummary summary = write_ground_truth(gt_dataset, options);
        std::printf("ground truth for %u frames (noise floor %.6g)\n",
                    summary.frames_written, summary.noise_std);
        return 0;
    }

    if (loss_cmd->parsed()) {
        LossOptions options;
        options.weights = loss_weights;
        options.variant = loss_l1 ? LossVariant::kL1 : LossVariant::kCrossEntropy;
        options.per_set_mean = loss_per_set_mean;
        LossSummary summary = compute_dataset_loss(loss_dataset, loss_pred, options);
        if (loss_per_frame) {
            for (std::size_t i = 0; i < summary.per_frame.size(); ++i) {
                std::printf("frame %06zu loss %.12g\n", i, summary.per_frame[i]);
            }
        }
        std::printf("frames %zu total %.12g mean %.12g\n", summary.per_frame.size(),
                    summary.total, summary.mean);
        return 0;
    }

    if (eval_cmd->parsed()) {
        DatasetEvalResult result = evaluate_dataset(eval_dataset, eval_options);
        const std::string report_path =
            eval_report_path.empty() ? eval_dataset + "/report.txt" : eval_report_path;
        save_eval_report(result.report, report_path);
        std::printf("frames %u gt_noise_floor %.6g ap %.6f -> %s\n", result.frames,
                    result.gt_noise_std, result.report.average_precision,
                    report_path.c_str());
        return 0;
    }

    if (psf_cmd->parsed()) {
        const RadarConfig config = psf_config.resolve();
        const RadarConfig boosted = upscale_config(config, psf_kappa);
        const Window window = window_from_name(psf_window);
        PsfMetrics input = measure_psf(config, psf_range, psf_oversample, window);
        PsfMetrics super = measure_psf(boosted, psf_range, psf_oversample, window);
        const std::string out_dir = resolve_out(psf_out, "psf");
        write_psf_cut(input, out_dir + "/psf_input.txt");
        write_psf_cut(super, out_dir + "/psf_super.txt");
        std::printf("input: -3 dB width %.6g sin, first side lobe %.2f dB\n",
                    input.mainlobe_width_sin, input.first_sidelobe_db);
        std::printf("super: -3 dB width %.6g sin, first side lobe %.2f dB\n",
                    super.mainlobe_width_sin, super.first_sidelobe_db);
        std::printf("width ratio %.4f (boost factor %u)\n",
                    input.mainlobe_width_sin / super.mainlobe_width_sin, psf_kappa);
        return 0;
    }

    if (cart_cmd->parsed()) {
        ImageChannel channel;
        if (cart_channel == "real") channel = ImageChannel::kReal;
        else if (cart_channel == "imag") channel = ImageChannel::kImag;
        else if (cart_channel == "doppler") channel = ImageChannel::kDoppler;
        else if (cart_channel == "intensity") channel = ImageChannel::kIntensity;
        else throw std::invalid_argument("unknown channel: " + cart_channel);
        RadarImage image = load_image(cart_image);
        CartesianImage cartesian = to_cartesian(image, channel, cart_spec);
        std::string out_path = cart_out;
        if (out_path.empty()) {
            out_path = std::filesystem::path(cart_image).replace_extension(".cart").string();
        }
        save_cartesian(cartesian, out_path);
        std::printf("%u x %u grid (%.3g m pixels) -> %s\n", cartesian.ny, cartesian.nx,
                    cartesian.pixel_size_m, out_path.c_str());
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "radsim: error: %s\n", e.what());
        return 1;
    }
}
