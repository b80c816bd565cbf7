#include <doctest.h>

#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "radsim/dataset.hpp"
#include "radsim/io.hpp"

using namespace radsim;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args) {
    const std::string command = std::string(RADSIM_BIN) + " " + args + " 2>&1";
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult result;
    std::array<char, 1024> buf;
    while (std::fgets(buf.data(), buf.size(), pipe)) {
        result.output += buf.data();
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("radsim_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string sub(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("help and bad flags") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("pair --help").exit_code == 0);
    CHECK(run_cli("pair --no-such-flag").exit_code != 0);
    CHECK(run_cli("").exit_code != 0);  // a subcommand is required
}

TEST_CASE("pair generation, ground truth, loss and eval round-trip") {
    TempDir dir;
    const std::string out = dir.sub("run");

    CliResult gen = run_cli("pair --frames 2 --kappa 2 --seed 11 --out " + out);
    CHECK(gen.exit_code == 0);
    CHECK(fs::exists(out + "/manifest.json"));
    CHECK(fs::exists(out + "/frames/000000/input.rimg"));
    CHECK(fs::exists(out + "/frames/000001/super.rimg"));
    CHECK(fs::exists(out + "/frames/000001/scene.pc"));

    RunManifest manifest = load_manifest(out + "/manifest.json");
    CHECK(manifest.kappa == 2);
    CHECK(manifest.frame_count == 2);
    CHECK(manifest.frames.size() == 2);

    // Rerunning the identical job is a no-op.
    CliResult again = run_cli("pair --frames 2 --kappa 2 --seed 11 --out " + out);
    CHECK(again.exit_code == 0);
    CHECK(again.output.find("up to date") != std::string::npos);

    CliResult gt = run_cli("gt --dataset " + out);
    CHECK(gt.exit_code == 0);
    CHECK(fs::exists(out + "/frames/000000/gt.pmap"));
    CHECK(fs::exists(out + "/frames/000001/labels.part"));

    // Soft ground truth against itself has positive entropy.
    CliResult soft_loss = run_cli("loss --dataset " + out);
    CHECK(soft_loss.exit_code == 0);
    CHECK(soft_loss.output.find("total") != std::string::npos);

    // Binary maps against themselves cost exactly zero.
    CliResult binarize = run_cli("gt --dataset " + out + " --binary-threshold 1e-4");
    CHECK(binarize.exit_code == 0);
    CliResult zero_loss = run_cli("loss --dataset " + out);
    CHECK(zero_loss.exit_code == 0);
    CHECK(zero_loss.output.find("total 0 ") != std::string::npos);

    CliResult eval = run_cli("eval --dataset " + out + " --thresholds 20");
    CHECK(eval.exit_code == 0);
    CHECK(fs::exists(out + "/report.txt"));
    EvalReport report = load_eval_report(out + "/report.txt");
    CHECK(report.curve.size() == 20);
    CHECK(report.average_precision >= 0.0);
    CHECK(report.average_precision <= 1.0);
}

TEST_CASE("simulate writes single-radar frames with optional cubes") {
    TempDir dir;
    const std::string out = dir.sub("sim");
    CliResult gen =
        run_cli("simulate --frames 1 --seed 3 --save-cubes --no-noise --out " + out);
    CHECK(gen.exit_code == 0);
    CHECK(fs::exists(out + "/frames/000000/image.rimg"));
    CHECK(fs::exists(out + "/frames/000000/cube.rdc"));
    CHECK(fs::exists(out + "/frames/000000/scene.pc"));

    RawDataCube cube = load_cube(out + "/frames/000000/cube.rdc");
    CHECK(cube.num_rx == 8);
    CHECK(cube.num_chirps == 64);
    CHECK(cube.num_samples == 256);
}

TEST_CASE("config precedence: flag over file over default") {
    TempDir dir;
    const std::string cfg_path = dir.sub("partial.json");
    {
        std::ofstream out(cfg_path);
        out << R"({"angle_bins": 128})";
    }

    const std::string by_default = dir.sub("d0");
    CHECK(run_cli("simulate --frames 1 --no-noise --out " + by_default).exit_code == 0);
    CHECK(load_manifest(by_default + "/manifest.json").config.angle_bins == 64);

    const std::string by_file = dir.sub("d1");
    CHECK(run_cli("simulate --frames 1 --no-noise --config " + cfg_path + " --out " + by_file)
              .exit_code == 0);
    CHECK(load_manifest(by_file + "/manifest.json").config.angle_bins == 128);

    const std::string by_flag = dir.sub("d2");
    CHECK(run_cli("simulate --frames 1 --no-noise --config " + cfg_path +
                  " --angle-bins 256 --out " + by_flag)
              .exit_code == 0);
    CHECK(load_manifest(by_flag + "/manifest.json").config.angle_bins == 256);
}

TEST_CASE("scene specs drive dataset generation") {
    TempDir dir;
    const std::string spec_path = dir.sub("two_cars.json");
    fs::copy_file(fs::path(TEST_DATA_DIR) / "two_car_scene.json", spec_path);

    const std::string out = dir.sub("spec_run");
    CliResult gen = run_cli("pair --frames 2 --kappa 2 --seed 5 --scene-spec " + spec_path +
                            " --out " + out);
    CHECK(gen.exit_code == 0);

    // Same template, different per-frame seeds: geometry matches, phases vary.
    auto f0 = load_pointcloud(out + "/frames/000000/scene.pc");
    auto f1 = load_pointcloud(out + "/frames/000001/scene.pc");
    REQUIRE(!f0.empty());
    REQUIRE(f0.size() == f1.size());
    CHECK(f0[0].x_m == f1[0].x_m);
    CHECK(f0[0].y_m == f1[0].y_m);
    bool phases_differ = false;
    for (std::size_t i = 0; i < f0.size() && !phases_differ; ++i) {
        phases_differ = f0[i].reflectivity != f1[i].reflectivity;
    }
    CHECK(phases_differ);
}

TEST_CASE("psf and to-cartesian tools") {
    TempDir dir;
    const std::string psf_out = dir.sub("psf");
    CliResult psf =
        run_cli("psf --range 20 --kappa 2 --oversample 4096 --out " + psf_out);
    CHECK(psf.exit_code == 0);
    CHECK(fs::exists(psf_out + "/psf_input.txt"));
    CHECK(fs::exists(psf_out + "/psf_super.txt"));
    CHECK(psf.output.find("width ratio") != std::string::npos);

    const std::string sim_out = dir.sub("sim");
    CHECK(run_cli("simulate --frames 1 --no-noise --seed 2 --out " + sim_out).exit_code == 0);
    const std::string image_path = sim_out + "/frames/000000/image.rimg";
    const std::string cart_path = dir.sub("frame.cart");
    CliResult cart = run_cli("to-cartesian --image " + image_path + " --out " + cart_path);
    CHECK(cart.exit_code == 0);
    CartesianImage loaded = load_cartesian(cart_path);
    CHECK(loaded.ny > 0);
    CHECK(loaded.nx > 0);

    CHECK(run_cli("to-cartesian --image " + image_path + " --channel bogus --out " +
                  cart_path)
              .exit_code != 0);
}
