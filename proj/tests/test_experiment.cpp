#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "kanpnp/experiment.hpp"
#include "kanpnp/image_io.hpp"
#include "kanpnp/rng.hpp"

using namespace kanpnp;

namespace {

std::string make_test_image(int h, int w, int c, const std::string& name) {
    ImageGrid img(h, w, c);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j)
            for (int ch = 0; ch < c; ++ch)
                img.at(i, j, ch) = std::clamp(
                    0.5 + 0.3 * std::sin(0.5 * i + ch) * std::cos(0.4 * j) +
                        0.1 * ((i / 4 + j / 4) % 2),
                    0.0, 1.0);
    const auto path = std::filesystem::temp_directory_path() / name;
    save_image(img, path.string());
    return path.string();
}

ExperimentConfig tiny_config(Task task, PriorKind prior, const std::string& gt_path,
                             const std::string& out_dir) {
    ExperimentConfig cfg;
    cfg.task = task;
    cfg.prior = prior;
    cfg.ground_truth_path = gt_path;
    cfg.resize_height = 24;
    cfg.resize_width = 32;
    cfg.hidden_dims = {16, 8};
    cfg.train.iterations = 15;
    cfg.admm.iterations = 2;
    cfg.admm.denoise.inner_steps = 2;
    cfg.output_dir = out_dir;
    return cfg;
}

}  // namespace

TEST_CASE("experiment config json round trip is stable") {
    ExperimentConfig cfg;
    cfg.task = Task::Joint;
    cfg.prior = PriorKind::KanFourier;
    cfg.train.iterations = 42;
    cfg.admm.mu_end = 0.33;
    cfg.hidden_dims = {10, 5};
    cfg.tv_weight = 0.25;
    const auto j = cfg.to_json();
    const ExperimentConfig back = ExperimentConfig::from_json(j);
    CHECK(back.to_json() == j);
    CHECK(back.task == Task::Joint);
    CHECK(back.prior == PriorKind::KanFourier);
    CHECK(back.train.iterations == 42);
    CHECK(back.admm.mu_end == 0.33);
    CHECK(back.hidden_dims == std::vector<int>{10, 5});
}

TEST_CASE("task and prior names parse both ways") {
    for (Task t : {Task::Sr2, Task::Sr4, Task::Sr8, Task::Deconv, Task::Demosaic, Task::Joint})
        CHECK(task_from_string(to_string(t)) == t);
    for (PriorKind p : {PriorKind::KanBspline, PriorKind::KanFourier, PriorKind::Tv})
        CHECK(prior_from_string(to_string(p)) == p);
    CHECK_THROWS_AS(task_from_string("sr16"), std::invalid_argument);
    CHECK_THROWS_AS(prior_from_string("unet"), std::invalid_argument);
}

TEST_CASE("a tiny end-to-end experiment emits the full report") {
    const std::string gt = make_test_image(40, 40, 3, "kanpnp_test_gt.png");
    const auto out_dir =
        (std::filesystem::temp_directory_path() / "kanpnp_test_run").string();
    const ExperimentConfig cfg = tiny_config(Task::Sr2, PriorKind::KanBspline, gt, out_dir);
    const MetricsReport rep = run_experiment(cfg);

    CHECK(rep.psnr_db.has_value());
    CHECK(rep.ssim_score.has_value());
    CHECK(rep.bicubic_psnr_db.has_value());
    CHECK(rep.trace.size() == 2);
    CHECK(rep.mu_values.size() == 2);
    CHECK(rep.lipschitz_bound.has_value());
    CHECK(rep.pretrain_loss.size() == 15);
    CHECK(std::filesystem::exists(rep.reconstruction_path));
    CHECK(std::filesystem::exists(rep.trace_csv_path));
    CHECK(std::filesystem::exists(rep.network_path));
    CHECK(std::filesystem::exists(std::filesystem::path(out_dir) / "report.json"));

    const auto j = rep.to_json();
    CHECK(j["schema_version"] == 1);
    CHECK(j.contains("psnr"));
    CHECK(j.contains("config"));
    CHECK(j["config"]["task"] == "sr2");

    // determinism: identical config gives an identical report except wall time
    const MetricsReport rep2 = run_experiment(cfg);
    auto j1 = rep.to_json();
    auto j2 = rep2.to_json();
    j1.erase("wall_time_sec");
    j2.erase("wall_time_sec");
    CHECK(j1 == j2);

    std::filesystem::remove_all(out_dir);
    std::filesystem::remove(gt);
}

TEST_CASE("tv prior runs without network artifacts") {
    const std::string gt = make_test_image(24, 24, 3, "kanpnp_test_gt_tv.png");
    const auto out_dir =
        (std::filesystem::temp_directory_path() / "kanpnp_test_run_tv").string();
    ExperimentConfig cfg = tiny_config(Task::Joint, PriorKind::Tv, gt, out_dir);
    cfg.tv_iters = 30;
    const MetricsReport rep = run_experiment(cfg);
    CHECK(rep.psnr_db.has_value());
    CHECK_FALSE(rep.lipschitz_bound.has_value());
    CHECK(rep.network_path.empty());
    std::filesystem::remove_all(out_dir);
    std::filesystem::remove(gt);
}

TEST_CASE("missing ground truth downgrades metrics to absent fields") {
    // run on a measurement only: deconv keeps the image size
    const std::string y_path = make_test_image(24, 24, 3, "kanpnp_test_y.png");
    const auto out_dir =
        (std::filesystem::temp_directory_path() / "kanpnp_test_run_noref").string();
    ExperimentConfig cfg = tiny_config(Task::Deconv, PriorKind::KanBspline, "", out_dir);
    cfg.input_path = y_path;
    const MetricsReport rep = run_experiment(cfg);
    CHECK_FALSE(rep.psnr_db.has_value());
    CHECK_FALSE(rep.ssim_score.has_value());
    const auto j = rep.to_json();
    CHECK_FALSE(j.contains("psnr"));
    CHECK_FALSE(j.contains("ssim"));
    std::filesystem::remove_all(out_dir);
    std::filesystem::remove(y_path);
}

TEST_CASE("the output root environment variable relocates relative dirs") {
    setenv("KANPNP_OUTPUT_ROOT", "/tmp/kanpnp_root_test", 1);
    CHECK(resolve_output_dir("exp1") == "/tmp/kanpnp_root_test/exp1");
    CHECK(resolve_output_dir("/abs/path") == "/abs/path");
    unsetenv("KANPNP_OUTPUT_ROOT");
}

TEST_CASE("experiment errors carry the failing stage") {
    ExperimentConfig cfg;
    cfg.ground_truth_path = "";
    cfg.input_path = "";
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
    cfg.ground_truth_path = "missing_image_file.png";
    CHECK_THROWS_AS(run_experiment(cfg), std::runtime_error);
}
