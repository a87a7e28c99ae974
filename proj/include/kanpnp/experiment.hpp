// End-to-end experiment pipeline: synthesize the measurement, pretrain the
// prior on the back-projection, run PnP-ADMM, evaluate, and write artifacts.
#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "kanpnp/admm.hpp"
#include "kanpnp/trainer.hpp"

namespace kanpnp {

enum class Task { Sr2, Sr4, Sr8, Deconv, Demosaic, Joint };
enum class PriorKind { KanBspline, KanFourier, Tv };

std::string to_string(Task t);
std::string to_string(PriorKind p);
Task task_from_string(const std::string& s);
PriorKind prior_from_string(const std::string& s);

struct ExperimentConfig {
    Task task = Task::Sr2;
    PriorKind prior = PriorKind::KanBspline;
    std::string input_path;         // measurement; optional when ground truth given
    std::string ground_truth_path;  // clean reference; measurement is synthesized
    TrainConfig train;
    AdmmConfig admm;

    // network architecture
    std::vector<int> hidden_dims = {128, 32, 16};
    int grid_size = 5;
    int spline_order = 3;
    int fourier_order = 4;

    // preprocessing and degradation
    int resize_height = 384;
    int resize_width = 512;
    double measurement_noise = 0.0;
    int psf_size = 5;
    double psf_sigma = 1.0;
    std::string psf_path;  // optional plain-text PSF override

    // TV prior
    double tv_weight = 0.1;
    int tv_iters = 100;

    std::string output_dir = "kanpnp_out";
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
};

struct MetricsReport {
    int schema_version = 1;
    Task task;
    PriorKind prior;
    std::optional<double> psnr_db;
    std::optional<double> ssim_score;
    std::optional<double> bicubic_psnr_db;  // SR tasks with ground truth
    std::vector<AdmmTraceRecord> trace;
    std::vector<double> mu_values;
    std::optional<double> lipschitz_bound;
    std::optional<double> lipschitz_bound_maxrow;
    std::optional<double> lipschitz_emp;
    std::vector<double> pretrain_loss;
    double wall_time_sec = 0.0;
    std::string reconstruction_path, trace_csv_path, loss_csv_path, network_path;
    nlohmann::json config_snapshot;

    nlohmann::json to_json() const;
};

// Forward operator for a task at the given image-space size.
ForwardOperator make_task_operator(const ExperimentConfig& cfg, int H, int W, int C);

// Divisibility required of the image sides by the task operator.
int task_divisor(Task t);

MetricsReport run_experiment(const ExperimentConfig& cfg);

// Resolves cfg.output_dir against the KANPNP_OUTPUT_ROOT environment
// variable when the directory is relative.
std::string resolve_output_dir(const std::string& output_dir);

}  // namespace kanpnp
