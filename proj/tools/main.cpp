// kanpnp command line: run reconstruction experiments and diagnostics.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "kanpnp/experiment.hpp"
#include "kanpnp/image_io.hpp"
#include "kanpnp/metrics.hpp"

namespace {

int cmd_run(const std::string& config_path, kanpnp::ExperimentConfig overrides,
            const std::vector<std::string>& set_flags) {
    kanpnp::ExperimentConfig cfg = overrides;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::fprintf(stderr, "error [config]: cannot open %s\n", config_path.c_str());
            return 2;
        }
        nlohmann::json j;
        in >> j;
        cfg = kanpnp::ExperimentConfig::from_json(j);
        // command-line values win over the file
        for (const auto& flag : set_flags) {
            if (flag == "task") cfg.task = overrides.task;
            else if (flag == "prior") cfg.prior = overrides.prior;
            else if (flag == "input") cfg.input_path = overrides.input_path;
            else if (flag == "ground-truth") cfg.ground_truth_path = overrides.ground_truth_path;
            else if (flag == "output-dir") cfg.output_dir = overrides.output_dir;
            else if (flag == "seed") cfg.seed = overrides.seed;
            else if (flag == "iterations") cfg.admm.iterations = overrides.admm.iterations;
            else if (flag == "pretrain-iters") cfg.train.iterations = overrides.train.iterations;
            else if (flag == "inner-steps")
                cfg.admm.denoise.inner_steps = overrides.admm.denoise.inner_steps;
            else if (flag == "mu-start") cfg.admm.mu_start = overrides.admm.mu_start;
            else if (flag == "mu-end") cfg.admm.mu_end = overrides.admm.mu_end;
            else if (flag == "resize-height") cfg.resize_height = overrides.resize_height;
            else if (flag == "resize-width") cfg.resize_width = overrides.resize_width;
        }
    }
    const kanpnp::MetricsReport rep = kanpnp::run_experiment(cfg);
    std::cout << rep.to_json().dump(2) << "\n";
    return 0;
}

int cmd_adjoint_check(int size, std::uint64_t seed) {
    using namespace kanpnp;
    ExperimentConfig cfg;
    bool ok = true;
    for (Task t : {Task::Sr2, Task::Sr4, Task::Sr8, Task::Deconv, Task::Demosaic, Task::Joint}) {
        cfg.task = t;
        const ForwardOperator op = make_task_operator(cfg, size, size, 3);
        const double disc = adjoint_check(op, seed);
        std::printf("%-9s adjoint discrepancy %.3e %s\n", to_string(t).c_str(), disc,
                    disc < 1e-8 ? "ok" : "FAIL");
        ok = ok && disc < 1e-8;
    }
    return ok ? 0 : 1;
}

int cmd_lipschitz_report(const std::string& net_path, int pairs, std::uint64_t seed) {
    using namespace kanpnp;
    double bound, maxrow, emp;
    try {
        const auto net = load_network(net_path);
        bound = lipschitz_upper_bound(net);
        maxrow = lipschitz_upper_bound_maxrow(net);
        emp = lipschitz_empirical(net, pairs, seed);
    } catch (const std::exception&) {
        const auto net = load_network_f(net_path);
        bound = lipschitz_upper_bound(net);
        maxrow = lipschitz_upper_bound_maxrow(net);
        emp = lipschitz_empirical(net, pairs, seed);
    }
    std::printf("certified l2 bound   %.6g\n", bound);
    std::printf("max-row-sum bound    %.6g\n", maxrow);
    std::printf("sampled estimate     %.6g  (%d pairs)\n", emp, pairs);
    return 0;
}

int cmd_metrics(const std::string& ref_path, const std::string& test_path) {
    const kanpnp::ImageGrid ref = kanpnp::load_image(ref_path);
    const kanpnp::ImageGrid test = kanpnp::load_image(test_path);
    std::printf("psnr %.4f dB\n", kanpnp::psnr(ref, test));
    std::printf("ssim %.4f\n", kanpnp::ssim(ref, test));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"KAN-PnP: single-instance KAN priors for imaging inverse problems"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run a reconstruction experiment");
    std::string config_path;
    kanpnp::ExperimentConfig ov;
    std::string task_str = "sr2", prior_str = "kan_bspline";
    run->add_option("--config", config_path, "JSON experiment config");
    run->add_option("--task", task_str, "sr2|sr4|sr8|deconv|demosaic|joint");
    run->add_option("--prior", prior_str, "kan_bspline|kan_fourier|tv");
    run->add_option("--input", ov.input_path, "measurement image (PNG)");
    run->add_option("--ground-truth", ov.ground_truth_path, "clean reference image (PNG)");
    run->add_option("--output-dir", ov.output_dir, "output directory");
    run->add_option("--seed", ov.seed, "experiment seed");
    run->add_option("--iterations", ov.admm.iterations, "ADMM iterations");
    run->add_option("--pretrain-iters", ov.train.iterations, "pretraining iterations");
    run->add_option("--inner-steps", ov.admm.denoise.inner_steps, "denoiser fine-tune steps");
    run->add_option("--mu-start", ov.admm.mu_start, "penalty schedule start");
    run->add_option("--mu-end", ov.admm.mu_end, "penalty schedule end");
    run->add_option("--resize-height", ov.resize_height, "preprocessing height");
    run->add_option("--resize-width", ov.resize_width, "preprocessing width");

    // adjoint-check
    auto* adj = app.add_subcommand("adjoint-check", "dot-product test for all task operators");
    int adj_size = 16;
    std::uint64_t adj_seed = 7;
    adj->add_option("--size", adj_size, "test image side length");
    adj->add_option("--seed", adj_seed, "random seed");

    // lipschitz-report
    auto* lip = app.add_subcommand("lipschitz-report", "bound and estimate for a saved network");
    std::string net_path;
    int lip_pairs = 500;
    std::uint64_t lip_seed = 11;
    lip->add_option("--network", net_path, "network file")->required();
    lip->add_option("--pairs", lip_pairs, "sampled pairs");
    lip->add_option("--seed", lip_seed, "random seed");

    // metrics
    auto* met = app.add_subcommand("metrics", "PSNR/SSIM between two images");
    std::string ref_path, test_path;
    met->add_option("--reference", ref_path, "reference image")->required();
    met->add_option("--test", test_path, "test image")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            ov.task = kanpnp::task_from_string(task_str);
            ov.prior = kanpnp::prior_from_string(prior_str);
            std::vector<std::string> set_flags;
            for (const auto* opt : run->get_options())
                if (opt->count() > 0) set_flags.push_back(opt->get_name(false, true));
            // strip leading dashes
            for (auto& f : set_flags) f = f.substr(f.find_first_not_of('-'));
            return cmd_run(config_path, ov, set_flags);
        }
        if (adj->parsed()) return cmd_adjoint_check(adj_size, adj_seed);
        if (lip->parsed()) return cmd_lipschitz_report(net_path, lip_pairs, lip_seed);
        if (met->parsed()) return cmd_metrics(ref_path, test_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
