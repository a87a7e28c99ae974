#include "kanpnp/experiment.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "kanpnp/image_io.hpp"
#include "kanpnp/metrics.hpp"
#include "kanpnp/resize.hpp"

namespace kanpnp {

using nlohmann::json;

std::string to_string(Task t) {
    switch (t) {
        case Task::Sr2: return "sr2";
        case Task::Sr4: return "sr4";
        case Task::Sr8: return "sr8";
        case Task::Deconv: return "deconv";
        case Task::Demosaic: return "demosaic";
        case Task::Joint: return "joint";
    }
    return "?";
}

std::string to_string(PriorKind p) {
    switch (p) {
        case PriorKind::KanBspline: return "kan_bspline";
        case PriorKind::KanFourier: return "kan_fourier";
        case PriorKind::Tv: return "tv";
    }
    return "?";
}

Task task_from_string(const std::string& s) {
    for (Task t : {Task::Sr2, Task::Sr4, Task::Sr8, Task::Deconv, Task::Demosaic, Task::Joint})
        if (to_string(t) == s) return t;
    throw std::invalid_argument("unknown task: " + s);
}

PriorKind prior_from_string(const std::string& s) {
    for (PriorKind p : {PriorKind::KanBspline, PriorKind::KanFourier, PriorKind::Tv})
        if (to_string(p) == s) return p;
    throw std::invalid_argument("unknown prior: " + s);
}

json ExperimentConfig::to_json() const {
    json j;
    j["task"] = to_string(task);
    j["prior"] = to_string(prior);
    j["input"] = input_path;
    j["ground_truth"] = ground_truth_path;
    j["train"] = {{"iterations", train.iterations},
                  {"learning_rate", train.learning_rate},
                  {"noise_sigma", train.noise_sigma},
                  {"adam_beta1", train.adam_beta1},
                  {"adam_beta2", train.adam_beta2},
                  {"adam_eps", train.adam_eps},
                  {"seed", train.seed}};
    j["admm"] = {{"iterations", admm.iterations},
                 {"mu_start", admm.mu_start},
                 {"mu_end", admm.mu_end},
                 {"inner_steps", admm.denoise.inner_steps},
                 {"inner_lr", admm.denoise.inner_lr},
                 {"cg_tol", admm.cg.tol},
                 {"cg_max_iters", admm.cg.max_iters},
                 {"record_trace", admm.record_trace},
                 {"seed", admm.seed}};
    j["network"] = {{"hidden_dims", hidden_dims},
                    {"grid_size", grid_size},
                    {"spline_order", spline_order},
                    {"fourier_order", fourier_order}};
    j["resize_height"] = resize_height;
    j["resize_width"] = resize_width;
    j["measurement_noise"] = measurement_noise;
    j["psf_size"] = psf_size;
    j["psf_sigma"] = psf_sigma;
    j["psf_path"] = psf_path;
    j["tv_weight"] = tv_weight;
    j["tv_iters"] = tv_iters;
    j["output_dir"] = output_dir;
    j["seed"] = seed;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig c;
    c.task = task_from_string(j.value("task", to_string(c.task)));
    c.prior = prior_from_string(j.value("prior", to_string(c.prior)));
    c.input_path = j.value("input", c.input_path);
    c.ground_truth_path = j.value("ground_truth", c.ground_truth_path);
    if (j.contains("train")) {
        const auto& t = j.at("train");
        c.train.iterations = t.value("iterations", c.train.iterations);
        c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
        c.train.noise_sigma = t.value("noise_sigma", c.train.noise_sigma);
        c.train.adam_beta1 = t.value("adam_beta1", c.train.adam_beta1);
        c.train.adam_beta2 = t.value("adam_beta2", c.train.adam_beta2);
        c.train.adam_eps = t.value("adam_eps", c.train.adam_eps);
        c.train.seed = t.value("seed", c.train.seed);
    }
    if (j.contains("admm")) {
        const auto& a = j.at("admm");
        c.admm.iterations = a.value("iterations", c.admm.iterations);
        c.admm.mu_start = a.value("mu_start", c.admm.mu_start);
        c.admm.mu_end = a.value("mu_end", c.admm.mu_end);
        c.admm.denoise.inner_steps = a.value("inner_steps", c.admm.denoise.inner_steps);
        c.admm.denoise.inner_lr = a.value("inner_lr", c.admm.denoise.inner_lr);
        c.admm.cg.tol = a.value("cg_tol", c.admm.cg.tol);
        c.admm.cg.max_iters = a.value("cg_max_iters", c.admm.cg.max_iters);
        c.admm.record_trace = a.value("record_trace", c.admm.record_trace);
        c.admm.seed = a.value("seed", c.admm.seed);
    }
    if (j.contains("network")) {
        const auto& n = j.at("network");
        c.hidden_dims = n.value("hidden_dims", c.hidden_dims);
        c.grid_size = n.value("grid_size", c.grid_size);
        c.spline_order = n.value("spline_order", c.spline_order);
        c.fourier_order = n.value("fourier_order", c.fourier_order);
    }
    c.resize_height = j.value("resize_height", c.resize_height);
    c.resize_width = j.value("resize_width", c.resize_width);
    c.measurement_noise = j.value("measurement_noise", c.measurement_noise);
    c.psf_size = j.value("psf_size", c.psf_size);
    c.psf_sigma = j.value("psf_sigma", c.psf_sigma);
    c.psf_path = j.value("psf_path", c.psf_path);
    c.tv_weight = j.value("tv_weight", c.tv_weight);
    c.tv_iters = j.value("tv_iters", c.tv_iters);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.seed = j.value("seed", c.seed);
    return c;
}

json MetricsReport::to_json() const {
    json j;
    j["schema_version"] = schema_version;
    j["task"] = to_string(task);
    j["prior"] = to_string(prior);
    if (psnr_db) j["psnr"] = *psnr_db;
    if (ssim_score) j["ssim"] = *ssim_score;
    if (bicubic_psnr_db) j["bicubic_psnr"] = *bicubic_psnr_db;
    json residuals = json::array(), fidelity = json::array(), psnr_trace = json::array();
    for (const auto& r : trace) {
        residuals.push_back(r.consensus_residual);
        fidelity.push_back(r.fidelity);
        if (r.psnr) psnr_trace.push_back(*r.psnr);
    }
    j["residuals"] = residuals;
    j["fidelity"] = fidelity;
    if (!psnr_trace.empty()) j["psnr_trace"] = psnr_trace;
    j["mu_schedule"] = mu_values;
    if (lipschitz_bound) {
        j["lipschitz"] = {{"bound", *lipschitz_bound},
                          {"bound_maxrow", *lipschitz_bound_maxrow},
                          {"empirical", *lipschitz_emp}};
    }
    if (!pretrain_loss.empty()) {
        j["pretrain_loss_first"] = pretrain_loss.front();
        j["pretrain_loss_last"] = pretrain_loss.back();
    }
    j["wall_time_sec"] = wall_time_sec;
    j["outputs"] = {{"reconstruction", reconstruction_path},
                    {"trace_csv", trace_csv_path},
                    {"loss_csv", loss_csv_path},
                    {"network", network_path}};
    j["config"] = config_snapshot;
    return j;
}

int task_divisor(Task t) {
    switch (t) {
        case Task::Sr2: return 2;
        case Task::Sr4: return 4;
        case Task::Sr8: return 8;
        case Task::Deconv: return 1;
        case Task::Demosaic: return 2;
        case Task::Joint: return 2;
    }
    return 1;
}

namespace {

int sr_factor(Task t) {
    return t == Task::Sr2 ? 2 : t == Task::Sr4 ? 4 : t == Task::Sr8 ? 8 : 0;
}

std::vector<double> task_psf(const ExperimentConfig& cfg, int& ph, int& pw) {
    if (!cfg.psf_path.empty()) return load_psf_text(cfg.psf_path, ph, pw);
    ph = pw = cfg.psf_size;
    return gaussian_psf(cfg.psf_size, cfg.psf_sigma);
}

}  // namespace

ForwardOperator make_task_operator(const ExperimentConfig& cfg, int H, int W, int C) {
    switch (cfg.task) {
        case Task::Sr2:
        case Task::Sr4:
        case Task::Sr8:
            return make_downsample(H, W, sr_factor(cfg.task), C);
        case Task::Deconv: {
            int ph, pw;
            const auto psf = task_psf(cfg, ph, pw);
            return make_blur(psf, ph, pw, H, W, C);
        }
        case Task::Demosaic:
            return make_mosaic(H, W, BayerPattern::RGGB);
        case Task::Joint: {
            int ph, pw;
            const auto psf = task_psf(cfg, ph, pw);
            return compose(make_mosaic(H, W, BayerPattern::RGGB),
                           make_blur(psf, ph, pw, H, W, C));
        }
    }
    throw std::logic_error("make_task_operator: unknown task");
}

std::string resolve_output_dir(const std::string& output_dir) {
    std::filesystem::path p(output_dir);
    if (p.is_relative()) {
        if (const char* root = std::getenv("KANPNP_OUTPUT_ROOT"))
            p = std::filesystem::path(root) / p;
    }
    return p.string();
}

MetricsReport run_experiment(const ExperimentConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    const std::string out_dir = resolve_output_dir(cfg.output_dir);
    std::filesystem::create_directories(out_dir);

    // --- assemble ground truth (optional) and measurement
    std::optional<ImageGrid> gt;
    ImageGrid y;
    ForwardOperator op;
    const int divisor = task_divisor(cfg.task);
    if (!cfg.ground_truth_path.empty()) {
        ImageGrid full = load_image(cfg.ground_truth_path);
        if ((cfg.task == Task::Demosaic || cfg.task == Task::Joint) && full.channels != 3)
            throw std::runtime_error("run_experiment: mosaic tasks need a color ground truth");
        full = area_resize(full, cfg.resize_height, cfg.resize_width);
        full = crop_to_multiple(full, divisor);
        gt = std::move(full);
        op = make_task_operator(cfg, gt->height, gt->width, gt->channels);
        if (!cfg.input_path.empty()) {
            y = load_image(cfg.input_path);
        } else {
            y = op.apply(*gt);
            if (cfg.measurement_noise > 0.0) {
                Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
                for (double& v : y.data) v += cfg.measurement_noise * rng.normal();
            }
        }
    } else {
        if (cfg.input_path.empty())
            throw std::invalid_argument("run_experiment: need input or ground_truth path");
        y = load_image(cfg.input_path);
        const int f = sr_factor(cfg.task);
        const int H = f > 0 ? y.height * f : y.height;
        const int W = f > 0 ? y.width * f : y.width;
        const int C = cfg.task == Task::Demosaic || cfg.task == Task::Joint ? 3 : y.channels;
        op = make_task_operator(cfg, H, W, C);
    }
    if (y.height != op.out_shape.h || y.width != op.out_shape.w || y.channels != op.out_shape.c)
        throw std::runtime_error("run_experiment: measurement does not match the task operator");

    // --- back-projection, prior setup, pretraining
    MetricsReport rep;
    rep.task = cfg.task;
    rep.prior = cfg.prior;
    rep.config_snapshot = cfg.to_json();
    rep.mu_values = mu_schedule(cfg.admm.mu_start, cfg.admm.mu_end, cfg.admm.iterations);

    const ImageGrid z0 = back_project(op, y);
    std::unique_ptr<Denoiser> prior;
    std::optional<KanNetworkT<float>> trained;
    if (cfg.prior == PriorKind::Tv) {
        prior = std::make_unique<TvDenoiser>(cfg.tv_weight, cfg.tv_iters);
    } else {
        BasisSpec basis;
        basis.kind = cfg.prior == PriorKind::KanBspline ? BasisKind::BSpline : BasisKind::Fourier;
        basis.grid_size = cfg.grid_size;
        basis.order = cfg.prior == PriorKind::KanBspline ? cfg.spline_order : cfg.fourier_order;
        std::vector<int> dims;
        dims.push_back(2);
        dims.insert(dims.end(), cfg.hidden_dims.begin(), cfg.hidden_dims.end());
        dims.push_back(op.in_shape.c);
        auto net = init_network<float>(dims, basis, cfg.seed);
        auto [fitted, loss] = pretrain_prior(std::move(net), z0, cfg.train);
        rep.pretrain_loss = std::move(loss);
        trained = std::move(fitted);
        prior = std::make_unique<KanDenoiser<float>>(*trained, cfg.admm.denoise);
    }

    // --- PnP-ADMM
    AdmmResult result = run_admm(y, op, *prior, cfg.admm, gt ? &*gt : nullptr);

    // --- evaluation and artifacts
    if (gt) {
        rep.psnr_db = psnr(*gt, result.reconstruction);
        rep.ssim_score = ssim(*gt, result.reconstruction);
        const int f = sr_factor(cfg.task);
        if (f > 0) rep.bicubic_psnr_db = psnr(*gt, clamp01(bicubic_upsample(y, f)));
    }
    rep.trace = result.state.trace;

    const auto out = [&](const std::string& name) {
        return (std::filesystem::path(out_dir) / name).string();
    };
    rep.reconstruction_path = out("reconstruction.png");
    save_image(result.reconstruction, rep.reconstruction_path);
    rep.trace_csv_path = out("trace.csv");
    write_trace_csv(rep.trace_csv_path, result.state.trace);
    if (!rep.pretrain_loss.empty()) {
        rep.loss_csv_path = out("pretrain_loss.csv");
        write_loss_csv(rep.loss_csv_path, rep.pretrain_loss);
    }
    if (cfg.prior != PriorKind::Tv) {
        auto* kan = static_cast<KanDenoiser<float>*>(prior.get());
        rep.lipschitz_bound = lipschitz_upper_bound(kan->network());
        rep.lipschitz_bound_maxrow = lipschitz_upper_bound_maxrow(kan->network());
        rep.lipschitz_emp = lipschitz_empirical(kan->network(), 500, cfg.seed + 7);
        rep.network_path = out("network.bin");
        save_network(kan->network(), rep.network_path);
    }

    rep.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    std::ofstream report_file(out("report.json"));
    report_file << rep.to_json().dump(2) << "\n";
    return rep;
}

}  // namespace kanpnp
