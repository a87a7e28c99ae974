// PnP-ADMM driver: denoise, data-fidelity prox, dual update, with a
// geometric penalty schedule and consensus-residual tracking.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kanpnp/denoiser.hpp"
#include "kanpnp/image.hpp"
#include "kanpnp/lipschitz.hpp"
#include "kanpnp/network.hpp"
#include "kanpnp/operators.hpp"
#include "kanpnp/prox.hpp"
#include "kanpnp/trainer.hpp"

namespace kanpnp {

struct AdmmConfig {
    int iterations = 5;
    double mu_start = 2.0;
    double mu_end = 0.2;
    DenoiseConfig denoise;
    CgConfig cg;
    bool record_trace = true;
    std::uint64_t seed = 0;

    void validate() const {
        if (iterations < 1) throw std::invalid_argument("AdmmConfig: iterations must be >= 1");
        if (!(mu_start >= mu_end && mu_end > 0.0))
            throw std::invalid_argument("AdmmConfig: need mu_start >= mu_end > 0");
        denoise.validate();
    }
};

struct AdmmTraceRecord {
    int k = 0;
    double mu = 0.0;
    double consensus_residual = 0.0;  // ||x - z||_2
    double fidelity = 0.0;            // ||A z - y||^2
    std::optional<double> psnr;       // vs ground truth, when provided
};

struct AdmmState {
    ImageGrid x, z, u;
    int k = 0;
    std::vector<AdmmTraceRecord> trace;
};

// K penalty values log-spaced from mu_start down to mu_end, inclusive.
std::vector<double> mu_schedule(double mu_start, double mu_end, int K);

// Task-appropriate lift of the measurement into image space: y itself for
// same-space operators, otherwise the adjoint normalized pointwise by the
// adjoint of an all-ones measurement.
ImageGrid back_project(const ForwardOperator& op, const ImageGrid& y);

AdmmState init_state(const ImageGrid& y, const ForwardOperator& op, Denoiser& prior);

// x0 is the plain render of the (pretrained) network.
template <typename T>
AdmmState init_state(const ImageGrid& y, const ForwardOperator& op, const KanNetworkT<T>& net) {
    KanDenoiser<T> prior(net, DenoiseConfig{});
    return init_state(y, op, prior);
}

// Step observer for tests; receives ("denoise" | "fidelity" | "dual", k).
using AdmmObserver = std::function<void(const char*, int)>;

struct AdmmResult {
    ImageGrid reconstruction;  // clamped z
    AdmmState state;
};

AdmmResult run_admm(const ImageGrid& y, const ForwardOperator& op, Denoiser& prior,
                    const AdmmConfig& cfg, const ImageGrid* ground_truth = nullptr,
                    const AdmmObserver& observer = nullptr);

template <typename T>
struct PnpAdmmResult {
    ImageGrid reconstruction;
    AdmmState state;
    KanNetworkT<T> net;
};

template <typename T>
PnpAdmmResult<T> run_pnp_admm(const ImageGrid& y, const ForwardOperator& op,
                              KanNetworkT<T> net, const AdmmConfig& cfg,
                              const ImageGrid* ground_truth = nullptr) {
    KanDenoiser<T> prior(std::move(net), cfg.denoise);
    AdmmResult r = run_admm(y, op, prior, cfg, ground_truth);
    return {std::move(r.reconstruction), std::move(r.state), prior.take_network()};
}

struct FixedPointReport {
    std::vector<double> residuals;
    bool final_below_initial = false;
    double lipschitz_bound = 0.0;
    double lipschitz_bound_maxrow = 0.0;
    double lipschitz_emp = 0.0;
    std::vector<bool> mu_above_bound;      // mu_k > certified bound
    std::vector<bool> mu_above_empirical;  // mu_k > sampled estimate
};

template <typename T>
FixedPointReport fixed_point_report(const AdmmState& state, const KanNetworkT<T>& net) {
    FixedPointReport rep;
    rep.lipschitz_bound = lipschitz_upper_bound(net);
    rep.lipschitz_bound_maxrow = lipschitz_upper_bound_maxrow(net);
    rep.lipschitz_emp = lipschitz_empirical(net, 500, 20240u);
    for (const auto& rec : state.trace) {
        rep.residuals.push_back(rec.consensus_residual);
        rep.mu_above_bound.push_back(rec.mu > rep.lipschitz_bound);
        rep.mu_above_empirical.push_back(rec.mu > rep.lipschitz_emp);
    }
    if (!rep.residuals.empty())
        rep.final_below_initial = rep.residuals.back() < rep.residuals.front();
    return rep;
}

void write_trace_csv(const std::string& path, const std::vector<AdmmTraceRecord>& trace);

}  // namespace kanpnp
