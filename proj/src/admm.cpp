#include "kanpnp/admm.hpp"

#include <cmath>
#include <cstdio>

#include "kanpnp/metrics.hpp"

namespace kanpnp {

std::vector<double> mu_schedule(double mu_start, double mu_end, int K) {
    if (K < 1) throw std::invalid_argument("mu_schedule: K must be >= 1");
    if (!(mu_start >= mu_end && mu_end > 0.0))
        throw std::invalid_argument("mu_schedule: need mu_start >= mu_end > 0");
    std::vector<double> mus(K);
    if (K == 1 || mu_start == mu_end) {
        std::fill(mus.begin(), mus.end(), mu_start);
        mus[0] = mu_start;
        return mus;
    }
    const double ratio = std::pow(mu_end / mu_start, 1.0 / (K - 1));
    for (int k = 0; k < K; ++k) mus[k] = mu_start * std::pow(ratio, k);
    mus[K - 1] = mu_end;
    return mus;
}

ImageGrid back_project(const ForwardOperator& op, const ImageGrid& y) {
    if (op.in_shape == op.out_shape && op.kind == OperatorKind::Blur) return y;
    const ImageGrid numer = op.adjoint(y);
    const ImageGrid ones(op.out_shape.h, op.out_shape.w, op.out_shape.c, 1.0);
    const ImageGrid denom = op.adjoint(ones);
    ImageGrid z0(numer.height, numer.width, numer.channels);
    for (std::size_t i = 0; i < z0.data.size(); ++i)
        z0.data[i] = std::abs(denom.data[i]) > 1e-12 ? numer.data[i] / denom.data[i] : 0.0;
    return z0;
}

AdmmState init_state(const ImageGrid& y, const ForwardOperator& op, Denoiser& prior) {
    AdmmState st;
    st.z = back_project(op, y);
    st.x = prior.init_estimate(st.z);
    st.u = ImageGrid(st.z.height, st.z.width, st.z.channels, 0.0);
    require_same_shape(st.x, st.z, "init_state");
    return st;
}

namespace {

void check_finite(const ImageGrid& img, const char* step, int k) {
    if (!all_finite(img))
        throw std::runtime_error(std::string("run_admm: non-finite iterate after the ") + step +
                                 " step at iteration " + std::to_string(k));
}

}  // namespace

AdmmResult run_admm(const ImageGrid& y, const ForwardOperator& op, Denoiser& prior,
                    const AdmmConfig& cfg, const ImageGrid* ground_truth,
                    const AdmmObserver& observer) {
    cfg.validate();
    const std::vector<double> mus = mu_schedule(cfg.mu_start, cfg.mu_end, cfg.iterations);
    AdmmState st = init_state(y, op, prior);

    for (int k = 0; k < cfg.iterations; ++k) {
        const double mu = mus[k];

        if (observer) observer("denoise", k);
        st.x = prior.apply(add_scaled(st.z, st.u, -1.0));
        check_finite(st.x, "denoising", k);

        if (observer) observer("fidelity", k);
        st.z = prox_data_fidelity(op, y, add_scaled(st.x, st.u, 1.0), mu, cfg.cg);
        check_finite(st.z, "data-fidelity", k);

        if (observer) observer("dual", k);
        st.u = add_scaled(st.u, add_scaled(st.x, st.z, -1.0), 1.0);
        check_finite(st.u, "dual-update", k);

        st.k = k + 1;
        if (cfg.record_trace) {
            AdmmTraceRecord rec;
            rec.k = k;
            rec.mu = mu;
            rec.consensus_residual = l2_norm(add_scaled(st.x, st.z, -1.0));
            const ImageGrid resid = add_scaled(op.apply(st.z), y, -1.0);
            rec.fidelity = dot(resid, resid);
            if (ground_truth) rec.psnr = psnr(*ground_truth, clamp01(st.z));
            st.trace.push_back(rec);
        }
    }
    return {clamp01(st.z), std::move(st)};
}

void write_trace_csv(const std::string& path, const std::vector<AdmmTraceRecord>& trace) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    std::fprintf(f, "k,mu,consensus_residual,fidelity,psnr\n");
    for (const auto& r : trace) {
        if (r.psnr)
            std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g\n", r.k, r.mu, r.consensus_residual,
                         r.fidelity, *r.psnr);
        else
            std::fprintf(f, "%d,%.17g,%.17g,%.17g,\n", r.k, r.mu, r.consensus_residual,
                         r.fidelity);
    }
    std::fclose(f);
}

}  // namespace kanpnp
