// Single-instance prior training: fit the coordinate network to one noisy
// observation with full-batch Adam, and realize the PnP denoising step as a
// short fine-tune against the current iterate followed by a render.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kanpnp/image.hpp"
#include "kanpnp/network.hpp"
#include "kanpnp/rng.hpp"

namespace kanpnp {

struct TrainConfig {
    int iterations = 100;
    double learning_rate = 0.001;
    double noise_sigma = 0.1;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t seed = 1;

    void validate() const {
        if (iterations < 0) throw std::invalid_argument("TrainConfig: iterations must be >= 0");
        if (learning_rate <= 0.0) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
        if (noise_sigma < 0.0) throw std::invalid_argument("TrainConfig: noise_sigma must be >= 0");
    }
};

struct DenoiseConfig {
    int inner_steps = 15;
    double inner_lr = 0.001;

    void validate() const {
        if (inner_steps < 0) throw std::invalid_argument("DenoiseConfig: inner_steps must be >= 0");
        if (inner_lr <= 0.0) throw std::invalid_argument("DenoiseConfig: inner_lr must be > 0");
    }
};

template <typename T>
struct CoordGridT {
    MatR<T> coords;  // H*W rows of (row, col) in [-1, 1], row-major
    int height = 0;
    int width = 0;
};

// Row-major grid coordinates normalized per axis; a single sample along an
// axis maps to the domain start.
template <typename T>
CoordGridT<T> coord_grid(int H, int W) {
    if (H < 1 || W < 1) throw std::invalid_argument("coord_grid: H and W must be >= 1");
    CoordGridT<T> g;
    g.height = H;
    g.width = W;
    g.coords.resize(static_cast<Eigen::Index>(H) * W, 2);
    for (int i = 0; i < H; ++i) {
        const T r = H == 1 ? T(-1) : T(-1) + T(2) * static_cast<T>(i) / static_cast<T>(H - 1);
        for (int j = 0; j < W; ++j) {
            const T c = W == 1 ? T(-1) : T(-1) + T(2) * static_cast<T>(j) / static_cast<T>(W - 1);
            g.coords(static_cast<Eigen::Index>(i) * W + j, 0) = r;
            g.coords(static_cast<Eigen::Index>(i) * W + j, 1) = c;
        }
    }
    return g;
}

template <typename T>
struct AdamStateT {
    std::vector<MatR<T>> m_coeff, v_coeff, m_base, v_base;
    int step = 0;

    static AdamStateT zeros_like(const KanNetworkT<T>& net) {
        AdamStateT s;
        for (const auto& layer : net.layers) {
            s.m_coeff.push_back(MatR<T>::Zero(layer.coeff.rows(), layer.coeff.cols()));
            s.v_coeff.push_back(MatR<T>::Zero(layer.coeff.rows(), layer.coeff.cols()));
            s.m_base.push_back(MatR<T>::Zero(layer.base_weight.rows(), layer.base_weight.cols()));
            s.v_base.push_back(MatR<T>::Zero(layer.base_weight.rows(), layer.base_weight.cols()));
        }
        return s;
    }
};

// One bias-corrected Adam update over a flat parameter array. `t` is the
// 1-based step count after this update.
template <typename T>
void adam_step(T* params, const T* grads, T* m, T* v, std::size_t n, int t, double lr,
               double b1, double b2, double eps) {
    const T c1 = static_cast<T>(1.0 / (1.0 - std::pow(b1, t)));
    const T c2 = static_cast<T>(1.0 / (1.0 - std::pow(b2, t)));
    const T tb1 = static_cast<T>(b1), tb2 = static_cast<T>(b2);
    const T tlr = static_cast<T>(lr), teps = static_cast<T>(eps);
    for (std::size_t i = 0; i < n; ++i) {
        const T g = grads[i];
        m[i] = tb1 * m[i] + (T(1) - tb1) * g;
        v[i] = tb2 * v[i] + (T(1) - tb2) * g * g;
        params[i] -= tlr * (m[i] * c1) / (std::sqrt(v[i] * c2) + teps);
    }
}

template <typename T>
void adam_update(KanNetworkT<T>& net, const GradientBundleT<T>& g, AdamStateT<T>& state,
                 double lr, double b1, double b2, double eps) {
    ++state.step;
    for (int l = 0; l < net.layer_count(); ++l) {
        auto& layer = net.layers[l];
        adam_step(layer.coeff.data(), g.coeff_grad[l].data(), state.m_coeff[l].data(),
                  state.v_coeff[l].data(), layer.coeff.size(), state.step, lr, b1, b2, eps);
        adam_step(layer.base_weight.data(), g.base_grad[l].data(), state.m_base[l].data(),
                  state.v_base[l].data(), layer.base_weight.size(), state.step, lr, b1, b2,
                  eps);
    }
}

template <typename T>
MatR<T> image_to_matrix(const ImageGrid& img) {
    MatR<T> m(static_cast<Eigen::Index>(img.height) * img.width, img.channels);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(img.data[i]);
    return m;
}

template <typename T>
ImageGrid matrix_to_image(const MatR<T>& m, int H, int W) {
    ImageGrid img(H, W, static_cast<int>(m.cols()));
    for (std::size_t i = 0; i < img.data.size(); ++i)
        img.data[i] = static_cast<double>(m.data()[i]);
    return img;
}

// Unclamped render of the network over the pixel grid.
template <typename T>
ImageGrid render_network(const KanNetworkT<T>& net, int H, int W) {
    const CoordGridT<T> grid = coord_grid<T>(H, W);
    const MatR<T> out = forward(net, grid.coords).first;
    return matrix_to_image(out, H, W);
}

namespace detail {

// One full-batch MSE gradient step with per-chunk feature reuse between the
// forward and backward passes. Equivalent to forward + backward, but each
// chunk's basis features are computed once.
template <typename T>
double fused_mse_step(KanNetworkT<T>& net, const MatR<T>& coords, const MatR<T>& target,
                      GradientBundleT<T>& g) {
    constexpr int kStep = 8192;
    const int L = net.layer_count();
    const int N = static_cast<int>(coords.rows());
    const T scale = static_cast<T>(2.0 / static_cast<double>(target.size()));

    if (static_cast<int>(g.coeff_grad.size()) != L) {
        g.coeff_grad.resize(L);
        g.base_grad.resize(L);
    }
    for (int l = 0; l < L; ++l) {
        const auto& layer = net.layers[l];
        g.coeff_grad[l] = MatR<T>::Zero(layer.out_dim, layer.coeff.cols());
        g.base_grad[l] = MatR<T>::Zero(layer.out_dim, layer.in_dim);
    }

    double loss_acc = 0.0;
    std::vector<FeatureChunk<T>> feats(L);
    std::vector<MatR<T>> acts(L + 1);
    MatR<T> delta, spline_pull, base_pull, dx;
    for (int row0 = 0; row0 < N; row0 += kStep) {
        const int rows = std::min(kStep, N - row0);
        acts[0] = coords.middleRows(row0, rows);
        for (int l = 0; l < L; ++l) {
            const auto& layer = net.layers[l];
            fill_chunk(layer, acts[l], 0, rows, feats[l], l > 0);
            acts[l + 1].resize(rows, layer.out_dim);
            acts[l + 1].noalias() = feats[l].phi * layer.coeff.transpose();
            acts[l + 1].noalias() += feats[l].act * layer.base_weight.transpose();
        }
        delta = acts[L] - target.middleRows(row0, rows);
        loss_acc += delta.template cast<double>().squaredNorm();
        delta *= scale;

        for (int l = L - 1; l >= 0; --l) {
            const auto& layer = net.layers[l];
            const int n = layer.in_dim;
            const int nb = layer.n_basis();
            g.coeff_grad[l].noalias() += delta.transpose() * feats[l].phi;
            g.base_grad[l].noalias() += delta.transpose() * feats[l].act;
            if (l == 0) break;  // coordinate gradients are not needed

            spline_pull.resize(rows, static_cast<Eigen::Index>(n) * nb);
            base_pull.resize(rows, n);
            spline_pull.noalias() = delta * layer.coeff;
            base_pull.noalias() = delta * layer.base_weight;
            dx.resize(rows, n);
            const T lo = static_cast<T>(layer.basis.lo), hi = static_cast<T>(layer.basis.hi);
            for (int s = 0; s < rows; ++s) {
                const T* xr = acts[l].data() + static_cast<std::ptrdiff_t>(s) * n;
                const T* sp = spline_pull.data() + static_cast<std::ptrdiff_t>(s) * n * nb;
                const T* dp = feats[l].dphi.data() + static_cast<std::ptrdiff_t>(s) * n * nb;
                const T* bp = base_pull.data() + static_cast<std::ptrdiff_t>(s) * n;
                const T* da = feats[l].dact.data() + static_cast<std::ptrdiff_t>(s) * n;
                T* dxr = dx.data() + static_cast<std::ptrdiff_t>(s) * n;
                for (int i = 0; i < n; ++i) {
                    const T xi = xr[i];
                    if (xi < lo || xi > hi) {
                        dxr[i] = T(0);
                        continue;
                    }
                    T acc = bp[i] * da[i];
                    const T* spi = sp + static_cast<std::ptrdiff_t>(i) * nb;
                    const T* dpi = dp + static_cast<std::ptrdiff_t>(i) * nb;
                    for (int m = 0; m < nb; ++m) acc += spi[m] * dpi[m];
                    dxr[i] = acc;
                }
            }
            delta.swap(dx);
        }
    }
    return loss_acc / static_cast<double>(target.size());
}

template <typename T>
double mse_train_steps(KanNetworkT<T>& net, const MatR<T>& coords, const MatR<T>& target,
                       int steps, double lr, double b1, double b2, double eps,
                       std::vector<double>* trace) {
    AdamStateT<T> state = AdamStateT<T>::zeros_like(net);
    GradientBundleT<T> g;
    double last = 0.0;
    for (int it = 0; it < steps; ++it) {
        last = fused_mse_step(net, coords, target, g);
        if (trace) trace->push_back(last);
        adam_update(net, g, state, lr, b1, b2, eps);
    }
    return last;
}

}  // namespace detail

// Fits the network to observed + N(0, sigma^2) noise (clamped to [0,1]) for
// cfg.iterations full-batch Adam steps. Returns the trained network and the
// pre-update loss of every iteration.
template <typename T>
std::pair<KanNetworkT<T>, std::vector<double>> pretrain_prior(KanNetworkT<T> net,
                                                              const ImageGrid& observed,
                                                              const TrainConfig& cfg) {
    cfg.validate();
    if (net.out_dim() != observed.channels)
        throw std::invalid_argument("pretrain_prior: network output dim " +
                                    std::to_string(net.out_dim()) + " != image channels " +
                                    std::to_string(observed.channels));
    if (net.in_dim() != 2)
        throw std::invalid_argument("pretrain_prior: network input dim must be 2");
    std::vector<double> trace;
    if (cfg.iterations == 0) return {std::move(net), trace};

    Rng rng(cfg.seed);
    ImageGrid noisy = observed;
    for (double& v : noisy.data) {
        v = std::clamp(v + cfg.noise_sigma * rng.normal(), 0.0, 1.0);
    }
    const CoordGridT<T> grid = coord_grid<T>(observed.height, observed.width);
    const MatR<T> target = image_to_matrix<T>(noisy);
    detail::mse_train_steps(net, grid.coords, target, cfg.iterations, cfg.learning_rate,
                            cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps, &trace);
    return {std::move(net), std::move(trace)};
}

// PnP denoising step for the coordinate prior: fine-tune on the target for
// inner_steps, then render. inner_steps = 0 renders the current network
// untouched. The returned image is intentionally not clamped.
template <typename T>
std::pair<ImageGrid, KanNetworkT<T>> apply_denoiser(KanNetworkT<T> net, const ImageGrid& target,
                                                    const DenoiseConfig& cfg) {
    cfg.validate();
    if (net.out_dim() != target.channels)
        throw std::invalid_argument("apply_denoiser: channel mismatch");
    if (cfg.inner_steps > 0) {
        const CoordGridT<T> grid = coord_grid<T>(target.height, target.width);
        const MatR<T> tgt = image_to_matrix<T>(target);
        detail::mse_train_steps(net, grid.coords, tgt, cfg.inner_steps, cfg.inner_lr, 0.9,
                                0.999, 1e-8, nullptr);
    }
    ImageGrid render = render_network(net, target.height, target.width);
    return {std::move(render), std::move(net)};
}

void write_loss_csv(const std::string& path, const std::vector<double>& trace);

}  // namespace kanpnp
