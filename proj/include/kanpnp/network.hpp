// KAN layers and networks: every edge carries a learnable univariate spline
// plus a weighted silu base branch; neuron outputs are plain sums over
// incoming edges. Batch evaluation is chunked so the per-layer basis
// matrices stay cache-sized.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kanpnp/basis.hpp"
#include "kanpnp/rng.hpp"

namespace kanpnp {

template <typename T>
using MatR = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// certified global bound on |d/dx silu(x)|
inline constexpr double kSiluDerivBound = 1.1;

template <typename T>
inline T silu(T x) {
    return x / (T(1) + std::exp(-x));
}

template <typename T>
inline T silu_deriv(T x) {
    const T s = T(1) / (T(1) + std::exp(-x));
    return s * (T(1) + x * (T(1) - s));
}

template <typename T>
struct KanLayerT {
    int in_dim = 0;
    int out_dim = 0;
    BasisSpec basis;
    // spline coefficients, row j holds [i * n_basis + m] for edge (j, i)
    MatR<T> coeff;
    // base-branch weights, out_dim x in_dim
    MatR<T> base_weight;

    int n_basis() const { return basis.basis_count(); }
};

template <typename T>
struct KanNetworkT {
    std::vector<KanLayerT<T>> layers;
    std::vector<int> dims;
    std::uint64_t seed = 0;

    int in_dim() const { return dims.front(); }
    int out_dim() const { return dims.back(); }
    int layer_count() const { return static_cast<int>(layers.size()); }
};

using KanNetwork = KanNetworkT<double>;
using KanNetworkF = KanNetworkT<float>;

template <typename T>
struct ForwardCacheT {
    // raw (pre-clamp) input batch of every layer, in layer order
    std::vector<MatR<T>> inputs;
    int batch_rows = 0;
};

template <typename T>
struct GradientBundleT {
    std::vector<MatR<T>> coeff_grad;
    std::vector<MatR<T>> base_grad;
    MatR<T> input_grad;
};

namespace detail {

inline constexpr int kChunkRows = 16384;

// Per-chunk feature scratch, reused across chunks of one pass.
template <typename T>
struct FeatureChunk {
    MatR<T> xc;         // clamped inputs, rows x n
    MatR<T> sig;        // sigmoid(xc)
    MatR<T> act, dact;  // silu and its derivative
    MatR<T> phi, dphi;  // basis values / derivatives, rows x (n*nb)

    void resize(int rows, int n, int nb, bool with_deriv) {
        xc.resize(rows, n);
        sig.resize(rows, n);
        act.resize(rows, n);
        phi.resize(rows, static_cast<Eigen::Index>(n) * nb);
        if (with_deriv) {
            dact.resize(rows, n);
            dphi.resize(rows, static_cast<Eigen::Index>(n) * nb);
        }
    }
};

// Fills one chunk of features: basis values of every clamped input
// coordinate (concatenated per sample) plus the silu branch, and optionally
// the derivatives of both. The activation pass is vectorized; the B-spline
// triangle runs per value with the uniform-knot recursion.
template <typename T>
void fill_chunk(const KanLayerT<T>& layer, const MatR<T>& x, int row0, int rows,
                FeatureChunk<T>& f, bool with_deriv) {
    const int n = layer.in_dim;
    const int nb = layer.n_basis();
    const BasisSpec& b = layer.basis;
    f.resize(rows, n, nb, with_deriv);

    f.xc = x.middleRows(row0, rows)
               .cwiseMax(static_cast<T>(b.lo))
               .cwiseMin(static_cast<T>(b.hi));
    f.sig = ((-f.xc.array()).exp() + T(1)).inverse();
    f.act.array() = f.xc.array() * f.sig.array();
    if (with_deriv)
        f.dact.array() = f.sig.array() * (T(1) + f.xc.array() * (T(1) - f.sig.array()));

    const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(rows) * n;
    if (b.kind == BasisKind::BSpline) {
        constexpr int kLanes = 16;
        const int k = b.order;
        const T inv_h = T(1) / static_cast<T>(b.spacing());
        const T lo = static_cast<T>(b.lo);
        // lane-blocked triangle: identical branch-free arithmetic in every
        // lane, so the level updates vectorize
        T u[kLanes], vals[16][kLanes], low[16][kLanes], saved[kLanes];
        int cell[kLanes];
        for (std::ptrdiff_t idx0 = 0; idx0 < total; idx0 += kLanes) {
            const int lanes = static_cast<int>(std::min<std::ptrdiff_t>(kLanes, total - idx0));
            for (int l = 0; l < lanes; ++l) {
                const T t = (f.xc.data()[idx0 + l] - lo) * inv_h;
                int c = static_cast<int>(t);
                if (c >= b.grid_size) c = b.grid_size - 1;
                cell[l] = c;
                u[l] = t - static_cast<T>(c);
            }
            for (int l = lanes; l < kLanes; ++l) u[l] = T(0);  // idle lanes
            for (int l = 0; l < kLanes; ++l) vals[0][l] = T(1);
            for (int d = 1; d <= k; ++d) {
                if (with_deriv && d == k)
                    for (int r = 0; r < k; ++r)
                        for (int l = 0; l < kLanes; ++l) low[r][l] = vals[r][l];
                const T inv_d = T(1) / static_cast<T>(d);
                for (int l = 0; l < kLanes; ++l) saved[l] = T(0);
                for (int r = 0; r < d; ++r) {
                    for (int l = 0; l < kLanes; ++l) {
                        const T temp = vals[r][l] * inv_d;
                        vals[r][l] = saved[l] + (static_cast<T>(r + 1) - u[l]) * temp;
                        saved[l] = (u[l] + static_cast<T>(d - r - 1)) * temp;
                    }
                }
                for (int l = 0; l < kLanes; ++l) vals[d][l] = saved[l];
            }
            for (int l = 0; l < lanes; ++l) {
                T* pp = f.phi.data() + (idx0 + l) * nb;
                for (int m = 0; m < nb; ++m) pp[m] = T(0);
                for (int r = 0; r <= k; ++r) pp[cell[l] + r] = vals[r][l];
            }
            if (with_deriv) {
                for (int l = 0; l < lanes; ++l) {
                    T* dp = f.dphi.data() + (idx0 + l) * nb;
                    for (int m = 0; m < nb; ++m) dp[m] = T(0);
                    if (k == 1) {
                        dp[cell[l]] = -inv_h;
                        dp[cell[l] + 1] = inv_h;
                    } else {
                        dp[cell[l]] = -low[0][l] * inv_h;
                        for (int r = 1; r < k; ++r)
                            dp[cell[l] + r] = (low[r - 1][l] - low[r][l]) * inv_h;
                        dp[cell[l] + k] = low[k - 1][l] * inv_h;
                    }
                }
            }
        }
    } else {
        // harmonics by angle recurrence, one sincos per value
        const T w1 = T(2) * static_cast<T>(M_PI) / static_cast<T>(b.hi - b.lo);
        const T lo = static_cast<T>(b.lo);
        for (std::ptrdiff_t idx = 0; idx < total; ++idx) {
            const T theta = w1 * (f.xc.data()[idx] - lo);
            const T c1 = std::cos(theta), s1 = std::sin(theta);
            T* pp = f.phi.data() + idx * nb;
            T* dp = with_deriv ? f.dphi.data() + idx * nb : nullptr;
            pp[0] = T(1);
            if (dp) dp[0] = T(0);
            T cm = c1, sm = s1;
            for (int m = 1; m <= b.order; ++m) {
                pp[2 * m - 1] = cm;
                pp[2 * m] = sm;
                if (dp) {
                    const T w = static_cast<T>(m) * w1;
                    dp[2 * m - 1] = -w * sm;
                    dp[2 * m] = w * cm;
                }
                const T cn = cm * c1 - sm * s1;
                sm = sm * c1 + cm * s1;
                cm = cn;
            }
        }
    }
}

}  // namespace detail

template <typename T>
MatR<T> layer_forward(const KanLayerT<T>& layer, const MatR<T>& x) {
    if (x.cols() != layer.in_dim)
        throw std::invalid_argument("layer_forward: input width " + std::to_string(x.cols()) +
                                    " does not match layer in_dim " + std::to_string(layer.in_dim));
    const int N = static_cast<int>(x.rows());
    MatR<T> out(N, layer.out_dim);
    detail::FeatureChunk<T> f;
    for (int row0 = 0; row0 < N; row0 += detail::kChunkRows) {
        const int rows = std::min(detail::kChunkRows, N - row0);
        detail::fill_chunk(layer, x, row0, rows, f, false);
        out.middleRows(row0, rows).noalias() = f.phi * layer.coeff.transpose();
        out.middleRows(row0, rows).noalias() += f.act * layer.base_weight.transpose();
    }
    return out;
}

template <typename T>
std::pair<MatR<T>, ForwardCacheT<T>> forward(const KanNetworkT<T>& net, const MatR<T>& batch) {
    if (batch.cols() != net.in_dim())
        throw std::invalid_argument("forward: batch width does not match network input dim");
    if (!batch.allFinite())
        throw std::invalid_argument("forward: batch contains non-finite values");
    ForwardCacheT<T> cache;
    cache.batch_rows = static_cast<int>(batch.rows());
    cache.inputs.reserve(net.layers.size());
    MatR<T> cur = batch;
    for (const auto& layer : net.layers) {
        cache.inputs.push_back(cur);
        cur = layer_forward(layer, cur);
    }
    return {std::move(cur), std::move(cache)};
}

// Gradients of sum(outputs .* out_grad) with respect to all parameters and
// the batch inputs. Chunk accumulation order is fixed, so results are
// reproducible run to run.
template <typename T>
GradientBundleT<T> backward(const KanNetworkT<T>& net, const ForwardCacheT<T>& cache,
                            const MatR<T>& out_grad) {
    const int L = net.layer_count();
    if (static_cast<int>(cache.inputs.size()) != L)
        throw std::invalid_argument("backward: cache does not match network layer count");
    if (out_grad.rows() != cache.batch_rows || out_grad.cols() != net.out_dim())
        throw std::invalid_argument("backward: out_grad shape does not match cached forward pass");

    GradientBundleT<T> g;
    g.coeff_grad.resize(L);
    g.base_grad.resize(L);

    MatR<T> delta = out_grad;  // gradient flowing into the current layer's outputs
    for (int l = L - 1; l >= 0; --l) {
        const auto& layer = net.layers[l];
        const MatR<T>& x = cache.inputs[l];
        if (x.cols() != layer.in_dim || x.rows() != cache.batch_rows)
            throw std::invalid_argument("backward: cached inputs are inconsistent");
        const int N = static_cast<int>(x.rows());
        const int n = layer.in_dim;
        const int nb = layer.n_basis();

        g.coeff_grad[l] = MatR<T>::Zero(layer.out_dim, n * nb);
        g.base_grad[l] = MatR<T>::Zero(layer.out_dim, n);
        MatR<T> dx(N, n);

        detail::FeatureChunk<T> f;
        MatR<T> spline_pull, base_pull;
        for (int row0 = 0; row0 < N; row0 += detail::kChunkRows) {
            const int rows = std::min(detail::kChunkRows, N - row0);
            detail::fill_chunk(layer, x, row0, rows, f, true);
            const auto dchunk = delta.middleRows(row0, rows);
            g.coeff_grad[l].noalias() += dchunk.transpose() * f.phi;
            g.base_grad[l].noalias() += dchunk.transpose() * f.act;

            // input gradient: spline branch uses basis derivatives, base
            // branch silu'; both vanish where the clamp saturates
            spline_pull.resize(rows, static_cast<Eigen::Index>(n) * nb);
            base_pull.resize(rows, n);
            spline_pull.noalias() = dchunk * layer.coeff;
            base_pull.noalias() = dchunk * layer.base_weight;
            const T lo = static_cast<T>(layer.basis.lo), hi = static_cast<T>(layer.basis.hi);
            for (int s = 0; s < rows; ++s) {
                const T* xr = x.data() + static_cast<std::ptrdiff_t>(row0 + s) * n;
                const T* sp = spline_pull.data() + static_cast<std::ptrdiff_t>(s) * n * nb;
                const T* dp = f.dphi.data() + static_cast<std::ptrdiff_t>(s) * n * nb;
                const T* bp = base_pull.data() + static_cast<std::ptrdiff_t>(s) * n;
                const T* da = f.dact.data() + static_cast<std::ptrdiff_t>(s) * n;
                T* dxr = dx.data() + static_cast<std::ptrdiff_t>(row0 + s) * n;
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
        }
        delta = std::move(dx);
    }
    g.input_grad = std::move(delta);
    return g;
}

template <typename T>
KanNetworkT<T> init_network(const std::vector<int>& dims, const BasisSpec& basis,
                            std::uint64_t seed) {
    basis.validate();
    if (dims.size() < 2)
        throw std::invalid_argument("init_network: dims needs at least input and output width");
    for (int d : dims)
        if (d < 1) throw std::invalid_argument("init_network: all dims must be positive");
    if (basis.basis_count() > 63)
        throw std::invalid_argument("init_network: basis too large");

    KanNetworkT<T> net;
    net.dims = dims;
    net.seed = seed;
    Rng rng(seed);
    const int nb = basis.basis_count();
    const double coeff_scale = 0.1 / std::sqrt(static_cast<double>(nb));
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        KanLayerT<T> layer;
        layer.in_dim = dims[l];
        layer.out_dim = dims[l + 1];
        layer.basis = basis;
        layer.coeff.resize(layer.out_dim, layer.in_dim * nb);
        layer.base_weight.resize(layer.out_dim, layer.in_dim);
        const double w_scale = 1.0 / std::sqrt(static_cast<double>(layer.in_dim));
        for (Eigen::Index r = 0; r < layer.coeff.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.coeff.cols(); ++c)
                layer.coeff(r, c) = static_cast<T>(coeff_scale * rng.normal());
        for (Eigen::Index r = 0; r < layer.base_weight.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.base_weight.cols(); ++c)
                layer.base_weight(r, c) = static_cast<T>(w_scale * rng.normal());
        net.layers.push_back(std::move(layer));
    }
    return net;
}

// Self-describing binary network file; round trips are bit-exact.
void save_network(const KanNetworkT<double>& net, const std::string& path);
void save_network(const KanNetworkT<float>& net, const std::string& path);
KanNetworkT<double> load_network(const std::string& path);
KanNetworkT<float> load_network_f(const std::string& path);

}  // namespace kanpnp
