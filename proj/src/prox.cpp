#include "kanpnp/prox.hpp"

#include <fftw3.h>

#include <complex>
#include <cstdio>

namespace kanpnp {
namespace {

Eigen::VectorXd to_vec(const ImageGrid& img) {
    return Eigen::Map<const Eigen::VectorXd>(img.data.data(), img.data.size());
}

ImageGrid from_vec(const Eigen::VectorXd& v, const Shape3& s) {
    ImageGrid img(s.h, s.w, s.c);
    Eigen::Map<Eigen::VectorXd>(img.data.data(), img.data.size()) = v;
    return img;
}

bool is_mosaic_site(int i, int j, int c) {
    const bool er = (i % 2) == 0, ec = (j % 2) == 0;
    const int ch = (er && ec) ? 0 : ((er != ec) ? 1 : 2);
    return ch == c;
}

}  // namespace

ImageGrid prox_data_fidelity(const ForwardOperator& op, const ImageGrid& y,
                             const ImageGrid& v, double mu, const CgConfig& cfg,
                             ProxInfo* info) {
    if (mu <= 0.0) throw std::invalid_argument("prox_data_fidelity: mu must be positive");
    if (y.height != op.out_shape.h || y.width != op.out_shape.w || y.channels != op.out_shape.c)
        throw std::invalid_argument("prox_data_fidelity: y does not match operator output");
    if (v.height != op.in_shape.h || v.width != op.in_shape.w || v.channels != op.in_shape.c)
        throw std::invalid_argument("prox_data_fidelity: v does not match operator input");

    ProxInfo local;
    if (op.is_identity()) {
        // (2 + mu) z = 2y + mu v, pointwise
        local.path = ProxInfo::Path::Pointwise;
        ImageGrid z(v.height, v.width, v.channels);
        for (std::size_t i = 0; i < z.data.size(); ++i)
            z.data[i] = (2.0 * y.data[i] + mu * v.data[i]) / (2.0 + mu);
        if (info) *info = local;
        return z;
    }
    if (op.kind == OperatorKind::Blur) {
        local.path = ProxInfo::Path::Fft;
        ImageGrid z = deconv_fft_prox(op.psf, op.psf_h, op.psf_w, y, v, mu);
        if (info) *info = local;
        return z;
    }
    if (op.kind == OperatorKind::Mosaic) {
        // A'A is a 0/1 diagonal over channel sites
        local.path = ProxInfo::Path::MosaicDiagonal;
        ImageGrid z = v;
        for (int i = 0; i < z.height; ++i)
            for (int j = 0; j < z.width; ++j)
                for (int c = 0; c < z.channels; ++c)
                    if (is_mosaic_site(i, j, c))
                        z.at(i, j, c) = (2.0 * y.at(i, j, 0) + mu * v.at(i, j, c)) / (2.0 + mu);
        if (info) *info = local;
        return z;
    }

    local.path = ProxInfo::Path::ConjugateGradient;
    const Shape3 s = op.in_shape;
    const Eigen::VectorXd rhs = 2.0 * to_vec(op.adjoint(y)) + mu * to_vec(v);
    auto normal_map = [&](const Eigen::VectorXd& p, Eigen::VectorXd& out) {
        const ImageGrid pi = from_vec(p, s);
        out = 2.0 * to_vec(op.adjoint(op.apply(pi))) + mu * p;
    };
    CgResult res = cg_solve(normal_map, rhs, to_vec(v), cfg);
    local.cg_iterations = res.iterations;
    local.cg_residual = res.final_residual;
    local.converged = res.converged;
    if (!res.converged)
        std::fprintf(stderr,
                     "prox_data_fidelity: CG stopped at %d iterations, relative residual %.3e\n",
                     res.iterations, res.final_residual);
    if (info) *info = local;
    return from_vec(res.x, s);
}

ImageGrid deconv_fft_prox(const std::vector<double>& psf, int psf_h, int psf_w,
                          const ImageGrid& y, const ImageGrid& v, double mu) {
    if (mu <= 0.0) throw std::invalid_argument("deconv_fft_prox: mu must be positive");
    require_same_shape(y, v, "deconv_fft_prox");
    const int H = y.height, W = y.width, C = y.channels;
    if (psf_h > H || psf_w > W)
        throw std::invalid_argument("deconv_fft_prox: psf larger than image");

    const int Wc = W / 2 + 1;
    const std::size_t n_real = static_cast<std::size_t>(H) * W;
    const std::size_t n_cplx = static_cast<std::size_t>(H) * Wc;

    double* real_buf = fftw_alloc_real(n_real);
    fftw_complex* k_hat = fftw_alloc_complex(n_cplx);
    fftw_complex* y_hat = fftw_alloc_complex(n_cplx);
    fftw_complex* v_hat = fftw_alloc_complex(n_cplx);
    fftw_plan fwd = fftw_plan_dft_r2c_2d(H, W, real_buf, k_hat, FFTW_ESTIMATE);
    fftw_plan inv = fftw_plan_dft_c2r_2d(H, W, y_hat, real_buf, FFTW_ESTIMATE);

    // PSF embedded at the origin with wraparound
    for (std::size_t i = 0; i < n_real; ++i) real_buf[i] = 0.0;
    const int cu = psf_h / 2, cv = psf_w / 2;
    for (int u = 0; u < psf_h; ++u)
        for (int vv = 0; vv < psf_w; ++vv) {
            const int ii = ((u - cu) % H + H) % H;
            const int jj = ((vv - cv) % W + W) % W;
            real_buf[static_cast<std::size_t>(ii) * W + jj] += psf[u * psf_w + vv];
        }
    fftw_execute_dft_r2c(fwd, real_buf, k_hat);

    ImageGrid z(H, W, C);
    for (int c = 0; c < C; ++c) {
        for (int i = 0; i < H; ++i)
            for (int j = 0; j < W; ++j)
                real_buf[static_cast<std::size_t>(i) * W + j] = y.at(i, j, c);
        fftw_execute_dft_r2c(fwd, real_buf, y_hat);
        for (int i = 0; i < H; ++i)
            for (int j = 0; j < W; ++j)
                real_buf[static_cast<std::size_t>(i) * W + j] = v.at(i, j, c);
        fftw_execute_dft_r2c(fwd, real_buf, v_hat);

        for (std::size_t t = 0; t < n_cplx; ++t) {
            const std::complex<double> K(k_hat[t][0], k_hat[t][1]);
            const std::complex<double> Y(y_hat[t][0], y_hat[t][1]);
            const std::complex<double> V(v_hat[t][0], v_hat[t][1]);
            const std::complex<double> Z =
                (2.0 * std::conj(K) * Y + mu * V) / (2.0 * std::norm(K) + mu);
            y_hat[t][0] = Z.real();
            y_hat[t][1] = Z.imag();
        }
        fftw_execute_dft_c2r(inv, y_hat, real_buf);
        const double scale = 1.0 / (static_cast<double>(H) * W);
        for (int i = 0; i < H; ++i)
            for (int j = 0; j < W; ++j)
                z.at(i, j, c) = real_buf[static_cast<std::size_t>(i) * W + j] * scale;
    }

    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    fftw_free(real_buf);
    fftw_free(k_hat);
    fftw_free(y_hat);
    fftw_free(v_hat);
    return z;
}

}  // namespace kanpnp
