// Data-fidelity proximal step: z = argmin ||Az - y||^2 + (mu/2)||z - v||^2,
// i.e. the normal equations (2A'A + mu I) z = 2A'y + mu v. Closed forms for
// pointwise and circular-convolution operators, conjugate gradients otherwise.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "kanpnp/image.hpp"
#include "kanpnp/operators.hpp"

namespace kanpnp {

struct CgConfig {
    double tol = 1e-7;   // relative residual
    int max_iters = 200;
};

struct CgResult {
    Eigen::VectorXd x;
    int iterations = 0;
    double final_residual = 0.0;
    bool converged = true;
};

// Conjugate gradients for a symmetric positive definite map. `apply` is
// called as apply(p, out).
template <typename Op>
CgResult cg_solve(Op&& apply, const Eigen::VectorXd& rhs, Eigen::VectorXd x0,
                  const CgConfig& cfg = {}) {
    if (cfg.tol <= 0.0 || cfg.max_iters < 1)
        throw std::invalid_argument("cg_solve: tol must be positive, max_iters >= 1");
    CgResult res;
    const double rhs_norm = rhs.norm();
    if (rhs_norm == 0.0) {
        res.x = Eigen::VectorXd::Zero(rhs.size());
        return res;
    }
    Eigen::VectorXd x = std::move(x0);
    Eigen::VectorXd q(rhs.size());
    apply(x, q);
    Eigen::VectorXd r = rhs - q;
    Eigen::VectorXd p = r;
    double rr = r.squaredNorm();
    int it = 0;
    while (it < cfg.max_iters && std::sqrt(rr) > cfg.tol * rhs_norm) {
        ++it;
        apply(p, q);
        const double pq = p.dot(q);
        if (!std::isfinite(pq) || pq <= 0.0)
            throw std::runtime_error("cg_solve: encountered a non-SPD or non-finite direction");
        const double alpha = rr / pq;
        x += alpha * p;
        r -= alpha * q;
        const double rr_new = r.squaredNorm();
        if (!std::isfinite(rr_new))
            throw std::runtime_error("cg_solve: residual became non-finite");
        p = r + (rr_new / rr) * p;
        rr = rr_new;
    }
    res.x = std::move(x);
    res.iterations = it;
    res.final_residual = std::sqrt(rr) / rhs_norm;
    res.converged = res.final_residual <= cfg.tol;
    return res;
}

struct ProxInfo {
    enum class Path { Pointwise, Fft, MosaicDiagonal, ConjugateGradient };
    Path path = Path::ConjugateGradient;
    int cg_iterations = 0;
    double cg_residual = 0.0;
    bool converged = true;
};

ImageGrid prox_data_fidelity(const ForwardOperator& op, const ImageGrid& y,
                             const ImageGrid& v, double mu, const CgConfig& cfg = {},
                             ProxInfo* info = nullptr);

// FFT route for periodic blur: per frequency
// z_hat = (2 conj(K) y_hat + mu v_hat) / (2|K|^2 + mu).
ImageGrid deconv_fft_prox(const std::vector<double>& psf, int psf_h, int psf_w,
                          const ImageGrid& y, const ImageGrid& v, double mu);

}  // namespace kanpnp
