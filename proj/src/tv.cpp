#include "kanpnp/tv.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace kanpnp {
namespace {

// forward differences with Neumann boundary (zero at the far edge)
inline double gx(const std::vector<double>& z, int H, int W, int i, int j) {
    return i + 1 < H ? z[(i + 1) * W + j] - z[i * W + j] : 0.0;
}
inline double gy(const std::vector<double>& z, int H, int W, int i, int j) {
    return j + 1 < W ? z[i * W + j + 1] - z[i * W + j] : 0.0;
}

}  // namespace

ImageGrid tv_denoise(const ImageGrid& image, double weight, int iters) {
    if (weight <= 0.0) throw std::invalid_argument("tv_denoise: weight must be positive");
    if (iters < 1) throw std::invalid_argument("tv_denoise: iters must be >= 1");
    const int H = image.height, W = image.width;
    const double tau = 0.25;
    ImageGrid out(image.height, image.width, image.channels);

    std::vector<double> f(H * W), p1(H * W), p2(H * W), div(H * W), z(H * W);
    for (int c = 0; c < image.channels; ++c) {
        for (int i = 0; i < H; ++i)
            for (int j = 0; j < W; ++j) f[i * W + j] = image.at(i, j, c);
        std::fill(p1.begin(), p1.end(), 0.0);
        std::fill(p2.begin(), p2.end(), 0.0);

        for (int it = 0; it < iters; ++it) {
            // div p, the negative adjoint of the forward-difference gradient:
            // (div p)_{ij} = p1_{ij} - p1_{i-1,j} + p2_{ij} - p2_{i,j-1}
            for (int i = 0; i < H; ++i) {
                for (int j = 0; j < W; ++j) {
                    double d = 0.0;
                    if (i + 1 < H) d += p1[i * W + j];
                    if (i > 0) d -= p1[(i - 1) * W + j];
                    if (j + 1 < W) d += p2[i * W + j];
                    if (j > 0) d -= p2[i * W + j - 1];
                    div[i * W + j] = d;
                }
            }
            // gradient of (div p - f / weight), then projected ascent
            for (int i = 0; i < H; ++i) {
                for (int j = 0; j < W; ++j) {
                    z[i * W + j] = div[i * W + j] - f[i * W + j] / weight;
                }
            }
            for (int i = 0; i < H; ++i) {
                for (int j = 0; j < W; ++j) {
                    const double g1 = gx(z, H, W, i, j);
                    const double g2 = gy(z, H, W, i, j);
                    const double denom = 1.0 + tau * std::sqrt(g1 * g1 + g2 * g2);
                    p1[i * W + j] = (p1[i * W + j] + tau * g1) / denom;
                    p2[i * W + j] = (p2[i * W + j] + tau * g2) / denom;
                }
            }
        }
        for (int i = 0; i < H; ++i) {
            for (int j = 0; j < W; ++j) {
                double d = 0.0;
                if (i + 1 < H) d += p1[i * W + j];
                if (i > 0) d -= p1[(i - 1) * W + j];
                if (j + 1 < W) d += p2[i * W + j];
                if (j > 0) d -= p2[i * W + j - 1];
                out.at(i, j, c) = f[i * W + j] - weight * d;
            }
        }
    }
    return out;
}

double tv_objective(const ImageGrid& z, const ImageGrid& f, double weight) {
    require_same_shape(z, f, "tv_objective");
    const int H = z.height, W = z.width;
    double fidelity = 0.0, tv = 0.0;
    for (int c = 0; c < z.channels; ++c) {
        for (int i = 0; i < H; ++i) {
            for (int j = 0; j < W; ++j) {
                const double d = z.at(i, j, c) - f.at(i, j, c);
                fidelity += 0.5 * d * d;
                const double g1 = i + 1 < H ? z.at(i + 1, j, c) - z.at(i, j, c) : 0.0;
                const double g2 = j + 1 < W ? z.at(i, j + 1, c) - z.at(i, j, c) : 0.0;
                tv += std::sqrt(g1 * g1 + g2 * g2);
            }
        }
    }
    return fidelity + weight * tv;
}

}  // namespace kanpnp
