#include "kanpnp/metrics.hpp"

#include <cmath>
#include <vector>

namespace kanpnp {

double mse(const ImageGrid& reference, const ImageGrid& test) {
    require_same_shape(reference, test, "mse");
    double acc = 0.0;
    for (std::size_t i = 0; i < reference.data.size(); ++i) {
        const double d = reference.data[i] - test.data[i];
        acc += d * d;
    }
    return acc / static_cast<double>(reference.data.size());
}

double psnr(const ImageGrid& reference, const ImageGrid& test, double peak) {
    if (peak <= 0.0) throw std::invalid_argument("psnr: peak must be positive");
    const double m = mse(reference, test);
    if (m == 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / m));
}

namespace {

constexpr int kWin = 11;
constexpr double kWinSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;  // (K1 * peak)^2
constexpr double kC2 = 0.03 * 0.03;

std::vector<double> ssim_window() {
    std::vector<double> w(kWin * kWin);
    const int R = kWin / 2;
    double sum = 0.0;
    for (int u = -R; u <= R; ++u)
        for (int v = -R; v <= R; ++v) {
            const double g = std::exp(-0.5 * (u * u + v * v) / (kWinSigma * kWinSigma));
            w[(u + R) * kWin + (v + R)] = g;
            sum += g;
        }
    for (double& x : w) x /= sum;
    return w;
}

}  // namespace

double ssim(const ImageGrid& reference, const ImageGrid& test) {
    require_same_shape(reference, test, "ssim");
    if (reference.height < kWin || reference.width < kWin)
        throw std::invalid_argument("ssim: image smaller than the 11x11 window");
    static const std::vector<double> win = ssim_window();
    const int R = kWin / 2;
    double total = 0.0;
    std::size_t count = 0;
    for (int c = 0; c < reference.channels; ++c) {
        for (int i = R; i < reference.height - R; ++i) {
            for (int j = R; j < reference.width - R; ++j) {
                double mx = 0.0, my = 0.0, mxx = 0.0, myy = 0.0, mxy = 0.0;
                for (int u = -R; u <= R; ++u) {
                    for (int v = -R; v <= R; ++v) {
                        const double w = win[(u + R) * kWin + (v + R)];
                        const double a = reference.at(i + u, j + v, c);
                        const double b = test.at(i + u, j + v, c);
                        mx += w * a;
                        my += w * b;
                        mxx += w * a * a;
                        myy += w * b * b;
                        mxy += w * a * b;
                    }
                }
                const double vx = mxx - mx * mx;
                const double vy = myy - my * my;
                const double cov = mxy - mx * my;
                const double num = (2.0 * mx * my + kC1) * (2.0 * cov + kC2);
                const double den = (mx * mx + my * my + kC1) * (vx + vy + kC2);
                total += num / den;
                ++count;
            }
        }
    }
    return total / static_cast<double>(count);
}

}  // namespace kanpnp
