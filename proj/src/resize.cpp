#include "kanpnp/resize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kanpnp {
namespace {

// Keys cubic kernel, a = -0.5 (Catmull-Rom)
double cubic_weight(double t) {
    t = std::abs(t);
    if (t <= 1.0) return 1.5 * t * t * t - 2.5 * t * t + 1.0;
    if (t < 2.0) return -0.5 * t * t * t + 2.5 * t * t - 4.0 * t + 2.0;
    return 0.0;
}

}  // namespace

ImageGrid area_resize(const ImageGrid& img, int new_h, int new_w) {
    if (new_h < 1 || new_w < 1) throw std::invalid_argument("area_resize: bad target size");
    if (new_h == img.height && new_w == img.width) return img;
    ImageGrid out(new_h, new_w, img.channels);
    const double sy = static_cast<double>(img.height) / new_h;
    const double sx = static_cast<double>(img.width) / new_w;
    for (int i = 0; i < new_h; ++i) {
        const double y0 = i * sy, y1 = (i + 1) * sy;
        const int iy0 = static_cast<int>(std::floor(y0));
        const int iy1 = std::min(img.height, static_cast<int>(std::ceil(y1)));
        for (int j = 0; j < new_w; ++j) {
            const double x0 = j * sx, x1 = (j + 1) * sx;
            const int ix0 = static_cast<int>(std::floor(x0));
            const int ix1 = std::min(img.width, static_cast<int>(std::ceil(x1)));
            for (int c = 0; c < img.channels; ++c) {
                double acc = 0.0, area = 0.0;
                for (int y = iy0; y < iy1; ++y) {
                    const double hy = std::min<double>(y + 1, y1) - std::max<double>(y, y0);
                    for (int x = ix0; x < ix1; ++x) {
                        const double wx = std::min<double>(x + 1, x1) - std::max<double>(x, x0);
                        acc += hy * wx * img.at(y, x, c);
                        area += hy * wx;
                    }
                }
                out.at(i, j, c) = acc / area;
            }
        }
    }
    return out;
}

ImageGrid bicubic_upsample(const ImageGrid& img, int factor) {
    if (factor < 1) throw std::invalid_argument("bicubic_upsample: factor must be >= 1");
    if (factor == 1) return img;
    const int H = img.height * factor, W = img.width * factor;
    ImageGrid out(H, W, img.channels);
    auto clampi = [](int v, int n) { return std::clamp(v, 0, n - 1); };
    for (int i = 0; i < H; ++i) {
        const double sy = static_cast<double>(i) / factor;
        const int fy = static_cast<int>(std::floor(sy));
        for (int j = 0; j < W; ++j) {
            const double sx = static_cast<double>(j) / factor;
            const int fx = static_cast<int>(std::floor(sx));
            for (int c = 0; c < img.channels; ++c) {
                double acc = 0.0;
                for (int dy = -1; dy <= 2; ++dy) {
                    const double wy = cubic_weight(sy - (fy + dy));
                    if (wy == 0.0) continue;
                    for (int dx = -1; dx <= 2; ++dx) {
                        const double wx = cubic_weight(sx - (fx + dx));
                        if (wx == 0.0) continue;
                        acc += wy * wx *
                               img.at(clampi(fy + dy, img.height), clampi(fx + dx, img.width), c);
                    }
                }
                out.at(i, j, c) = acc;
            }
        }
    }
    return out;
}

ImageGrid crop_to_multiple(const ImageGrid& img, int divisor) {
    if (divisor < 1) throw std::invalid_argument("crop_to_multiple: bad divisor");
    const int H = (img.height / divisor) * divisor;
    const int W = (img.width / divisor) * divisor;
    if (H < 1 || W < 1)
        throw std::invalid_argument("crop_to_multiple: image smaller than divisor");
    if (H == img.height && W == img.width) return img;
    ImageGrid out(H, W, img.channels);
    for (int i = 0; i < H; ++i)
        for (int j = 0; j < W; ++j)
            for (int c = 0; c < img.channels; ++c) out.at(i, j, c) = img.at(i, j, c);
    return out;
}

}  // namespace kanpnp
