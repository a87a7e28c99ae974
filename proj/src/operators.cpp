#include "kanpnp/operators.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "kanpnp/rng.hpp"

namespace kanpnp {
namespace {

int wrap(int i, int n) {
    i %= n;
    return i < 0 ? i + n : i;
}

// periodic separable convolution along rows (axis 0) or cols (axis 1);
// flip reverses the kernel, which turns convolution into its adjoint
ImageGrid conv1d_periodic(const ImageGrid& x, const std::vector<double>& ker, int axis,
                          bool flip) {
    const int R = (static_cast<int>(ker.size()) - 1) / 2;
    ImageGrid out(x.height, x.width, x.channels);
    const int n = axis == 0 ? x.height : x.width;
    for (int i = 0; i < x.height; ++i) {
        for (int j = 0; j < x.width; ++j) {
            for (int c = 0; c < x.channels; ++c) {
                double acc = 0.0;
                for (int d = -R; d <= R; ++d) {
                    const double k = flip ? ker[R - d] : ker[R + d];
                    const int ii = axis == 0 ? wrap(i - d, n) : i;
                    const int jj = axis == 1 ? wrap(j - d, n) : j;
                    acc += k * x.at(ii, jj, c);
                }
                out.at(i, j, c) = acc;
            }
        }
    }
    return out;
}

ImageGrid conv2d_periodic(const ImageGrid& x, const std::vector<double>& psf, int ph, int pw,
                          bool adjoint) {
    const int cu = ph / 2, cv = pw / 2;
    ImageGrid out(x.height, x.width, x.channels);
    for (int i = 0; i < x.height; ++i) {
        for (int j = 0; j < x.width; ++j) {
            for (int c = 0; c < x.channels; ++c) {
                double acc = 0.0;
                for (int u = 0; u < ph; ++u) {
                    for (int v = 0; v < pw; ++v) {
                        const int du = u - cu, dv = v - cv;
                        const int ii = wrap(adjoint ? i + du : i - du, x.height);
                        const int jj = wrap(adjoint ? j + dv : j - dv, x.width);
                        acc += psf[u * pw + v] * x.at(ii, jj, c);
                    }
                }
                out.at(i, j, c) = acc;
            }
        }
    }
    return out;
}

int mosaic_channel(int i, int j) {
    const bool er = (i % 2) == 0, ec = (j % 2) == 0;
    if (er && ec) return 0;      // R
    if (er != ec) return 1;      // G
    return 2;                    // B
}

void require_shape(const ImageGrid& x, const Shape3& s, const char* where) {
    if (x.height != s.h || x.width != s.w || x.channels != s.c)
        throw std::invalid_argument(std::string(where) + ": got " + x.shape_string() +
                                    ", expected " + std::to_string(s.h) + "x" +
                                    std::to_string(s.w) + "x" + std::to_string(s.c));
}

ImageGrid random_image(Shape3 s, Rng& rng) {
    ImageGrid img(s.h, s.w, s.c);
    for (double& v : img.data) v = rng.normal();
    return img;
}

}  // namespace

ImageGrid ForwardOperator::apply(const ImageGrid& x) const {
    require_shape(x, in_shape, "op_apply");
    switch (kind) {
        case OperatorKind::Downsample: {
            ImageGrid blurred = conv1d_periodic(conv1d_periodic(x, kernel1d, 0, false),
                                                kernel1d, 1, false);
            ImageGrid out(out_shape.h, out_shape.w, out_shape.c);
            for (int i = 0; i < out.height; ++i)
                for (int j = 0; j < out.width; ++j)
                    for (int c = 0; c < out.channels; ++c)
                        out.at(i, j, c) = blurred.at(i * factor, j * factor, c);
            return out;
        }
        case OperatorKind::Blur:
            if (is_identity()) {
                ImageGrid out = x;
                return out;
            }
            return conv2d_periodic(x, psf, psf_h, psf_w, false);
        case OperatorKind::Mosaic: {
            ImageGrid out(out_shape.h, out_shape.w, 1);
            for (int i = 0; i < x.height; ++i)
                for (int j = 0; j < x.width; ++j)
                    out.at(i, j, 0) = x.at(i, j, mosaic_channel(i, j));
            return out;
        }
        case OperatorKind::Composed: {
            ImageGrid cur = x;
            for (const auto& child : children) cur = child.apply(cur);
            return cur;
        }
    }
    throw std::logic_error("op_apply: unknown kind");
}

ImageGrid ForwardOperator::adjoint(const ImageGrid& y) const {
    require_shape(y, out_shape, "op_adjoint");
    switch (kind) {
        case OperatorKind::Downsample: {
            ImageGrid stuffed(in_shape.h, in_shape.w, in_shape.c);
            for (int i = 0; i < y.height; ++i)
                for (int j = 0; j < y.width; ++j)
                    for (int c = 0; c < y.channels; ++c)
                        stuffed.at(i * factor, j * factor, c) = y.at(i, j, c);
            return conv1d_periodic(conv1d_periodic(stuffed, kernel1d, 0, true),
                                   kernel1d, 1, true);
        }
        case OperatorKind::Blur:
            if (is_identity()) {
                ImageGrid out = y;
                return out;
            }
            return conv2d_periodic(y, psf, psf_h, psf_w, true);
        case OperatorKind::Mosaic: {
            ImageGrid out(in_shape.h, in_shape.w, in_shape.c);
            for (int i = 0; i < y.height; ++i)
                for (int j = 0; j < y.width; ++j)
                    out.at(i, j, mosaic_channel(i, j)) = y.at(i, j, 0);
            return out;
        }
        case OperatorKind::Composed: {
            ImageGrid cur = y;
            for (auto it = children.rbegin(); it != children.rend(); ++it)
                cur = it->adjoint(cur);
            return cur;
        }
    }
    throw std::logic_error("op_adjoint: unknown kind");
}

ForwardOperator make_downsample(int H, int W, int factor, int C) {
    if (factor != 2 && factor != 4 && factor != 8)
        throw std::invalid_argument("make_downsample: factor must be 2, 4, or 8");
    if (H % factor != 0 || W % factor != 0)
        throw std::invalid_argument("make_downsample: image size not divisible by factor");
    ForwardOperator op;
    op.kind = OperatorKind::Downsample;
    op.factor = factor;
    op.kernel1d = gaussian_kernel_1d(0.5 * factor, 2 * factor);
    op.in_shape = {H, W, C};
    op.out_shape = {H / factor, W / factor, C};
    return op;
}

ForwardOperator make_blur(const std::vector<double>& psf, int psf_h, int psf_w,
                          int H, int W, int C) {
    if (psf_h < 1 || psf_w < 1 || psf_h % 2 == 0 || psf_w % 2 == 0)
        throw std::invalid_argument("make_blur: psf sides must be odd and positive");
    if (static_cast<int>(psf.size()) != psf_h * psf_w)
        throw std::invalid_argument("make_blur: psf size does not match dimensions");
    if (psf_h > H || psf_w > W)
        throw std::invalid_argument("make_blur: psf larger than image");
    double sum = 0.0;
    for (double v : psf) sum += v;
    if (std::abs(sum - 1.0) > 1e-8)
        throw std::invalid_argument("make_blur: psf entries must sum to 1");
    ForwardOperator op;
    op.kind = OperatorKind::Blur;
    op.psf = psf;
    op.psf_h = psf_h;
    op.psf_w = psf_w;
    op.in_shape = op.out_shape = {H, W, C};
    return op;
}

ForwardOperator make_mosaic(int H, int W, BayerPattern pattern) {
    if (H % 2 != 0 || W % 2 != 0)
        throw std::invalid_argument("make_mosaic: image sides must be even");
    ForwardOperator op;
    op.kind = OperatorKind::Mosaic;
    op.pattern = pattern;
    op.in_shape = {H, W, 3};
    op.out_shape = {H, W, 1};
    return op;
}

ForwardOperator make_identity(int H, int W, int C) {
    return make_blur({1.0}, 1, 1, H, W, C);
}

ForwardOperator compose(const ForwardOperator& outer, const ForwardOperator& inner) {
    if (!(inner.out_shape == outer.in_shape))
        throw std::invalid_argument("compose: inner output shape does not match outer input");
    if (inner.is_identity()) return outer;
    if (outer.is_identity()) return inner;
    ForwardOperator op;
    op.kind = OperatorKind::Composed;
    op.in_shape = inner.in_shape;
    op.out_shape = outer.out_shape;
    op.children = {inner, outer};
    return op;
}

double adjoint_check_fns(const std::function<ImageGrid(const ImageGrid&)>& apply,
                         const std::function<ImageGrid(const ImageGrid&)>& adjoint,
                         Shape3 in_shape, Shape3 out_shape, std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const ImageGrid x = random_image(in_shape, rng);
        const ImageGrid y = random_image(out_shape, rng);
        const double lhs = dot(apply(x), y);
        const double rhs = dot(x, adjoint(y));
        const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return worst;
}

double adjoint_check(const ForwardOperator& op, std::uint64_t seed) {
    return adjoint_check_fns([&](const ImageGrid& x) { return op.apply(x); },
                             [&](const ImageGrid& y) { return op.adjoint(y); },
                             op.in_shape, op.out_shape, seed);
}

std::vector<double> gaussian_kernel_1d(double sigma, int radius) {
    std::vector<double> ker(2 * radius + 1);
    double sum = 0.0;
    for (int d = -radius; d <= radius; ++d) {
        ker[d + radius] = std::exp(-0.5 * d * d / (sigma * sigma));
        sum += ker[d + radius];
    }
    for (double& v : ker) v /= sum;
    return ker;
}

std::vector<double> gaussian_psf(int size, double sigma) {
    if (size % 2 == 0) throw std::invalid_argument("gaussian_psf: size must be odd");
    const int R = size / 2;
    std::vector<double> psf(size * size);
    double sum = 0.0;
    for (int u = -R; u <= R; ++u)
        for (int v = -R; v <= R; ++v) {
            const double w = std::exp(-0.5 * (u * u + v * v) / (sigma * sigma));
            psf[(u + R) * size + (v + R)] = w;
            sum += w;
        }
    for (double& v : psf) v /= sum;
    return psf;
}

std::vector<double> load_psf_text(const std::string& path, int& h, int& w) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open psf file: " + path);
    std::vector<double> values;
    std::string line;
    h = 0;
    w = -1;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::vector<double> vals;
        double v;
        while (row >> v) vals.push_back(v);
        if (vals.empty()) continue;
        if (w < 0) w = static_cast<int>(vals.size());
        if (static_cast<int>(vals.size()) != w)
            throw std::runtime_error("psf file has ragged rows: " + path);
        values.insert(values.end(), vals.begin(), vals.end());
        ++h;
    }
    if (h == 0) throw std::runtime_error("psf file is empty: " + path);
    return values;
}

}  // namespace kanpnp
