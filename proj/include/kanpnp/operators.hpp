// Linear measurement operators with exact adjoints: anti-aliased
// downsampling, periodic blur, Bayer mosaicing, and their composition.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kanpnp/image.hpp"

namespace kanpnp {

enum class OperatorKind { Downsample, Blur, Mosaic, Composed };
enum class BayerPattern { RGGB };

struct Shape3 {
    int h = 0, w = 0, c = 0;
    bool operator==(const Shape3&) const = default;
};

struct ForwardOperator {
    OperatorKind kind = OperatorKind::Blur;
    Shape3 in_shape, out_shape;

    // Downsample
    int factor = 1;
    std::vector<double> kernel1d;  // separable anti-alias kernel, odd length

    // Blur
    std::vector<double> psf;
    int psf_h = 0, psf_w = 0;

    // Mosaic
    BayerPattern pattern = BayerPattern::RGGB;

    // Composed, applied in order (children[0] first)
    std::vector<ForwardOperator> children;

    ImageGrid apply(const ImageGrid& x) const;
    ImageGrid adjoint(const ImageGrid& y) const;

    bool is_identity() const {
        return kind == OperatorKind::Blur && psf_h == 1 && psf_w == 1;
    }
};

ForwardOperator make_downsample(int H, int W, int factor, int C);
ForwardOperator make_blur(const std::vector<double>& psf, int psf_h, int psf_w,
                          int H, int W, int C);
ForwardOperator make_mosaic(int H, int W, BayerPattern pattern);
ForwardOperator make_identity(int H, int W, int C);
ForwardOperator compose(const ForwardOperator& outer, const ForwardOperator& inner);

// Max relative dot-product discrepancy <Ax,y> vs <x,A'y> over 20 seeded pairs.
double adjoint_check(const ForwardOperator& op, std::uint64_t seed);

// Same test for a caller-supplied apply/adjoint pair (used for negative
// controls in the test suite).
double adjoint_check_fns(const std::function<ImageGrid(const ImageGrid&)>& apply,
                         const std::function<ImageGrid(const ImageGrid&)>& adjoint,
                         Shape3 in_shape, Shape3 out_shape, std::uint64_t seed);

// normalized Gaussian taps, length 2*radius+1
std::vector<double> gaussian_kernel_1d(double sigma, int radius);
// normalized 2-D Gaussian PSF with odd side length
std::vector<double> gaussian_psf(int size, double sigma);

// whitespace-separated rows of numbers; every row must have equal length
std::vector<double> load_psf_text(const std::string& path, int& h, int& w);

}  // namespace kanpnp
