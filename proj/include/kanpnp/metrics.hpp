// PSNR and SSIM.
#pragma once

#include "kanpnp/image.hpp"

namespace kanpnp {

// Exact matches saturate at this value instead of +inf.
inline constexpr double kPsnrCap = 99.0;

double mse(const ImageGrid& reference, const ImageGrid& test);
double psnr(const ImageGrid& reference, const ImageGrid& test, double peak = 1.0);

// Mean local SSIM, 11x11 Gaussian window (std 1.5), K1=0.01, K2=0.03,
// peak 1; windows fully inside the image; color images average channels.
double ssim(const ImageGrid& reference, const ImageGrid& test);

}  // namespace kanpnp
