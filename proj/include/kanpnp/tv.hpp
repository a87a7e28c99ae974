// Isotropic total-variation denoiser via Chambolle's dual projection.
#pragma once

#include "kanpnp/image.hpp"

namespace kanpnp {

// Approximates argmin_z 0.5||z - image||^2 + weight * TV(z), per channel.
ImageGrid tv_denoise(const ImageGrid& image, double weight, int iters);

// 0.5||z - f||^2 + weight * TV(z); used by the descent checks.
double tv_objective(const ImageGrid& z, const ImageGrid& f, double weight);

}  // namespace kanpnp
