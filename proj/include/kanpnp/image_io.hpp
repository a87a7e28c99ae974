// 8-bit PNG input/output. Values map to [0,1] by /255 on load and
// round(255 * clamp) on save, so 8-bit data round trips losslessly.
#pragma once

#include <string>

#include "kanpnp/image.hpp"

namespace kanpnp {

// Grayscale files load with 1 channel, color with 3 (alpha is stripped,
// palettes are expanded). 16-bit files are rejected.
ImageGrid load_image(const std::string& path);

void save_image(const ImageGrid& img, const std::string& path);

}  // namespace kanpnp
