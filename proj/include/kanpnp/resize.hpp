// Image resampling helpers: exact area-average resize for preprocessing and
// Catmull-Rom bicubic upsampling (the super-resolution baseline).
#pragma once

#include "kanpnp/image.hpp"

namespace kanpnp {

// Box (pixel-area overlap) resampling to an arbitrary size.
ImageGrid area_resize(const ImageGrid& img, int new_h, int new_w);

// Integer-factor bicubic upsampling aligned with top-left-anchored
// decimation: output position p reads source coordinate p / factor.
ImageGrid bicubic_upsample(const ImageGrid& img, int factor);

// Top-left crop so both sides are divisible by `divisor`.
ImageGrid crop_to_multiple(const ImageGrid& img, int divisor);

}  // namespace kanpnp
