#include "kanpnp/image.hpp"

#include <algorithm>
#include <cmath>

namespace kanpnp {

double l2_norm(const ImageGrid& img) { return std::sqrt(dot(img, img)); }

double dot(const ImageGrid& a, const ImageGrid& b) {
    require_same_shape(a, b, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) s += a.data[i] * b.data[i];
    return s;
}

bool all_finite(const ImageGrid& img) {
    for (double v : img.data)
        if (!std::isfinite(v)) return false;
    return true;
}

ImageGrid clamp01(ImageGrid img) {
    for (double& v : img.data) v = std::clamp(v, 0.0, 1.0);
    return img;
}

ImageGrid add_scaled(const ImageGrid& a, const ImageGrid& b, double s) {
    require_same_shape(a, b, "add_scaled");
    ImageGrid out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += s * b.data[i];
    return out;
}

void require_same_shape(const ImageGrid& a, const ImageGrid& b, const char* where) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(where) + ": shape mismatch " +
                                    a.shape_string() + " vs " + b.shape_string());
}

}  // namespace kanpnp
