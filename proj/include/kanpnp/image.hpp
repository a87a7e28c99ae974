// Dense H x W x C image with doubles in row-major [row][col][channel] order.
// Reconstruction inputs live in [0,1]; intermediate iterates are unrestricted.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kanpnp {

struct ImageGrid {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;

    ImageGrid() = default;
    ImageGrid(int h, int w, int c, double fill = 0.0)
        : height(h), width(w), channels(c),
          data(static_cast<std::size_t>(h) * w * c, fill) {
        if (h < 1 || w < 1 || (c != 1 && c != 3))
            throw std::invalid_argument("ImageGrid: bad shape " + shape_string());
    }

    double& at(int i, int j, int c) {
        return data[(static_cast<std::size_t>(i) * width + j) * channels + c];
    }
    double at(int i, int j, int c) const {
        return data[(static_cast<std::size_t>(i) * width + j) * channels + c];
    }

    std::size_t size() const { return data.size(); }

    bool same_shape(const ImageGrid& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }

    std::string shape_string() const {
        return std::to_string(height) + "x" + std::to_string(width) + "x" +
               std::to_string(channels);
    }
};

double l2_norm(const ImageGrid& img);
double dot(const ImageGrid& a, const ImageGrid& b);
bool all_finite(const ImageGrid& img);
ImageGrid clamp01(ImageGrid img);

// a + s * b
ImageGrid add_scaled(const ImageGrid& a, const ImageGrid& b, double s);

void require_same_shape(const ImageGrid& a, const ImageGrid& b, const char* where);

}  // namespace kanpnp
