#include <doctest.h>

#include <cmath>

#include "kanpnp/rng.hpp"
#include "kanpnp/tv.hpp"

using namespace kanpnp;

TEST_CASE("constant images are fixed points of tv denoising") {
    const ImageGrid c(8, 8, 3, 0.6);
    const ImageGrid out = tv_denoise(c, 0.5, 100);
    for (double v : out.data) CHECK(v == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("vanishing weight returns the input") {
    Rng rng(4);
    ImageGrid img(8, 8, 1);
    for (double& v : img.data) v = rng.uniform();
    const ImageGrid out = tv_denoise(img, 1e-8, 50);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        CHECK(std::abs(out.data[i] - img.data[i]) < 1e-4);
}

TEST_CASE("two-pixel step shrinks by the closed-form amount") {
    // 1x2 image: minimizer keeps the mean and shrinks the difference by 2w
    ImageGrid img(1, 2, 1);
    img.at(0, 0, 0) = 0.2;
    img.at(0, 1, 0) = 0.8;
    const double w = 0.1;
    const ImageGrid out = tv_denoise(img, w, 2000);
    const double d = 0.8 - 0.2;
    const double shrunk = d - 2.0 * w;  // |d| > 2w here
    CHECK(out.at(0, 1, 0) - out.at(0, 0, 0) == doctest::Approx(shrunk).epsilon(1e-4));
    const double mean = 0.5 * (out.at(0, 0, 0) + out.at(0, 1, 0));
    CHECK(mean == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("objective is non-increasing when sampled every 10 iterations") {
    Rng rng(9);
    ImageGrid img(16, 16, 1);
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j)
            img.at(i, j, 0) = (i < 8 ? 0.2 : 0.8) + 0.1 * rng.normal();
    const double w = 0.15;
    double prev = std::numeric_limits<double>::infinity();
    for (int iters = 10; iters <= 150; iters += 10) {
        const ImageGrid z = tv_denoise(img, w, iters);
        const double e = tv_objective(z, img, w);
        CHECK(e <= prev + 1e-9);
        prev = e;
    }
}

TEST_CASE("denoising preserves the mean") {
    Rng rng(10);
    ImageGrid img(12, 12, 3);
    for (double& v : img.data) v = rng.uniform();
    const ImageGrid out = tv_denoise(img, 0.2, 200);
    for (int c = 0; c < 3; ++c) {
        double m_in = 0.0, m_out = 0.0;
        for (int i = 0; i < 12; ++i)
            for (int j = 0; j < 12; ++j) {
                m_in += img.at(i, j, c);
                m_out += out.at(i, j, c);
            }
        CHECK(std::abs(m_in - m_out) / 144.0 < 1e-6);
    }
}

TEST_CASE("bad parameters are rejected") {
    const ImageGrid img(4, 4, 1, 0.5);
    CHECK_THROWS_AS(tv_denoise(img, 0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(tv_denoise(img, 0.1, 0), std::invalid_argument);
}
