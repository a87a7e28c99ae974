#include <doctest.h>

#include <png.h>

#include <cstdio>
#include <vector>

#include "kanpnp/image_io.hpp"
#include "kanpnp/resize.hpp"
#include "kanpnp/rng.hpp"

using namespace kanpnp;

namespace {

// test-only writer for a 16-bit grayscale PNG (the loader must reject it)
void write_16bit_png(const std::string& path, int h, int w) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    REQUIRE(fp != nullptr);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    png_init_io(png, fp);
    png_set_IHDR(png, info, w, h, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_byte> row(static_cast<std::size_t>(w) * 2, 0x80);
    for (int i = 0; i < h; ++i) png_write_row(png, row.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

}  // namespace

TEST_CASE("png round trip preserves 8-bit pixel data exactly") {
    Rng rng(1);
    ImageGrid img(9, 13, 3);
    for (double& v : img.data) v = std::round(255.0 * rng.uniform()) / 255.0;
    const std::string path = "test_roundtrip.png";
    save_image(img, path);
    const ImageGrid back = load_image(path);
    REQUIRE(back.same_shape(img));
    CHECK(back.data == img.data);

    // a second save of the reloaded image produces identical pixels again
    const std::string path2 = "test_roundtrip2.png";
    save_image(back, path2);
    const ImageGrid back2 = load_image(path2);
    CHECK(back2.data == back.data);
    std::remove(path.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("an all-black image loads as zeros") {
    const ImageGrid black(4, 4, 1, 0.0);
    const std::string path = "test_black.png";
    save_image(black, path);
    const ImageGrid back = load_image(path);
    for (double v : back.data) CHECK(v == 0.0);
    CHECK(back.channels == 1);
    std::remove(path.c_str());
}

TEST_CASE("16-bit files are rejected with a clear error") {
    const std::string path = "test_16bit.png";
    write_16bit_png(path, 4, 4);
    CHECK_THROWS_WITH_AS(load_image(path), doctest::Contains("16-bit"), std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("unreadable or non-png files are rejected") {
    CHECK_THROWS_AS(load_image("no_such_file.png"), std::runtime_error);
    const std::string path = "test_not_png.png";
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fprintf(f, "definitely not a png");
    std::fclose(f);
    CHECK_THROWS_AS(load_image(path), std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("area resize keeps constants and the overall mean") {
    const ImageGrid c(10, 14, 3, 0.42);
    const ImageGrid small = area_resize(c, 4, 5);
    CHECK(small.height == 4);
    CHECK(small.width == 5);
    for (double v : small.data) CHECK(v == doctest::Approx(0.42).epsilon(1e-12));

    Rng rng(2);
    ImageGrid img(12, 16, 1);
    for (double& v : img.data) v = rng.uniform();
    const ImageGrid down = area_resize(img, 6, 8);
    double mean_in = 0.0, mean_out = 0.0;
    for (double v : img.data) mean_in += v;
    for (double v : down.data) mean_out += v;
    CHECK(mean_in / img.data.size() == doctest::Approx(mean_out / down.data.size()).epsilon(1e-12));
}

TEST_CASE("bicubic upsampling reproduces constants and linear ramps") {
    const ImageGrid c(4, 4, 1, 0.3);
    const ImageGrid up = bicubic_upsample(c, 2);
    CHECK(up.height == 8);
    for (double v : up.data) CHECK(v == doctest::Approx(0.3).epsilon(1e-12));

    // a linear ramp is reproduced exactly away from the borders
    ImageGrid ramp(8, 8, 1);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) ramp.at(i, j, 0) = 0.1 * i;
    const ImageGrid up2 = bicubic_upsample(ramp, 2);
    for (int i = 2; i < 12; ++i)
        CHECK(up2.at(i, 4, 0) == doctest::Approx(0.1 * i / 2.0).epsilon(1e-10));
}

TEST_CASE("crop to multiple trims the ragged edge") {
    const ImageGrid img(10, 13, 1, 0.5);
    const ImageGrid cropped = crop_to_multiple(img, 4);
    CHECK(cropped.height == 8);
    CHECK(cropped.width == 12);
    CHECK_THROWS_AS(crop_to_multiple(ImageGrid(3, 3, 1, 0.0), 4), std::invalid_argument);
}
