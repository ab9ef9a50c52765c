#include "dirlin/image.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>

#include "dirlin/color.hpp"
#include "dirlin/common.hpp"

namespace dirlin {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

Image read_png(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw IoError("read_png: cannot open " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("read_png: libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("read_png: libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("read_png: failed to decode " + path);
  }
  png_init_io(png, f.get());
  png_read_info(png, info);

  // Normalize everything to 8-bit RGB.
  png_set_strip_16(png);
  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);

  Image img;
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.rgb.resize(3 * static_cast<std::size_t>(img.width) * img.height);

  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));
  for (int y = 0; y < img.height; ++y) rows[static_cast<std::size_t>(y)] = img.pixel(0, y);
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void write_png(const Image& image, const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw IoError("write_png: cannot open " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("write_png: libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("write_png: libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("write_png: failed to encode " + path);
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < image.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(image.pixel(0, y)));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

std::vector<double> image_to_hcl_serial(const Image& image) {
  std::vector<double> out(3 * static_cast<std::size_t>(image.width) * image.height);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const std::uint8_t* px = image.pixel(x, y);
      const HclPixel hcl = rgb_to_hcl(px[0], px[1], px[2]);
      const std::size_t at = 3 * (static_cast<std::size_t>(y) * image.width + x);
      out[at] = hcl.hue;
      out[at + 1] = hcl.chroma;
      out[at + 2] = hcl.lightness;
    }
  }
  return out;
}

std::vector<double> image_to_hcl(const Image& image) {
  std::vector<double> out(3 * static_cast<std::size_t>(image.width) * image.height);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const std::uint8_t* px = image.pixel(x, y);
      const HclPixel hcl = rgb_to_hcl(px[0], px[1], px[2]);
      const std::size_t at = 3 * (static_cast<std::size_t>(y) * image.width + x);
      out[at] = hcl.hue;
      out[at + 1] = hcl.chroma;
      out[at + 2] = hcl.lightness;
    }
  }
  return out;
}

ImageObservations image_to_observations(const Image& image, int stride, bool standardize) {
  if (image.width < 1 || image.height < 1) throw DomainError("image_to_observations: empty image");
  if (stride < 1) throw DomainError("image_to_observations: stride must be >= 1");

  const std::vector<double> hcl = image_to_hcl(image);
  ImageObservations out;
  out.width = image.width;
  out.height = image.height;
  out.stride = stride;
  out.standardized = standardize;

  std::vector<double> chroma, light, hue;
  for (int y = 0; y < image.height; y += stride) {
    for (int x = 0; x < image.width; x += stride) {
      const std::size_t at = 3 * (static_cast<std::size_t>(y) * image.width + x);
      hue.push_back(hcl[at]);
      chroma.push_back(hcl[at + 1]);
      light.push_back(hcl[at + 2]);
      out.pixel_index.push_back(y * image.width + x);
    }
  }

  auto moments = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.size());
    return std::pair<double, double>(mean, std::sqrt(var));
  };
  auto [cm, cs] = moments(chroma);
  auto [lm, ls] = moments(light);
  out.chroma_mean = cm;
  out.chroma_sd = cs > 1e-12 ? cs : 1.0;  // constant column stays at zero
  out.lightness_mean = lm;
  out.lightness_sd = ls > 1e-12 ? ls : 1.0;

  out.observations.reserve(hue.size());
  for (std::size_t i = 0; i < hue.size(); ++i) {
    Vec angle(1);
    angle[0] = hue[i];
    Vec lin(2);
    if (standardize) {
      lin[0] = (chroma[i] - out.chroma_mean) / out.chroma_sd;
      lin[1] = (light[i] - out.lightness_mean) / out.lightness_sd;
    } else {
      lin[0] = chroma[i];
      lin[1] = light[i];
    }
    out.observations.emplace_back(UnitDirection(std::move(angle)), std::move(lin));
  }
  return out;
}

Image label_map_to_image(const std::vector<int>& labels, int width, int height) {
  if (static_cast<std::size_t>(width) * height != labels.size()) {
    throw DomainError("label_map_to_image: size mismatch");
  }
  static const std::uint8_t palette[][3] = {
      {230, 25, 75},  {60, 180, 75},   {255, 225, 25}, {0, 130, 200},  {245, 130, 48},
      {145, 30, 180}, {70, 240, 240},  {240, 50, 230}, {210, 245, 60}, {250, 190, 212},
      {0, 128, 128},  {220, 190, 255}, {170, 110, 40}, {255, 250, 200}, {128, 0, 0},
      {170, 255, 195}, {128, 128, 0},  {255, 215, 180}, {0, 0, 128},   {128, 128, 128},
      {255, 255, 255}, {0, 0, 0},      {100, 160, 60},  {60, 60, 160}};
  constexpr int kPaletteSize = sizeof(palette) / sizeof(palette[0]);

  Image img;
  img.width = width;
  img.height = height;
  img.rgb.resize(3 * labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto* color = palette[labels[i] % kPaletteSize];
    img.rgb[3 * i] = color[0];
    img.rgb[3 * i + 1] = color[1];
    img.rgb[3 * i + 2] = color[2];
  }
  return img;
}

}  // namespace dirlin
