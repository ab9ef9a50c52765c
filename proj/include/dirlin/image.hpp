#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dirlin/direction.hpp"

namespace dirlin {

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // 3 bytes per pixel, row major

  const std::uint8_t* pixel(int x, int y) const {
    return rgb.data() + 3 * (static_cast<std::size_t>(y) * width + x);
  }
  std::uint8_t* pixel(int x, int y) {
    return rgb.data() + 3 * (static_cast<std::size_t>(y) * width + x);
  }
};

Image read_png(const std::string& path);
void write_png(const Image& image, const std::string& path);

// One observation per kept pixel: direction = hue (p = 2), linear =
// (chroma, lightness), standardized per image unless disabled. A constant
// column is centered and left at zero.
struct ImageObservations {
  std::vector<DirLinObservation> observations;
  std::vector<int> pixel_index;  // flat index y * width + x per observation
  int width = 0, height = 0, stride = 1;
  bool standardized = true;
  double chroma_mean = 0.0, chroma_sd = 1.0;
  double lightness_mean = 0.0, lightness_sd = 1.0;
};

ImageObservations image_to_observations(const Image& image, int stride = 1,
                                        bool standardize = true);

// Parallel and serial per-pixel HCL conversion twins (identical output).
std::vector<double> image_to_hcl(const Image& image);         // 3 doubles per pixel: H, C, L
std::vector<double> image_to_hcl_serial(const Image& image);

// Labels -> fixed-palette RGB image.
Image label_map_to_image(const std::vector<int>& labels, int width, int height);

}  // namespace dirlin
