#pragma once

#include <cstdint>

namespace dirlin {

// Cylindrical CIELUV coordinates of one pixel. Hue is 0 by convention when
// chroma vanishes (achromatic pixels).
struct HclPixel {
  double hue = 0.0;        // radians in [0, 2*pi)
  double chroma = 0.0;     // >= 0
  double lightness = 0.0;  // L* in [0, 100]
};

// sRGB (8-bit, D65) -> linear RGB -> XYZ -> L*u*v* -> (H, C, L).
HclPixel rgb_to_hcl(std::uint8_t r, std::uint8_t g, std::uint8_t b);

}  // namespace dirlin
