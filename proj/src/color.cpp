#include "dirlin/color.hpp"

#include <cmath>

#include "dirlin/common.hpp"

namespace dirlin {
namespace {

inline double srgb_to_linear(std::uint8_t c8) {
  const double c = c8 / 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

// D65 white point in XYZ and its (u', v') chromaticity.
constexpr double kXn = 0.95047, kYn = 1.0, kZn = 1.08883;
const double kUnPrime = 4.0 * kXn / (kXn + 15.0 * kYn + 3.0 * kZn);
const double kVnPrime = 9.0 * kYn / (kXn + 15.0 * kYn + 3.0 * kZn);

}  // namespace

HclPixel rgb_to_hcl(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  const double r = srgb_to_linear(r8);
  const double g = srgb_to_linear(g8);
  const double b = srgb_to_linear(b8);

  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;

  const double yr = y / kYn;
  const double lstar = yr > 216.0 / 24389.0 ? 116.0 * std::cbrt(yr) - 16.0 : 24389.0 / 27.0 * yr;

  const double denom = x + 15.0 * y + 3.0 * z;
  HclPixel out;
  out.lightness = lstar;
  if (denom <= 0.0 || lstar <= 0.0) return out;  // black: C = 0, H = 0

  const double u_prime = 4.0 * x / denom;
  const double v_prime = 9.0 * y / denom;
  const double u_star = 13.0 * lstar * (u_prime - kUnPrime);
  const double v_star = 13.0 * lstar * (v_prime - kVnPrime);

  out.chroma = std::hypot(u_star, v_star);
  out.hue = out.chroma > 0.0 ? wrap_angle(std::atan2(v_star, u_star)) : 0.0;
  return out;
}

}  // namespace dirlin
