#include "vectra/colorspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vectra {

namespace {

const double kSqrt6 = std::sqrt(6.0);

}  // namespace

RgbPixel to_unit(Rgb8 p) { return {p.r / 255.0, p.g / 255.0, p.b / 255.0}; }

Rgb8 to_rgb8(RgbPixel p) {
  auto q = [](double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  };
  return {q(p.r), q(p.g), q(p.b)};
}

HsiPixel rgb_to_hsi(RgbPixel p) {
  // I  = ( R +  G +  B) / 3
  // V1 = (-R -  G + 2B) / sqrt 6
  // V2 = ( R -  G     ) / sqrt 6
  const double i = (p.r + p.g + p.b) / 3.0;
  const double v1 = (-p.r - p.g + 2.0 * p.b) / kSqrt6;
  const double v2 = (p.r - p.g) / kSqrt6;
  HsiPixel out;
  out.i = i;
  out.s = std::sqrt(v1 * v1 + v2 * v2);
  if (v1 == 0.0 && v2 == 0.0) {
    out.h = 0.0;
  } else {
    double h = std::atan2(v2, v1);
    if (h < 0.0) h += kTwoPi;
    if (h >= kTwoPi) h -= kTwoPi;
    out.h = h;
  }
  return out;
}

RgbPixel hsi_to_rgb(HsiPixel p) {
  const double v1 = p.s * std::cos(p.h);
  const double v2 = p.s * std::sin(p.h);
  const double b = p.i + kSqrt6 * v1 / 3.0;
  const double r = p.i - kSqrt6 * v1 / 6.0 + kSqrt6 * v2 / 2.0;
  const double g = p.i - kSqrt6 * v1 / 6.0 - kSqrt6 * v2 / 2.0;
  return {r, g, b};
}

double max_saturation_in_gamut(double h, double i) {
  // Each channel is i + s * c(h); the per-unit-saturation slopes come from
  // hsi_to_rgb with s = 1.
  const double v1 = std::cos(h);
  const double v2 = std::sin(h);
  const double slopes[3] = {
      -kSqrt6 * v1 / 6.0 + kSqrt6 * v2 / 2.0,
      -kSqrt6 * v1 / 6.0 - kSqrt6 * v2 / 2.0,
      kSqrt6 * v1 / 3.0,
  };
  double s = std::numeric_limits<double>::infinity();
  for (double c : slopes) {
    if (c > 1e-15) s = std::min(s, (1.0 - i) / c);
    else if (c < -1e-15) s = std::min(s, i / -c);
  }
  return std::max(0.0, s);
}

int quantize(double v, int bins) {
  if (!(v > 0.0)) return 0;
  const double q = std::floor(v * bins);
  if (q >= bins - 1) return bins - 1;
  return static_cast<int>(q);
}

BinCoord project(const HsiPixel& p, ProjectionMode mode, BinGrid bins) {
  BinCoord c;
  c.x = quantize(p.s / kMaxSaturation, bins.width);
  c.y = mode == ProjectionMode::SaturationHue ? quantize(p.h / kTwoPi, bins.height)
                                              : quantize(p.i, bins.height);
  return c;
}

double hue_difference(double h1, double h2) {
  double d = std::fmod(std::abs(h1 - h2), kTwoPi);
  if (d > std::numbers::pi) d = kTwoPi - d;
  return d;
}

double color_distance(const HsiPixel& a, const HsiPixel& b) {
  const double di = std::abs(a.i - b.i);
  const double phi = hue_difference(a.h, b.h);
  // Rounding can push the law-of-cosines term a hair below zero.
  const double chord2 = std::max(0.0, a.s * a.s + b.s * b.s - 2.0 * a.s * b.s * std::cos(phi));
  return std::sqrt(di * di + chord2);
}

}  // namespace vectra
