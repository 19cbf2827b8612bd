#pragma once

#include <numbers>

#include "vectra/raster.hpp"

namespace vectra {

/// Normalised RGB colour, each channel in [0, 1].
struct RgbPixel {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  friend bool operator==(const RgbPixel&, const RgbPixel&) = default;
};

/// Cylindrical colour: hue angle h in [0, 2pi), saturation s >= 0 (radius),
/// intensity i in [0, 1] (achromatic axis). A zero saturation has h == 0.
struct HsiPixel {
  double h = 0.0;
  double s = 0.0;
  double i = 0.0;

  friend bool operator==(const HsiPixel&, const HsiPixel&) = default;
};

enum class ProjectionMode { SaturationHue, SaturationIntensity };

/// Histogram grid dimensions (bins per axis).
struct BinGrid {
  int width = 256;
  int height = 256;

  friend bool operator==(const BinGrid&, const BinGrid&) = default;
};

struct BinCoord {
  int x = 0;
  int y = 0;

  friend bool operator==(const BinCoord&, const BinCoord&) = default;
};

/// Largest saturation reachable from the unit RGB cube (attained at blue,
/// yellow and their neighbours): sqrt(2/3).
inline const double kMaxSaturation = std::sqrt(2.0 / 3.0);

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

RgbPixel to_unit(Rgb8 p);
Rgb8 to_rgb8(RgbPixel p);

HsiPixel rgb_to_hsi(RgbPixel p);
inline HsiPixel rgb_to_hsi(Rgb8 p) { return rgb_to_hsi(to_unit(p)); }

/// Inverse transform. The result is not clamped, so out-of-gamut inputs give
/// channels outside [0, 1].
RgbPixel hsi_to_rgb(HsiPixel p);

/// Largest saturation at hue `h` and intensity `i` that keeps every RGB
/// channel inside [0, 1].
double max_saturation_in_gamut(double h, double i);

/// floor(v * bins) clamped into [0, bins - 1]. NaN maps to bin 0.
int quantize(double v, int bins);

BinCoord project(const HsiPixel& p, ProjectionMode mode, BinGrid bins);

/// Euclidean distance in the cylindrical colour space: the intensity
/// difference combined with the chord between the two (s, h) polar points.
double color_distance(const HsiPixel& a, const HsiPixel& b);

/// Hue difference folded into [0, pi].
double hue_difference(double h1, double h2);

}  // namespace vectra
