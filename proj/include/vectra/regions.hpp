#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "vectra/colorspace.hpp"
#include "vectra/raster.hpp"

namespace vectra {

/// 0 = not part of the labelled class, k >= 1 = region id.
using LabelMap = Grid<int>;

struct PixelBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = -1;
  int y1 = -1;
};

struct Region {
  std::size_t area = 0;
  /// Ids of regions of the opposite class sharing a 4-adjacent boundary, sorted.
  std::vector<int> adjacent;
  bool touches_border = false;
  /// Background only: enclosed by foreground (does not reach the image border).
  bool is_hole = false;
  PixelBox bbox;
};

/// Foreground regions (8-connected) and background regions (4-connected);
/// entry k - 1 describes label k.
struct RegionTable {
  std::vector<Region> foreground;
  std::vector<Region> background;
};

struct Labeling {
  LabelMap foreground;
  LabelMap background;
  RegionTable table;
};

/// Two-pass union-find labelling of both classes with the 8/4 connectivity
/// pair. Labels are numbered in raster order of first appearance.
Labeling label_components(const BinaryMask& mask);

/// Clears foreground regions with area < threshold.
BinaryMask remove_small_regions(const BinaryMask& mask, const Labeling& labels, std::size_t threshold);
BinaryMask remove_small_regions(const BinaryMask& mask, std::size_t threshold);

/// Fills enclosed background regions with area < threshold.
BinaryMask remove_small_holes(const BinaryMask& mask, const Labeling& labels, std::size_t threshold);
BinaryMask remove_small_holes(const BinaryMask& mask, std::size_t threshold);

struct GrowthParams {
  double max_distance = 0.1;
  /// Stop after admitting this many pixels.
  std::optional<std::size_t> max_pixels;
};

/// One admission made by region_grow, in order.
struct GrowthStep {
  Pixel pixel;
  int region = 0;
  double distance = 0.0;
};

/// Best-first seeded region growing.
///
/// Every 8-connected seed component keeps a running mean RGB colour. Background
/// pixels 8-adjacent to a component enter a priority queue keyed by the
/// colour distance between the pixel and that component's mean (converted to
/// HSI) at the time of insertion. The smallest key is admitted while it does
/// not exceed `max_distance`; admission updates the component mean and pushes
/// the new frontier. Equal keys are resolved by raster index, then by
/// component id.
BinaryMask region_grow(const RgbImage& image, const BinaryMask& seed, const GrowthParams& params,
                       std::vector<GrowthStep>* trace = nullptr);

/// Arithmetic mean of the foreground pixels' RGB values.
RgbPixel mean_region_color(const RgbImage& image, const BinaryMask& mask);

/// One simultaneous pass: background pixels with at least two foreground
/// 4-neighbours in the input become foreground.
BinaryMask connect_adjacent(const BinaryMask& mask);

}  // namespace vectra
