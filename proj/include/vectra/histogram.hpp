#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vectra/colorspace.hpp"
#include "vectra/raster.hpp"

namespace vectra {

/// Frequency counts of projected colours over a 2D bin grid.
///
/// Besides the counts each bin accumulates the hue (as a unit vector) and the
/// saturation of the pixels that fell into it, so the rendered histogram can
/// show a representative colour for projections that do not carry hue on an
/// axis.
class Histogram2D {
 public:
  Histogram2D(ProjectionMode mode, BinGrid grid);

  ProjectionMode mode() const { return mode_; }
  BinGrid grid() const { return grid_; }
  int width() const { return grid_.width; }
  int height() const { return grid_.height; }

  std::uint64_t count(int x, int y) const { return counts_[index(x, y)]; }
  std::uint64_t total() const { return total_; }
  std::uint64_t max_count() const;
  const std::vector<std::uint64_t>& counts() const { return counts_; }

  /// Circular mean hue of the pixels in a bin (0 for empty bins).
  double mean_hue(int x, int y) const;
  double mean_saturation(int x, int y) const;

  void add(const HsiPixel& p);

  /// Bin-wise sum; used to merge per-band partial histograms.
  Histogram2D& operator+=(const Histogram2D& other);

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(grid_.width) + static_cast<std::size_t>(x);
  }

  ProjectionMode mode_;
  BinGrid grid_;
  std::vector<std::uint64_t> counts_;
  std::vector<double> hue_cos_;
  std::vector<double> hue_sin_;
  std::vector<double> sat_sum_;
  std::uint64_t total_ = 0;
};

Histogram2D build_histogram(const RgbImage& image, ProjectionMode mode, BinGrid bins = {});

/// Counts only rows [row_begin, row_end).
Histogram2D build_histogram_rows(const RgbImage& image, ProjectionMode mode, BinGrid bins, int row_begin,
                                 int row_end);

/// Normalised log frequency: log(1 + count) / log(1 + max_count), 0 when
/// max_count is 0.
double log_intensity(std::uint64_t count, std::uint64_t max_count);

/// Display colour of one bin before conversion to RGB.
HsiPixel bin_display_color(const Histogram2D& h, int x, int y);

/// Image of the histogram grid: empty bins are black, occupied bins show
/// their colour with brightness given by log_intensity.
RgbImage render_histogram(const Histogram2D& h);

/// Inclusive rectangle of bins.
struct BinRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  friend bool operator==(const BinRect&, const BinRect&) = default;
};

/// Closed polygon in bin coordinates; the boundary counts as inside.
struct BinPolygon {
  std::vector<BinCoord> vertices;

  friend bool operator==(const BinPolygon&, const BinPolygon&) = default;
};

/// An operator's selection of a colour cluster on the histogram.
struct ColorSelection {
  ProjectionMode mode = ProjectionMode::SaturationHue;
  std::variant<BinRect, BinPolygon> region;

  bool contains(BinCoord c) const;

  /// Throws ValidationError when the region is empty, malformed or falls
  /// outside `grid`.
  void validate(BinGrid grid) const;

  friend bool operator==(const ColorSelection&, const ColorSelection&) = default;
};

// {"mode": "sh"|"si", "rect": [x0, y0, x1, y1]} or {"mode": ..., "polygon": [[x, y], ...]}
nlohmann::json to_json(const ColorSelection& sel);
ColorSelection selection_from_json(const nlohmann::json& j);
ColorSelection parse_selection(const std::string& text);

std::string mode_name(ProjectionMode mode);
ProjectionMode parse_mode(const std::string& name);

/// Pixels whose projected bin lies inside the selection.
BinaryMask extract_mask(const RgbImage& image, const ColorSelection& sel, BinGrid bins = {});

}  // namespace vectra
