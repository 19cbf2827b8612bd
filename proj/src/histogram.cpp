#include "vectra/histogram.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace vectra {

Histogram2D::Histogram2D(ProjectionMode mode, BinGrid grid) : mode_(mode), grid_(grid) {
  if (grid.width < 2 || grid.height < 2) throw ValidationError("histogram grid needs at least 2 bins per axis");
  const auto n = static_cast<std::size_t>(grid.width) * static_cast<std::size_t>(grid.height);
  counts_.assign(n, 0);
  hue_cos_.assign(n, 0.0);
  hue_sin_.assign(n, 0.0);
  sat_sum_.assign(n, 0.0);
}

std::uint64_t Histogram2D::max_count() const {
  return counts_.empty() ? 0 : *std::max_element(counts_.begin(), counts_.end());
}

double Histogram2D::mean_hue(int x, int y) const {
  const auto k = index(x, y);
  if (counts_[k] == 0 || (hue_cos_[k] == 0.0 && hue_sin_[k] == 0.0)) return 0.0;
  double h = std::atan2(hue_sin_[k], hue_cos_[k]);
  if (h < 0.0) h += kTwoPi;
  return h >= kTwoPi ? 0.0 : h;
}

double Histogram2D::mean_saturation(int x, int y) const {
  const auto k = index(x, y);
  return counts_[k] == 0 ? 0.0 : sat_sum_[k] / static_cast<double>(counts_[k]);
}

void Histogram2D::add(const HsiPixel& p) {
  const auto c = project(p, mode_, grid_);
  const auto k = index(c.x, c.y);
  ++counts_[k];
  ++total_;
  // Achromatic pixels carry no hue information.
  if (p.s > 0.0) {
    hue_cos_[k] += std::cos(p.h);
    hue_sin_[k] += std::sin(p.h);
  }
  sat_sum_[k] += p.s;
}

Histogram2D& Histogram2D::operator+=(const Histogram2D& other) {
  if (other.mode_ != mode_ || !(other.grid_ == grid_)) throw ValidationError("cannot merge histograms of different layout");
  for (std::size_t k = 0; k < counts_.size(); ++k) {
    counts_[k] += other.counts_[k];
    hue_cos_[k] += other.hue_cos_[k];
    hue_sin_[k] += other.hue_sin_[k];
    sat_sum_[k] += other.sat_sum_[k];
  }
  total_ += other.total_;
  return *this;
}

Histogram2D build_histogram_rows(const RgbImage& image, ProjectionMode mode, BinGrid bins, int row_begin,
                                 int row_end) {
  Histogram2D h(mode, bins);
  row_begin = std::max(0, row_begin);
  row_end = std::min(image.height(), row_end);
  for (int y = row_begin; y < row_end; ++y)
    for (int x = 0; x < image.width(); ++x) h.add(rgb_to_hsi(image(x, y)));
  return h;
}

Histogram2D build_histogram(const RgbImage& image, ProjectionMode mode, BinGrid bins) {
  if (image.empty()) throw EmptyInputError("cannot build a histogram of an empty image");
  return build_histogram_rows(image, mode, bins, 0, image.height());
}

double log_intensity(std::uint64_t count, std::uint64_t max_count) {
  if (max_count == 0 || count == 0) return 0.0;
  if (count >= max_count) return 1.0;
  return std::log1p(static_cast<double>(count)) / std::log1p(static_cast<double>(max_count));
}

HsiPixel bin_display_color(const Histogram2D& h, int x, int y) {
  HsiPixel p;
  p.i = log_intensity(h.count(x, y), h.max_count());
  if (p.i == 0.0) return p;
  p.h = h.mode() == ProjectionMode::SaturationHue ? (y + 0.5) / h.height() * kTwoPi : h.mean_hue(x, y);
  const double s = (x + 0.5) / h.width() * kMaxSaturation;
  p.s = std::min(s, max_saturation_in_gamut(p.h, p.i));
  return p;
}

RgbImage render_histogram(const Histogram2D& h) {
  RgbImage img(h.width(), h.height());
  const auto max_count = h.max_count();
  if (max_count == 0) return img;
  for (int y = 0; y < h.height(); ++y)
    for (int x = 0; x < h.width(); ++x)
      if (h.count(x, y) > 0) img(x, y) = to_rgb8(hsi_to_rgb(bin_display_color(h, x, y)));
  return img;
}

namespace {

bool on_segment(BinCoord p, BinCoord a, BinCoord b) {
  const long long cross = static_cast<long long>(b.x - a.x) * (p.y - a.y) - static_cast<long long>(b.y - a.y) * (p.x - a.x);
  if (cross != 0) return false;
  return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) && p.y >= std::min(a.y, b.y) &&
         p.y <= std::max(a.y, b.y);
}

bool polygon_contains(const std::vector<BinCoord>& v, BinCoord p) {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i)
    if (on_segment(p, v[i], v[(i + 1) % n])) return true;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = v[i];
    const auto& b = v[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xs = a.x + static_cast<double>(p.y - a.y) * (b.x - a.x) / static_cast<double>(b.y - a.y);
      if (p.x < xs) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

bool ColorSelection::contains(BinCoord c) const {
  if (const auto* r = std::get_if<BinRect>(&region))
    return c.x >= r->x0 && c.x <= r->x1 && c.y >= r->y0 && c.y <= r->y1;
  return polygon_contains(std::get<BinPolygon>(region).vertices, c);
}

void ColorSelection::validate(BinGrid grid) const {
  auto in_grid = [&](int x, int y) { return x >= 0 && y >= 0 && x < grid.width && y < grid.height; };
  if (const auto* r = std::get_if<BinRect>(&region)) {
    if (r->x0 > r->x1 || r->y0 > r->y1) throw ValidationError("selection rectangle is empty (x0 > x1 or y0 > y1)");
    if (!in_grid(r->x0, r->y0) || !in_grid(r->x1, r->y1)) throw ValidationError("selection rectangle lies outside the histogram grid");
    return;
  }
  const auto& poly = std::get<BinPolygon>(region);
  if (poly.vertices.size() < 3) throw ValidationError("selection polygon needs at least 3 vertices");
  for (const auto& v : poly.vertices)
    if (!in_grid(v.x, v.y)) throw ValidationError("selection polygon vertex lies outside the histogram grid");
}

std::string mode_name(ProjectionMode mode) { return mode == ProjectionMode::SaturationHue ? "sh" : "si"; }

ProjectionMode parse_mode(const std::string& name) {
  if (name == "sh") return ProjectionMode::SaturationHue;
  if (name == "si") return ProjectionMode::SaturationIntensity;
  throw ValidationError("unknown projection mode '" + name + "' (expected sh or si)");
}

nlohmann::json to_json(const ColorSelection& sel) {
  nlohmann::json j;
  j["mode"] = mode_name(sel.mode);
  if (const auto* r = std::get_if<BinRect>(&sel.region)) {
    j["rect"] = {r->x0, r->y0, r->x1, r->y1};
  } else {
    auto pts = nlohmann::json::array();
    for (const auto& v : std::get<BinPolygon>(sel.region).vertices) pts.push_back({v.x, v.y});
    j["polygon"] = pts;
  }
  return j;
}

ColorSelection selection_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw ValidationError("selection must be a JSON object");
    ColorSelection sel;
    sel.mode = parse_mode(j.at("mode").get<std::string>());
    const bool has_rect = j.contains("rect");
    const bool has_poly = j.contains("polygon");
    if (has_rect == has_poly) throw ValidationError("selection needs exactly one of 'rect' or 'polygon'");
    if (has_rect) {
      const auto& r = j.at("rect");
      if (!r.is_array() || r.size() != 4) throw ValidationError("'rect' must be [x0, y0, x1, y1]");
      sel.region = BinRect{r[0].get<int>(), r[1].get<int>(), r[2].get<int>(), r[3].get<int>()};
    } else {
      BinPolygon poly;
      for (const auto& v : j.at("polygon")) {
        if (!v.is_array() || v.size() != 2) throw ValidationError("polygon vertices must be [x, y] pairs");
        poly.vertices.push_back({v[0].get<int>(), v[1].get<int>()});
      }
      sel.region = std::move(poly);
    }
    return sel;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed selection JSON: ") + e.what());
  }
}

ColorSelection parse_selection(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("selection is not valid JSON: ") + e.what());
  }
  return selection_from_json(j);
}

BinaryMask extract_mask(const RgbImage& image, const ColorSelection& sel, BinGrid bins) {
  sel.validate(bins);
  std::vector<std::uint8_t> lut(static_cast<std::size_t>(bins.width) * static_cast<std::size_t>(bins.height));
  for (int y = 0; y < bins.height; ++y)
    for (int x = 0; x < bins.width; ++x)
      lut[static_cast<std::size_t>(y) * bins.width + x] = sel.contains({x, y}) ? 1 : 0;

  BinaryMask mask(image.width(), image.height());
  for (std::size_t k = 0; k < image.size(); ++k) {
    const auto c = project(rgb_to_hsi(image.data()[k]), sel.mode, bins);
    mask.data()[k] = lut[static_cast<std::size_t>(c.y) * bins.width + c.x];
  }
  return mask;
}

}  // namespace vectra
