#include "vectra/regions.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <unordered_set>
#include <set>
#include <tuple>

namespace vectra {

namespace {

class DisjointSets {
 public:
  int make_set() {
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Keeps the smaller root so provisional labels resolve to their earliest set.
  void join(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<int> parent_;
};

// Labels pixels whose mask value equals `value`. Returns labels 1..R in raster
// order of first appearance and sets `count` to R.
LabelMap two_pass(const BinaryMask& mask, std::uint8_t value, bool eight, int& count) {
  const int w = mask.width();
  const int h = mask.height();
  LabelMap provisional(w, h, -1);
  DisjointSets sets;

  // Already-visited neighbours: W, NW, N, NE (the diagonals only under 8-connectivity).
  static constexpr int dx[4] = {-1, -1, 0, 1};
  static constexpr int dy[4] = {0, -1, -1, -1};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask(x, y) != value) continue;
      int label = -1;
      for (int k = 0; k < 4; ++k) {
        if (!eight && dx[k] != 0 && dy[k] != 0) continue;
        const int nx = x + dx[k];
        const int ny = y + dy[k];
        if (!mask.contains(nx, ny) || mask(nx, ny) != value) continue;
        const int other = provisional(nx, ny);
        if (label < 0) label = other;
        else sets.join(label, other);
      }
      provisional(x, y) = label < 0 ? sets.make_set() : label;
    }
  }

  LabelMap out(w, h, 0);
  std::vector<int> compact;
  count = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (provisional(x, y) < 0) continue;
      const int root = sets.find(provisional(x, y));
      if (static_cast<std::size_t>(root) >= compact.size()) compact.resize(root + 1, 0);
      if (compact[root] == 0) compact[root] = ++count;
      out(x, y) = compact[root];
    }
  }
  return out;
}

void extend_box(PixelBox& b, int x, int y, bool first) {
  if (first) {
    b = {x, y, x, y};
    return;
  }
  b.x0 = std::min(b.x0, x);
  b.y0 = std::min(b.y0, y);
  b.x1 = std::max(b.x1, x);
  b.y1 = std::max(b.y1, y);
}

}  // namespace

Labeling label_components(const BinaryMask& mask) {
  Labeling out;
  int nfg = 0;
  int nbg = 0;
  out.foreground = two_pass(mask, 1, true, nfg);
  out.background = two_pass(mask, 0, false, nbg);
  out.table.foreground.resize(nfg);
  out.table.background.resize(nbg);

  std::vector<std::set<int>> fg_adj(nfg);
  std::vector<std::set<int>> bg_adj(nbg);
  const int w = mask.width();
  const int h = mask.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool fg = mask(x, y) != 0;
      const int label = fg ? out.foreground(x, y) : out.background(x, y);
      auto& region = fg ? out.table.foreground[label - 1] : out.table.background[label - 1];
      extend_box(region.bbox, x, y, region.area == 0);
      ++region.area;
      if (x == 0 || y == 0 || x == w - 1 || y == h - 1) region.touches_border = true;
      // East and south neighbours cover every 4-adjacent pair once.
      const int nx[2] = {x + 1, x};
      const int ny[2] = {y, y + 1};
      for (int k = 0; k < 2; ++k) {
        if (!mask.contains(nx[k], ny[k]) || (mask(nx[k], ny[k]) != 0) == fg) continue;
        const int f = fg ? label : out.foreground(nx[k], ny[k]);
        const int b = fg ? out.background(nx[k], ny[k]) : label;
        fg_adj[f - 1].insert(b);
        bg_adj[b - 1].insert(f);
      }
    }
  }
  for (int i = 0; i < nfg; ++i) out.table.foreground[i].adjacent.assign(fg_adj[i].begin(), fg_adj[i].end());
  for (int i = 0; i < nbg; ++i) {
    auto& r = out.table.background[i];
    r.adjacent.assign(bg_adj[i].begin(), bg_adj[i].end());
    r.is_hole = !r.touches_border;
  }
  return out;
}

BinaryMask remove_small_regions(const BinaryMask& mask, const Labeling& labels, std::size_t threshold) {
  BinaryMask out = mask;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const int label = labels.foreground.data()[k];
    if (label > 0 && labels.table.foreground[label - 1].area < threshold) out.data()[k] = 0;
  }
  return out;
}

BinaryMask remove_small_regions(const BinaryMask& mask, std::size_t threshold) {
  return remove_small_regions(mask, label_components(mask), threshold);
}

BinaryMask remove_small_holes(const BinaryMask& mask, const Labeling& labels, std::size_t threshold) {
  BinaryMask out = mask;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const int label = labels.background.data()[k];
    if (label == 0) continue;
    const auto& r = labels.table.background[label - 1];
    if (r.is_hole && r.area < threshold) out.data()[k] = 1;
  }
  return out;
}

BinaryMask remove_small_holes(const BinaryMask& mask, std::size_t threshold) {
  return remove_small_holes(mask, label_components(mask), threshold);
}

BinaryMask region_grow(const RgbImage& image, const BinaryMask& seed, const GrowthParams& params,
                       std::vector<GrowthStep>* trace) {
  if (image.width() != seed.width() || image.height() != seed.height())
    throw ValidationError("region_grow: image and seed dimensions differ");
  if (params.max_distance < 0.0) throw ValidationError("region_grow: negative distance threshold");
  if (count_foreground(seed) == 0) throw ValidationError("region_grow: empty seed");

  const int w = seed.width();
  const auto labels = label_components(seed);
  const int ncomp = static_cast<int>(labels.table.foreground.size());

  struct Stats {
    double r = 0, g = 0, b = 0;
    std::size_t n = 0;
    HsiPixel mean;
    void refresh() { mean = rgb_to_hsi(RgbPixel{r / n, g / n, b / n}); }
  };
  std::vector<Stats> stats(ncomp);
  LabelMap owner = labels.foreground;
  for (std::size_t k = 0; k < seed.size(); ++k) {
    const int c = owner.data()[k];
    if (c == 0) continue;
    const auto p = to_unit(image.data()[k]);
    auto& s = stats[c - 1];
    s.r += p.r;
    s.g += p.g;
    s.b += p.b;
    ++s.n;
  }
  for (auto& s : stats) s.refresh();

  using Entry = std::tuple<double, std::size_t, int>;  // distance, raster index, component
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  // (pixel, component) pairs already queued; a pixel is queued at most once per component.
  std::unordered_set<std::uint64_t> queued;

  auto push_neighbours = [&](int x, int y, int comp) {
    for (int k = 0; k < 8; ++k) {
      const int nx = x + kDx8[k];
      const int ny = y + kDy8[k];
      if (!owner.contains(nx, ny) || owner(nx, ny) != 0) continue;
      if (!queued.insert(owner.index(nx, ny) * static_cast<std::uint64_t>(ncomp + 1) + comp).second) continue;
      const double d = color_distance(rgb_to_hsi(image(nx, ny)), stats[comp - 1].mean);
      queue.emplace(d, owner.index(nx, ny), comp);
    }
  };

  for (int y = 0; y < seed.height(); ++y)
    for (int x = 0; x < w; ++x)
      if (owner(x, y) != 0) push_neighbours(x, y, owner(x, y));

  BinaryMask out = seed;
  std::size_t admitted = 0;
  while (!queue.empty()) {
    if (params.max_pixels && admitted >= *params.max_pixels) break;
    const auto [d, idx, comp] = queue.top();
    queue.pop();
    if (d > params.max_distance) break;
    if (owner.data()[idx] != 0) continue;
    const int x = static_cast<int>(idx % static_cast<std::size_t>(w));
    const int y = static_cast<int>(idx / static_cast<std::size_t>(w));
    owner.data()[idx] = comp;
    out.data()[idx] = 1;
    ++admitted;
    if (trace) trace->push_back({{x, y}, comp, d});
    auto& s = stats[comp - 1];
    const auto p = to_unit(image.data()[idx]);
    s.r += p.r;
    s.g += p.g;
    s.b += p.b;
    ++s.n;
    s.refresh();
    push_neighbours(x, y, comp);
  }
  return out;
}

RgbPixel mean_region_color(const RgbImage& image, const BinaryMask& mask) {
  if (image.width() != mask.width() || image.height() != mask.height())
    throw ValidationError("mean_region_color: image and mask dimensions differ");
  double r = 0, g = 0, b = 0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (!mask.data()[k]) continue;
    const auto p = to_unit(image.data()[k]);
    r += p.r;
    g += p.g;
    b += p.b;
    ++n;
  }
  if (n == 0) throw ValidationError("mean_region_color: empty mask");
  return {r / n, g / n, b / n};
}

BinaryMask connect_adjacent(const BinaryMask& mask) {
  BinaryMask out = mask;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask(x, y)) continue;
      int n = 0;
      for (int k = 0; k < 4; ++k) n += mask.at_or(x + kDx4[k], y + kDy4[k], 0) != 0;
      if (n >= 2) out(x, y) = 1;
    }
  }
  return out;
}

}  // namespace vectra
