#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "vectra/gapclosure.hpp"

namespace testing {

using namespace vectra;

BinaryMask mask_from(const std::vector<std::string>& rows) {
  const int h = static_cast<int>(rows.size());
  const int w = h ? static_cast<int>(rows[0].size()) : 0;
  BinaryMask m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m(x, y) = rows[y][x] == '#' || rows[y][x] == '1';
  return m;
}

std::vector<std::string> rows_of(const BinaryMask& mask) {
  std::vector<std::string> rows;
  for (int y = 0; y < mask.height(); ++y) {
    std::string r;
    for (int x = 0; x < mask.width(); ++x) r += mask(x, y) ? '#' : '.';
    rows.push_back(r);
  }
  return rows;
}

BinaryMask random_mask(std::mt19937& rng, int w, int h, double density) {
  std::bernoulli_distribution coin(density);
  BinaryMask m(w, h);
  for (auto& v : m.data()) v = coin(rng);
  return m;
}

BinaryMask random_blobs(std::mt19937& rng, int w, int h) {
  BinaryMask m(w, h);
  std::uniform_real_distribution<double> ux(0, w), uy(0, h), ur(1.5, std::max(2.0, std::min(w, h) / 6.0));
  std::uniform_int_distribution<int> count(2, 6);
  const int n = count(rng);
  for (int k = 0; k < n; ++k) {
    const Vec2 a{ux(rng), uy(rng)};
    const Vec2 b = (k % 2) ? Vec2{ux(rng), uy(rng)} : a;
    const double r = ur(rng);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (point_segment_distance(Vec2{double(x), double(y)}, a, b) <= r) m(x, y) = 1;
  }
  return m;
}

RgbImage random_image(std::mt19937& rng, int w, int h, int palette) {
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<Rgb8> colors;
  for (int k = 0; k < palette; ++k)
    colors.push_back(Rgb8{std::uint8_t(byte(rng)), std::uint8_t(byte(rng)), std::uint8_t(byte(rng))});
  std::uniform_int_distribution<int> pick(0, palette - 1);
  RgbImage img(w, h);
  for (auto& p : img.data()) p = palette > 0 ? colors[pick(rng)] : Rgb8{std::uint8_t(byte(rng)), std::uint8_t(byte(rng)), std::uint8_t(byte(rng))};
  return img;
}

int add_open_arc(NetGraph& g, const Polyline& poly) {
  const int a = g.add_node(NodeKind::Endpoint, poly.front());
  const int b = g.add_node(NodeKind::Endpoint, poly.back());
  return g.add_arc(a, b, rasterize_polyline(poly), poly);
}

Grid<int> flood_fill_labels(const BinaryMask& mask, bool foreground, bool eight) {
  Grid<int> labels(mask.width(), mask.height(), 0);
  int next = 0;
  std::function<void(int, int, int)> fill = [&](int x, int y, int label) {
    if (!mask.contains(x, y) || labels(x, y) || (mask(x, y) != 0) != foreground) return;
    labels(x, y) = label;
    for (int k = 0; k < 8; ++k) {
      if (!eight && k % 2) continue;
      fill(x + kDx8[k], y + kDy8[k], label);
    }
  };
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      if ((mask(x, y) != 0) == foreground && !labels(x, y)) fill(x, y, ++next);
  return labels;
}

Grid<int> dijkstra_chamfer(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  constexpr int inf = std::numeric_limits<int>::max();
  Grid<int> d(w, h, inf);
  using Item = std::pair<int, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!mask(x, y)) {
        d(x, y) = 0;
        q.emplace(0, y * w + x);
        continue;
      }
      // Pixels outside the image act as background sources.
      for (int k = 0; k < 8; ++k) {
        const int nx = x + kDx8[k], ny = y + kDy8[k];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) {
          const int step = k % 2 ? 4 : 3;
          if (step < d(x, y)) {
            d(x, y) = step;
            q.emplace(step, y * w + x);
          }
        }
      }
    }
  while (!q.empty()) {
    const auto [dist, idx] = q.top();
    q.pop();
    const int x = idx % w, y = idx / w;
    if (dist > d(x, y)) continue;
    for (int k = 0; k < 8; ++k) {
      const int nx = x + kDx8[k], ny = y + kDy8[k];
      if (!mask.contains(nx, ny) || !mask(nx, ny)) continue;
      const int nd = dist + (k % 2 ? 4 : 3);
      if (nd < d(nx, ny)) {
        d(nx, ny) = nd;
        q.emplace(nd, ny * w + nx);
      }
    }
  }
  return d;
}

namespace {

double seg_dist(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + ab * t);
}

}  // namespace

std::vector<std::size_t> rdp_indices(const std::vector<Vec2>& pts, double tol) {
  if (pts.size() < 2) return {0};
  std::vector<bool> keep(pts.size(), false);
  keep.front() = keep.back() = true;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, pts.size() - 1}};
  while (!stack.empty()) {
    const auto [i, j] = stack.back();
    stack.pop_back();
    double worst = -1.0;
    std::size_t at = i;
    for (std::size_t k = i + 1; k < j; ++k) {
      const double d = seg_dist(pts[k], pts[i], pts[j]);
      if (d > worst) {
        worst = d;
        at = k;
      }
    }
    if (worst > tol) {
      keep[at] = true;
      stack.push_back({i, at});
      stack.push_back({at, j});
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < pts.size(); ++k)
    if (keep[k]) out.push_back(k);
  return out;
}

std::size_t min_vertices(const std::vector<Vec2>& pts, double tol) {
  const std::size_t n = pts.size();
  if (n < 2) return n;
  std::vector<std::size_t> best(n, std::numeric_limits<std::size_t>::max());
  best[0] = 1;
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = 0; i < j; ++i) {
      if (best[i] == std::numeric_limits<std::size_t>::max()) continue;
      bool ok = true;
      for (std::size_t k = i + 1; k < j && ok; ++k) ok = seg_dist(pts[k], pts[i], pts[j]) <= tol;
      if (ok) best[j] = std::min(best[j], best[i] + 1);
    }
  return best[n - 1];
}

std::vector<int> brute_max_clique(const std::vector<int>& vertices, const std::vector<std::pair<int, int>>& edges) {
  std::set<std::pair<int, int>> e;
  for (auto [a, b] : edges) {
    e.insert({a, b});
    e.insert({b, a});
  }
  auto sorted = vertices;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  std::vector<int> best;
  for (std::uint32_t m = 1; m < (1u << n); ++m) {
    std::vector<int> set;
    for (std::size_t k = 0; k < n; ++k)
      if (m & (1u << k)) set.push_back(sorted[k]);
    bool clique = true;
    for (std::size_t i = 0; i < set.size() && clique; ++i)
      for (std::size_t j = i + 1; j < set.size() && clique; ++j) clique = e.count({set[i], set[j]}) > 0;
    if (!clique) continue;
    if (set.size() > best.size() || (set.size() == best.size() && set < best)) best = set;
  }
  return best;
}

DxfFile parse_dxf(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::pair<int, std::string>> groups;
  std::string code, value;
  auto strip = [](std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    const auto b = s.find_first_not_of(' ');
    return b == std::string::npos ? std::string() : s.substr(b);
  };
  while (std::getline(in, code)) {
    if (!std::getline(in, value)) throw std::runtime_error("dangling group code");
    groups.emplace_back(std::stoi(strip(code)), strip(value));
  }
  DxfFile f;
  std::size_t i = 0;
  auto expect = [&](int c) -> const std::string& {
    if (i >= groups.size() || groups[i].first != c) throw std::runtime_error("unexpected group at " + std::to_string(i));
    return groups[i++].second;
  };
  bool eof = false;
  while (i < groups.size()) {
    const auto& kw = expect(0);
    if (kw == "EOF") {
      eof = true;
      break;
    }
    if (kw != "SECTION") throw std::runtime_error("expected SECTION, got " + kw);
    const auto name = expect(2);
    f.sections.push_back(name);
    DxfPolyline* open = nullptr;
    bool in_polyline = false;
    while (true) {
      if (i >= groups.size()) throw std::runtime_error("unterminated section " + name);
      if (groups[i].first == 0 && groups[i].second == "ENDSEC") {
        ++i;
        break;
      }
      const auto [c, v] = groups[i++];
      if (name == "HEADER" && c == 9 && v == "$ACADVER") f.version = expect(1);
      if (name == "TABLES" && c == 0 && v == "LAYER") {
        f.layers.push_back(expect(2));
        while (i < groups.size() && groups[i].first != 0) {
          if (groups[i].first == 62) f.layer_colors.push_back(std::stoi(groups[i].second));
          ++i;
        }
      }
      if (name == "ENTITIES" && c == 0) {
        if (v == "POLYLINE") {
          if (in_polyline) throw std::runtime_error("nested POLYLINE");
          f.polylines.push_back({});
          open = &f.polylines.back();
          in_polyline = true;
          while (i < groups.size() && groups[i].first != 0) {
            if (groups[i].first == 8) open->layer = groups[i].second;
            ++i;
          }
        } else if (v == "VERTEX") {
          if (!in_polyline) throw std::runtime_error("VERTEX outside POLYLINE");
          double x = NAN, y = NAN;
          while (i < groups.size() && groups[i].first != 0) {
            if (groups[i].first == 10) x = std::stod(groups[i].second);
            if (groups[i].first == 20) y = std::stod(groups[i].second);
            ++i;
          }
          if (std::isnan(x) || std::isnan(y)) throw std::runtime_error("VERTEX without coordinates");
          open->vertices.push_back({x, y});
        } else if (v == "SEQEND") {
          if (!in_polyline) throw std::runtime_error("SEQEND without POLYLINE");
          in_polyline = false;
        }
      }
    }
    if (in_polyline) throw std::runtime_error("POLYLINE without SEQEND");
  }
  if (!eof) throw std::runtime_error("missing EOF");
  return f;
}

double point_polyline_distance(Vec2 p, const Polyline& poly) {
  if (poly.size() == 1) return distance(p, poly[0]);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < poly.size(); ++k) best = std::min(best, seg_dist(p, poly[k - 1], poly[k]));
  return best;
}

Fig11Fixture make_fig11() {
  Fig11Fixture f;
  f.graph = NetGraph(200, 200);
  const Polyline arcs[5] = {{},
                            {{100, 50}, {100, 88}},
                            {{50, 100}, {94, 100}},
                            {{150, 100}, {106, 100}},
                            {{113, 135}, {113, 105}}};
  for (int k = 1; k <= 4; ++k) {
    add_open_arc(f.graph, arcs[k]);
    f.e[k] = node_at(f.graph, arcs[k].back());
  }
  return f;
}

NetGraph short_cycle_fixture() {
  NetGraph g(40, 20);
  add_open_arc(g, {{20, 10}, {17, 10}, {17, 12}, {26, 12}, {26, 10}, {23, 10}});
  return g;
}

NetGraph elongated_cycle_fixture() {
  NetGraph g(60, 60);
  add_open_arc(g, {{20, 10}, {14, 10}, {14, 40}, {32, 40}, {32, 10}, {26, 10}});
  return g;
}

int node_at(const NetGraph& g, Vec2 pos) {
  for (const auto& [id, n] : g.nodes())
    if (n.pos == pos) return id;
  return 0;
}

RiverMap make_river_map(int size, int breaks, std::uint32_t seed) {
  RiverMap m;
  m.image = RgbImage(size, size, Rgb8{255, 255, 255});
  m.river_color = Rgb8{30, 60, 200};
  const double cy = size / 2.0;
  const double amp = size / 10.0;
  const double period = size / 2.5;
  const double half_width = 2.5;
  auto centre = [&](double x) { return cy + amp * std::sin(2 * std::numbers::pi * x / period); };

  for (double x = 0; x <= size - 1; x += 0.25) m.truth.push_back({x, centre(x)});

  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> jitter(-8, 8);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      if (std::abs(y - cy) > amp + half_width + 1) continue;
      // Distance to the curve, sampled locally.
      double best = std::numeric_limits<double>::infinity();
      for (double t = x - 6; t <= x + 6; t += 0.25) best = std::min(best, distance(Vec2{double(x), double(y)}, Vec2{t, centre(t)}));
      if (best <= half_width) {
        auto ch = [&](int v) { return static_cast<std::uint8_t>(std::clamp(v + jitter(rng), 0, 255)); };
        m.image(x, y) = Rgb8{ch(m.river_color.r), ch(m.river_color.g), ch(m.river_color.b)};
      }
    }

  const Rgb8 grey{128, 128, 128};
  constexpr int line_width = 5;
  for (int k = 1; k <= breaks; ++k) {
    const int x0 = size * k / (breaks + 1);
    m.break_xs.push_back(x0);
    for (int y = 0; y < size; ++y)
      for (int x = x0 - line_width / 2; x <= x0 + line_width / 2; ++x) m.image(x, y) = grey;
  }
  for (int y0 : {size / 8, size - size / 8})
    for (int y = y0 - line_width / 2; y <= y0 + line_width / 2; ++y)
      for (int x = 0; x < size; ++x) m.image(x, y) = grey;
  return m;
}

ColorSelection selection_around(Rgb8 color, int jitter, int margin) {
  const BinGrid grid;
  int x0 = grid.width, y0 = grid.height, x1 = -1, y1 = -1;
  for (int dr = -jitter; dr <= jitter; ++dr)
    for (int dg = -jitter; dg <= jitter; ++dg)
      for (int db = -jitter; db <= jitter; ++db) {
        auto ch = [](int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); };
        const Rgb8 c{ch(color.r + dr), ch(color.g + dg), ch(color.b + db)};
        const auto b = project(rgb_to_hsi(c), ProjectionMode::SaturationHue, grid);
        x0 = std::min(x0, b.x);
        y0 = std::min(y0, b.y);
        x1 = std::max(x1, b.x);
        y1 = std::max(y1, b.y);
      }
  return ColorSelection{ProjectionMode::SaturationHue,
                        BinRect{std::max(0, x0 - margin), std::max(0, y0 - margin), std::min(grid.width - 1, x1 + margin),
                                std::min(grid.height - 1, y1 + margin)}};
}

}  // namespace testing
