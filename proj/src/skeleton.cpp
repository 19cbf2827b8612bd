#include "vectra/skeleton.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <vector>

namespace vectra {

DistanceMap chamfer_distance(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  constexpr int inf = std::numeric_limits<int>::max() / 4;
  DistanceMap d(w, h, 0);
  for (std::size_t k = 0; k < mask.size(); ++k) d.data()[k] = mask.data()[k] ? inf : 0;

  auto val = [&](int x, int y) { return d.at_or(x, y, 0); };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!mask(x, y)) continue;
      int v = d(x, y);
      v = std::min(v, val(x - 1, y) + kChamferOrthogonal);
      v = std::min(v, val(x - 1, y - 1) + kChamferDiagonal);
      v = std::min(v, val(x, y - 1) + kChamferOrthogonal);
      v = std::min(v, val(x + 1, y - 1) + kChamferDiagonal);
      d(x, y) = v;
    }
  for (int y = h - 1; y >= 0; --y)
    for (int x = w - 1; x >= 0; --x) {
      if (!mask(x, y)) continue;
      int v = d(x, y);
      v = std::min(v, val(x + 1, y) + kChamferOrthogonal);
      v = std::min(v, val(x + 1, y + 1) + kChamferDiagonal);
      v = std::min(v, val(x, y + 1) + kChamferOrthogonal);
      v = std::min(v, val(x - 1, y + 1) + kChamferDiagonal);
      d(x, y) = v;
    }
  return d;
}

int neighbour_count(const BinaryMask& mask, int x, int y) {
  int n = 0;
  for (int k = 0; k < 8; ++k) n += mask.at_or(x + kDx8[k], y + kDy8[k], 0) != 0;
  return n;
}

int connectivity_number(const BinaryMask& mask, int x, int y) {
  int c[8];
  for (int k = 0; k < 8; ++k) c[k] = mask.at_or(x + kDx8[k], y + kDy8[k], 0) ? 0 : 1;
  int n = 0;
  for (int k = 0; k < 8; k += 2) n += c[k] - c[k] * c[(k + 1) % 8] * c[(k + 2) % 8];
  return n;
}

std::optional<Pixel> find_square(const BinaryMask& mask) {
  for (int y = 0; y + 1 < mask.height(); ++y)
    for (int x = 0; x + 1 < mask.width(); ++x)
      if (mask(x, y) && mask(x + 1, y) && mask(x, y + 1) && mask(x + 1, y + 1)) return Pixel{x, y};
  return std::nullopt;
}

BinaryMask ridge_pixels(const DistanceMap& dist) {
  BinaryMask ridge(dist.width(), dist.height());
  for (int y = 0; y < dist.height(); ++y) {
    for (int x = 0; x < dist.width(); ++x) {
      const int v = dist(x, y);
      if (v == 0) continue;
      // Labels 3 and 6 describe the same discs as 1 and 5.
      const int eff = v == 3 ? 1 : v == 6 ? 5 : v;
      bool maximal = true;
      bool higher[8];
      for (int k = 0; k < 8; ++k) {
        const int q = dist.at_or(x + kDx8[k], y + kDy8[k], 0);
        const int step = (k % 2 == 0) ? kChamferOrthogonal : kChamferDiagonal;
        if (q >= eff + step) maximal = false;
        higher[k] = q > v;
      }
      int runs = 0;
      for (int k = 0; k < 8; ++k) runs += higher[k] && !higher[(k + 7) % 8];
      if (maximal || runs >= 2) ridge(x, y) = 1;
    }
  }
  return ridge;
}

BinaryMask skeletonize(const BinaryMask& mask) {
  const auto dist = chamfer_distance(mask);
  const auto ridge = ridge_pixels(dist);

  std::map<int, std::vector<Pixel>> levels;
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      if (mask(x, y) && !ridge(x, y)) levels[dist(x, y)].push_back({x, y});

  BinaryMask out = mask;
  for (auto& [level, pixels] : levels) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& p : pixels) {
        if (!out[p]) continue;
        if (connectivity_number(out, p.x, p.y) == 1) {
          out[p] = 0;
          changed = true;
        }
      }
    }
  }
  return out;
}

namespace {

// One sweep of both sub-iterations; returns true if anything was deleted.
bool thin_sweep(BinaryMask& out) {
  bool changed = false;
  for (int pass = 0; pass < 2; ++pass)
    for (int y = 0; y < out.height(); ++y)
      for (int x = 0; x < out.width(); ++x) {
        if (!out(x, y)) continue;
        const bool north = !out.at_or(x, y - 1, 0);
        const bool east = !out.at_or(x + 1, y, 0);
        const bool south = !out.at_or(x, y + 1, 0);
        const bool west = !out.at_or(x - 1, y, 0);
        const bool border = pass == 0 ? (north || east) : (south || west);
        if (!border) continue;
        if (neighbour_count(out, x, y) < 2) continue;
        if (connectivity_number(out, x, y) != 1) continue;
        out(x, y) = 0;
        changed = true;
      }
  return changed;
}

bool square_at(const BinaryMask& m, int x, int y) {
  return m.at_or(x, y, 0) && m.at_or(x + 1, y, 0) && m.at_or(x, y + 1, 0) && m.at_or(x + 1, y + 1, 0);
}

bool touches_square(const BinaryMask& m, Pixel p) {
  for (int dy = -1; dy <= 0; ++dy)
    for (int dx = -1; dx <= 0; ++dx)
      if (square_at(m, p.x + dx, p.y + dy)) return true;
  return false;
}

// Moves one corner of the square at (x, y) to an outside neighbour when both
// the insertion and the deletion are simple. Returns false if no move exists.
bool shift_corner(BinaryMask& out, int x, int y, const BinaryMask* allowed) {
  const Pixel corners[4] = {{x, y}, {x + 1, y}, {x, y + 1}, {x + 1, y + 1}};
  for (const auto& p : corners)
    for (int k = 0; k < 8; ++k) {
      const Pixel q{p.x + kDx8[k], p.y + kDy8[k]};
      if (!out.contains(q) || out[q]) continue;
      if (allowed && !(*allowed)[q]) continue;
      if (connectivity_number(out, q.x, q.y) != 1) continue;
      out[q] = 1;
      if (connectivity_number(out, p.x, p.y) == 1) {
        out[p] = 0;
        if (!touches_square(out, q) && !touches_square(out, p)) return true;
        out[p] = 1;
      }
      out[q] = 0;
    }
  return false;
}

}  // namespace

BinaryMask thin(const BinaryMask& mask, const BinaryMask* allowed) {
  BinaryMask out = mask;
  while (thin_sweep(out)) {
  }
  // Squares whose four pixels are all needed for connectivity.
  std::vector<Pixel> stuck;
  for (;;) {
    bool moved = false;
    for (int y = 0; y + 1 < out.height() && !moved; ++y)
      for (int x = 0; x + 1 < out.width() && !moved; ++x)
        if (square_at(out, x, y) && std::find(stuck.begin(), stuck.end(), Pixel{x, y}) == stuck.end()) {
          if (shift_corner(out, x, y, allowed)) moved = true;
          else stuck.push_back({x, y});
        }
    if (!moved) break;
    while (thin_sweep(out)) {
    }
  }
  return out;
}

}  // namespace vectra
