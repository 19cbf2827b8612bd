#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "vectra/error.hpp"

namespace vectra {

/// Integer pixel position; x is the column, y the row (row 0 at the top).
struct Pixel {
  int x = 0;
  int y = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

/// Sub-pixel capable 2D point in raster coordinates.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}
  explicit Vec2(Pixel p) : x(p.x), y(p.y) {}

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Dense row-major 2D grid.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height) {
    if (width < 0 || height < 0) throw ValidationError("negative grid dimensions");
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  bool contains(Pixel p) const { return contains(p.x, p.y); }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](Pixel p) { return data_[index(p.x, p.y)]; }
  const T& operator[](Pixel p) const { return data_[index(p.x, p.y)]; }

  /// Out-of-range reads return `outside`.
  T at_or(int x, int y, T outside) const { return contains(x, y) ? (*this)(x, y) : outside; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

struct Rgb8 {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb8&, const Rgb8&) = default;
};

using RgbImage = Grid<Rgb8>;

/// Foreground flag per pixel (0 or 1).
using BinaryMask = Grid<std::uint8_t>;

inline std::size_t count_foreground(const BinaryMask& m) {
  std::size_t n = 0;
  for (auto v : m.data()) n += v != 0;
  return n;
}

/// True when every foreground pixel of `sub` is also foreground in `super`.
inline bool is_subset(const BinaryMask& sub, const BinaryMask& super) {
  if (sub.width() != super.width() || sub.height() != super.height()) return false;
  for (std::size_t i = 0; i < sub.size(); ++i)
    if (sub.data()[i] && !super.data()[i]) return false;
  return true;
}

// Neighbour offsets, counter-clockwise starting east (y grows downwards, so
// "north" is dy = -1).
inline constexpr int kDx8[8] = {1, 1, 0, -1, -1, -1, 0, 1};
inline constexpr int kDy8[8] = {0, -1, -1, -1, 0, 1, 1, 1};
inline constexpr int kDx4[4] = {1, 0, -1, 0};
inline constexpr int kDy4[4] = {0, -1, 0, 1};

}  // namespace vectra
