#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vectra/colorspace.hpp"
#include "vectra/histogram.hpp"
#include "vectra/lineargraph.hpp"
#include "vectra/raster.hpp"

namespace testing {

using vectra::BinaryMask;
using vectra::NetGraph;
using vectra::Pixel;
using vectra::Polyline;
using vectra::RgbImage;
using vectra::Vec2;

// '#' or '1' marks foreground.
BinaryMask mask_from(const std::vector<std::string>& rows);
std::vector<std::string> rows_of(const BinaryMask& mask);

BinaryMask random_mask(std::mt19937& rng, int w, int h, double density);
// Union of random discs and thick strokes.
BinaryMask random_blobs(std::mt19937& rng, int w, int h);
RgbImage random_image(std::mt19937& rng, int w, int h, int palette);

// Adds an open arc with two Endpoint nodes, chain rasterised from the polyline.
int add_open_arc(NetGraph& g, const Polyline& poly);

// --- oracles ---

// Recursive flood fill; labels numbered in raster order of first pixel.
vectra::Grid<int> flood_fill_labels(const BinaryMask& mask, bool foreground, bool eight);

// Multi-source Dijkstra from every background pixel and from the ring of
// pixels just outside the image, weights 3 and 4.
vectra::Grid<int> dijkstra_chamfer(const BinaryMask& mask);

// Independent stack-based iterative end-point fit.
std::vector<std::size_t> rdp_indices(const std::vector<Vec2>& pts, double tol);
// Minimum number of vertices of any polyline with vertices on the chain whose
// segments stay within tol of the skipped chain points.
std::size_t min_vertices(const std::vector<Vec2>& pts, double tol);

// Largest clique by exhaustive subset search; ties to the lexicographically
// smallest sorted set.
std::vector<int> brute_max_clique(const std::vector<int>& vertices, const std::vector<std::pair<int, int>>& edges);

struct DxfPolyline {
  std::string layer;
  std::vector<Vec2> vertices;
};
struct DxfFile {
  std::vector<std::string> sections;
  std::string version;
  std::vector<std::string> layers;
  std::vector<int> layer_colors;
  std::vector<DxfPolyline> polylines;
};
// Throws std::runtime_error on malformed input.
DxfFile parse_dxf(const std::string& text);

double point_polyline_distance(Vec2 p, const Polyline& poly);

// --- gap closure fixtures ---

// Four endpoints whose surviving candidate edges are 1-2, 1-3, 2-3 and 2-4.
// Endpoints 1, 2 and 3 aim at (100, 100); endpoint 4 points at the arc that
// endpoint 3 belongs to, 5 pixels away.
struct Fig11Fixture {
  NetGraph graph;
  int e[5] = {0, 0, 0, 0, 0};  // e[1]..e[4]
};
Fig11Fixture make_fig11();

// One arc whose two facing endpoints are 3 pixels apart and joined in the
// graph by a path of length 19.
NetGraph short_cycle_fixture();
// U-shaped arc: endpoints 6 pixels apart, in-graph path of length 90.
NetGraph elongated_cycle_fixture();

// Node id at exactly `pos`, or 0.
int node_at(const NetGraph& g, Vec2 pos);

// --- synthetic map ---

struct RiverMap {
  RgbImage image;
  std::vector<Vec2> truth;     // dense samples of the river centre line
  std::vector<int> break_xs;   // x of each grey line crossing the river
  vectra::Rgb8 river_color;
};

// Blue sinusoid over white, broken by `breaks` vertical grey lines, with
// horizontal grey lines that stay clear of the river.
RiverMap make_river_map(int size, int breaks, std::uint32_t seed);

// Saturation-hue rectangle covering every colour within +-jitter per channel.
vectra::ColorSelection selection_around(vectra::Rgb8 color, int jitter, int margin);

}  // namespace testing
