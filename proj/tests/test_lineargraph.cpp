#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"
#include "vectra/gapclosure.hpp"
#include "vectra/lineargraph.hpp"
#include "vectra/skeleton.hpp"

using namespace vectra;
using testing::mask_from;

namespace {

int count_kind(const NetGraph& g, NodeKind kind) {
  int n = 0;
  for (const auto& [id, node] : g.nodes()) n += node.kind == kind;
  return n;
}

std::vector<Pixel> straight_chain(int x0, int x1, int y) {
  std::vector<Pixel> c;
  for (int x = x0; x <= x1; ++x) c.push_back({x, y});
  return c;
}

NetGraph single_segment(int length) {
  NetGraph g(64, 8);
  const int a = g.add_node(NodeKind::Endpoint, {1, 2});
  const int b = g.add_node(NodeKind::Endpoint, {double(length), 2});
  g.add_arc(a, b, straight_chain(1, length, 2));
  return g;
}

std::vector<Vec2> quarter_circle(double r) {
  std::vector<Vec2> pts;
  for (const auto& p : rasterize_polyline([&] {
         Polyline poly;
         for (int k = 0; k <= 400; ++k) {
           const double t = k * std::numbers::pi / 800;
           poly.push_back({std::round(r * std::cos(t)), std::round(r * std::sin(t))});
         }
         return poly;
       }()))
    if (pts.empty() || !(Vec2(p) == pts.back())) pts.push_back(Vec2(p));
  return pts;
}

double max_deviation(const std::vector<Vec2>& chain, const Polyline& poly) {
  double worst = 0;
  for (const auto& p : chain) worst = std::max(worst, testing::point_polyline_distance(p, poly));
  return worst;
}

}  // namespace

TEST_CASE("raster_to_graph fixtures") {
  SUBCASE("straight line") {
    const auto g = raster_to_graph(mask_from({"......", ".####.", "......"}));
    CHECK(g.nodes().size() == 2);
    CHECK(count_kind(g, NodeKind::Endpoint) == 2);
    REQUIRE(g.arcs().size() == 1);
    const auto& arc = g.arcs().begin()->second;
    CHECK(arc.chain.size() == 4);
    CHECK(arc.chain.front() == Pixel{1, 1});
    CHECK(arc.chain.back() == Pixel{4, 1});
    CHECK(chain_length(arc.chain) == 3.0);
  }
  SUBCASE("isolated pixel") {
    const auto g = raster_to_graph(mask_from({"...", ".#.", "..."}));
    CHECK(g.nodes().size() == 1);
    CHECK(count_kind(g, NodeKind::Isolated) == 1);
    CHECK(g.arcs().empty());
  }
  SUBCASE("T junction") {
    const auto g = raster_to_graph(mask_from({".......", ".#####.", "...#...", "...#...", "......."}));
    CHECK(count_kind(g, NodeKind::Junction) == 1);
    CHECK(count_kind(g, NodeKind::Endpoint) == 3);
    CHECK(g.arcs().size() == 3);
    for (const auto& [id, node] : g.nodes())
      if (node.kind == NodeKind::Junction) CHECK(node.pos == Vec2(3, 1));
  }
  SUBCASE("diagonal staircase is one arc") {
    const auto g = raster_to_graph(mask_from({"#....", ".#...", ".##..", "...#.", "....#"}));
    CHECK(count_kind(g, NodeKind::Endpoint) == 2);
    CHECK(count_kind(g, NodeKind::Junction) == 0);
    CHECK(g.arcs().size() == 1);
  }
  SUBCASE("closed loop gets an anchor") {
    const auto g = raster_to_graph(mask_from({".....", ".###.", ".#.#.", ".###.", "....."}));
    REQUIRE(g.nodes().size() == 1);
    CHECK(count_kind(g, NodeKind::Anchor) == 1);
    REQUIRE(g.arcs().size() == 1);
    const auto& arc = g.arcs().begin()->second;
    CHECK(arc.a == arc.b);
    CHECK(arc.chain.size() == 9);
    CHECK(arc.chain.front() == arc.chain.back());
    CHECK(g.degree(arc.a) == 2);
  }
  SUBCASE("2x2 square is rejected") {
    CHECK_THROWS_AS(raster_to_graph(mask_from({"##", "##"})), ValidationError);
  }
  SUBCASE("empty mask") {
    const auto g = raster_to_graph(BinaryMask(4, 4));
    CHECK(g.nodes().empty());
    CHECK(g.arcs().empty());
  }
}

TEST_CASE("raster_to_graph and rasterize round trip") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 80; ++trial) {
    const auto sk = thin(skeletonize(testing::random_blobs(rng, 36, 30)));
    const auto g = raster_to_graph(sk);
    CHECK(rasterize(g) == sk);
    for (const auto& [id, arc] : g.arcs()) {
      CHECK(g.node(arc.a).pos == Vec2(arc.chain.front()));
      CHECK(g.node(arc.b).pos == Vec2(arc.chain.back()));
      for (std::size_t k = 1; k < arc.chain.size(); ++k) {
        CHECK(std::abs(arc.chain[k].x - arc.chain[k - 1].x) <= 1);
        CHECK(std::abs(arc.chain[k].y - arc.chain[k - 1].y) <= 1);
      }
    }
    for (const auto& [id, node] : g.nodes()) {
      const int d = g.degree(id);
      switch (node.kind) {
        case NodeKind::Isolated: CHECK(d == 0); break;
        case NodeKind::Endpoint: CHECK(d == 1); break;
        case NodeKind::Junction: CHECK(d >= 3); break;
        case NodeKind::Anchor: CHECK(d == 2); break;
      }
    }
  }
}

TEST_CASE("graph editing") {
  SUBCASE("dissolve merges chains and polylines") {
    NetGraph g(10, 10);
    const int a = g.add_node(NodeKind::Endpoint, {0, 0});
    const int m = g.add_node(NodeKind::Junction, {3, 0});
    const int b = g.add_node(NodeKind::Endpoint, {6, 0});
    g.add_arc(a, m, straight_chain(0, 3, 0), {{0, 0}, {3, 0}});
    g.add_arc(m, b, straight_chain(3, 6, 0), {{3, 0}, {6, 0}}, true);
    CHECK_FALSE(g.normalize(m));
    CHECK_FALSE(g.has_node(m));
    REQUIRE(g.arcs().size() == 1);
    const auto& arc = g.arcs().begin()->second;
    CHECK(arc.chain == straight_chain(0, 6, 0));
    CHECK(arc.polyline == Polyline{{0, 0}, {3, 0}, {6, 0}});
    CHECK(arc.repair);
  }
  SUBCASE("canonical orientation") {
    NetGraph g(10, 10);
    const int a = g.add_node(NodeKind::Endpoint, {5, 0});
    const int b = g.add_node(NodeKind::Endpoint, {1, 0});
    std::vector<Pixel> c = straight_chain(1, 5, 0);
    std::reverse(c.begin(), c.end());
    const int id = g.add_arc(a, b, c);
    CHECK(g.arc(id).chain.front() == Pixel{1, 0});
    CHECK(g.arc(id).a == b);
  }
  SUBCASE("components") {
    NetGraph g(20, 20);
    testing::add_open_arc(g, {{0, 0}, {5, 0}});
    testing::add_open_arc(g, {{0, 5}, {5, 5}});
    g.add_node(NodeKind::Isolated, {9, 9});
    CHECK(g.components().size() == 3);
  }
}

TEST_CASE("prune") {
  SUBCASE("short component removed") {
    CHECK(prune(single_segment(5), 10, 3).nodes().empty());
    CHECK(prune(single_segment(30), 10, 3).arcs().size() == 1);
  }
  SUBCASE("short spur removed and junction dissolved") {
    const auto g = raster_to_graph(mask_from({
        "..........................",
        ".########################.",
        "............#.............",
        "............#.............",
        "..........................",
    }));
    CHECK(g.arcs().size() == 3);
    const auto p = prune(g, 5, 4);
    CHECK(p.arcs().size() == 1);
    CHECK(count_kind(p, NodeKind::Junction) == 0);
    CHECK(p.arcs().begin()->second.chain.size() == 24);
  }
  SUBCASE("isolated node is a short component") {
    NetGraph g(5, 5);
    g.add_node(NodeKind::Isolated, {2, 2});
    CHECK(prune(g, 1, 1).nodes().empty());
  }
  SUBCASE("idempotent") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
      const auto g = raster_to_graph(thin(skeletonize(testing::random_blobs(rng, 48, 40))));
      const auto once = prune(g, 12, 6);
      CHECK(prune(once, 12, 6) == once);
      for (const auto& comp : once.components()) {
        double total = 0;
        for (const auto& [id, arc] : once.arcs())
          if (std::binary_search(comp.begin(), comp.end(), arc.a)) total += chain_length(arc.chain);
        CHECK(total >= 12);
      }
      for (const auto& [id, arc] : once.arcs()) {
        const bool open = once.node(arc.a).kind == NodeKind::Endpoint || once.node(arc.b).kind == NodeKind::Endpoint;
        const bool whole = once.node(arc.a).kind == NodeKind::Endpoint && once.node(arc.b).kind == NodeKind::Endpoint;
        if (open && !whole) CHECK(chain_length(arc.chain) >= 6);
      }
    }
  }
}

TEST_CASE("trim_endpoints") {
  SUBCASE("10 pixels, n = 2") {
    const auto t = trim_endpoints(single_segment(10), 2);
    REQUIRE(t.arcs().size() == 1);
    const auto& arc = t.arcs().begin()->second;
    CHECK(arc.chain == straight_chain(3, 8, 2));
    CHECK(t.node(arc.a).pos == Vec2(3, 2));
    CHECK(t.node(arc.b).pos == Vec2(8, 2));
  }
  SUBCASE("4 pixels, n = 3 keeps 2") {
    const auto t = trim_endpoints(single_segment(4), 3);
    CHECK(t.arcs().begin()->second.chain.size() == 2);
  }
  SUBCASE("n = 0 is the identity") {
    const auto g = single_segment(7);
    CHECK(trim_endpoints(g, 0) == g);
  }
  SUBCASE("junction side untouched") {
    const auto g = raster_to_graph(mask_from({
        "...............",
        ".#############.",
        ".......#.......",
        ".......#.......",
        ".......#.......",
        "...............",
    }));
    const auto t = trim_endpoints(g, 2);
    CHECK(count_foreground(rasterize(t)) == count_foreground(rasterize(g)) - 6);
    CHECK(count_kind(t, NodeKind::Junction) == 1);
  }
}

TEST_CASE("approximate_polygonal") {
  SUBCASE("collinear chain gives two vertices") {
    const auto c = straight_chain(0, 20, 3);
    CHECK(approximate_polygonal(std::span<const Pixel>(c), 0.5) == Polyline{{0, 3}, {20, 3}});
  }
  SUBCASE("L shape keeps the corner") {
    std::vector<Pixel> c = straight_chain(0, 10, 0);
    for (int y = 1; y <= 10; ++y) c.push_back({10, y});
    CHECK(approximate_polygonal(std::span<const Pixel>(c), 1.0) == Polyline{{0, 0}, {10, 0}, {10, 10}});
  }
  SUBCASE("short chains") {
    const std::vector<Vec2> one{{2, 2}};
    CHECK(approximate_polygonal(std::span<const Vec2>(one), 1.0).size() == 1);
    const std::vector<Vec2> two{{2, 2}, {3, 3}};
    CHECK(approximate_polygonal(std::span<const Vec2>(two), 1.0).size() == 2);
  }
  SUBCASE("quarter circle against the oracles") {
    const auto pts = quarter_circle(30);
    std::size_t prev = pts.size() + 1;
    for (double tol : {0.5, 1.0, 2.0, 3.0, 5.0}) {
      const auto poly = approximate_polygonal(std::span<const Vec2>(pts), tol);
      CHECK(max_deviation(pts, poly) <= tol + 1e-12);
      const auto idx = testing::rdp_indices(pts, tol);
      REQUIRE(idx.size() == poly.size());
      for (std::size_t k = 0; k < idx.size(); ++k) CHECK(poly[k] == pts[idx[k]]);
      CHECK(poly.size() >= testing::min_vertices(pts, tol));
      CHECK(poly.size() <= prev);
      prev = poly.size();
    }
  }
  SUBCASE("point_segment_distance") {
    CHECK(point_segment_distance({0, 1}, {-1, 0}, {1, 0}) == 1.0);
    CHECK(point_segment_distance({3, 4}, {0, 0}, {0, 0}) == 5.0);
    CHECK(point_segment_distance({5, 0}, {0, 0}, {2, 0}) == 3.0);
  }
}

TEST_CASE("attach_polylines pins ends to nodes") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = attach_polylines(raster_to_graph(thin(skeletonize(testing::random_blobs(rng, 40, 40)))), 1.5);
    for (const auto& [id, arc] : g.arcs()) {
      REQUIRE(arc.polyline.size() >= 2);
      CHECK(arc.polyline.front() == g.node(arc.a).pos);
      CHECK(arc.polyline.back() == g.node(arc.b).pos);
      std::vector<Vec2> pts;
      for (const auto& p : arc.chain) pts.push_back(Vec2(p));
      CHECK(max_deviation(pts, arc.polyline) <= 1.5 + 1e-12);
      CHECK(arc_length(arc) == doctest::Approx(polyline_length(arc.polyline)));
    }
  }
}
