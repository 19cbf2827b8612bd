#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "vectra/raster.hpp"

namespace vectra {

enum class NodeKind {
  Endpoint,  ///< degree 1
  Junction,  ///< degree >= 3
  Isolated,  ///< degree 0
  Anchor,    ///< artificial node holding a closed loop that has no singular pixel
};

const char* node_kind_name(NodeKind kind);
NodeKind parse_node_kind(const std::string& name);

struct Node {
  int id = 0;
  NodeKind kind = NodeKind::Isolated;
  Vec2 pos;
};

using Polyline = std::vector<Vec2>;

struct Arc {
  int id = 0;
  int a = 0;  ///< node at chain.front()
  int b = 0;  ///< node at chain.back(); equal to a for loops
  std::vector<Pixel> chain;
  Polyline polyline;  ///< empty until attach_polylines
  bool repair = false;  ///< contains a connection drawn by gap closure
};

/// Mutable network of singular points (nodes) and the pixel chains (arcs)
/// between them. Ids are stable; iteration is in id order.
class NetGraph {
 public:
  NetGraph() = default;
  NetGraph(int width, int height) : width_(width), height_(height) {}

  /// Raster dimensions the graph was extracted from.
  int width() const { return width_; }
  int height() const { return height_; }

  int add_node(NodeKind kind, Vec2 pos);
  /// Inserts with an explicit id (deserialisation).
  void insert_node(const Node& node);
  /// Adds an arc and puts it in canonical orientation.
  int add_arc(int a, int b, std::vector<Pixel> chain, Polyline polyline = {}, bool repair = false);
  void insert_arc(const Arc& arc);
  void remove_arc(int id);
  /// Removes a node; it must have no incident arcs.
  void remove_node(int id);

  bool has_node(int id) const { return nodes_.count(id) != 0; }
  bool has_arc(int id) const { return arcs_.count(id) != 0; }
  const Node& node(int id) const;
  Node& node(int id);
  const Arc& arc(int id) const;
  Arc& arc(int id);
  const std::map<int, Node>& nodes() const { return nodes_; }
  const std::map<int, Arc>& arcs() const { return arcs_; }

  /// Incident arc ids; a loop arc appears twice.
  const std::vector<int>& incident(int node) const;
  int degree(int node) const { return static_cast<int>(incident(node).size()); }

  /// Re-derives the kind of a node from its degree. A degree-2 node is
  /// dissolved: its two arcs are merged into one (or, if the only arc is a
  /// loop, the node becomes an Anchor). Returns false if the node was removed.
  bool normalize(int node);

  /// Merges the arcs meeting at a degree-2 node and deletes the node.
  /// Returns the id of the merged arc.
  int dissolve(int node);

  /// Puts chain/polyline into canonical orientation: lexicographically
  /// smaller end first; loops run towards the smaller second pixel.
  void canonicalize(int arc);

  /// Node id sets of the connected components, each sorted, in order of
  /// their smallest node id.
  std::vector<std::vector<int>> components() const;

  int next_node_id() const { return next_node_; }
  int next_arc_id() const { return next_arc_; }

  friend bool operator==(const NetGraph& a, const NetGraph& b);

 private:
  int width_ = 0;
  int height_ = 0;
  int next_node_ = 1;
  int next_arc_ = 1;
  std::map<int, Node> nodes_;
  std::map<int, Arc> arcs_;
  std::map<int, std::vector<int>> incidence_;
};

/// Sum of pixel steps (1 orthogonal, sqrt 2 diagonal).
double chain_length(std::span<const Pixel> chain);
double polyline_length(std::span<const Vec2> polyline);
/// Polyline length when attached, chain length otherwise.
double arc_length(const Arc& arc);

/// Builds the graph of a unit-width skeleton.
///
/// Pixels are linked to their 4-neighbours and to diagonal neighbours not
/// already reachable through a shared 4-neighbour; the branch count of a pixel
/// is its number of links. Branch count 0 gives an Isolated node, 1 an
/// Endpoint, 3+ a Junction; runs of 2-branch pixels become arcs. Loops with no
/// singular pixel get an Anchor at their first pixel in raster order.
/// Throws ValidationError if the mask contains a 2x2 foreground square.
NetGraph raster_to_graph(const BinaryMask& skeleton);

/// Paints every arc chain and every node position.
BinaryMask rasterize(const NetGraph& g);

/// Deletes connected components whose total chain length is below min_length.
void remove_short_components(NetGraph& g, double min_length);

/// Removes components shorter than chain_min, then repeatedly removes the
/// shortest open branch (an arc touching an Endpoint) shorter than
/// branch_min, dissolving junctions that drop to degree 2, then re-checks
/// component lengths.
NetGraph prune(NetGraph g, double chain_min, double branch_min);

/// Removes n chain pixels at every Endpoint, never shrinking an arc below 2
/// pixels. Attached polylines are dropped.
NetGraph trim_endpoints(NetGraph g, int n);

/// Iterative end-point fit: splits at the farthest chain point until every
/// point lies within tol of its segment.
Polyline approximate_polygonal(std::span<const Vec2> chain, double tol);
Polyline approximate_polygonal(std::span<const Pixel> chain, double tol);

/// Distance from p to the segment [a, b].
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// Fits a polyline to every arc; end vertices are pinned to the node positions.
NetGraph attach_polylines(NetGraph g, double tol);

}  // namespace vectra
