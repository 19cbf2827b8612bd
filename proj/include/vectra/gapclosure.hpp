#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vectra/lineargraph.hpp"

namespace vectra {

/// Thresholds for proposing, filtering and drawing endpoint connections.
/// Lengths are in pixels, angles in radians.
struct ConnectionParams {
  double max_cost = 30.0;             ///< connections must cost less than this
  double min_segment_length = 2.0;    ///< final segments must be longer than this
  double angle_min = 0.6;             ///< the better-aligned side must be below this
  double angle_max = 1.6;             ///< the worse-aligned side must be below this
  double ratio_lo = 0.0;              ///< bounds on gap distance / final segment length
  double ratio_hi = 10.0;
  double cycle_min_length = 20.0;     ///< reject if the endpoints are already joined by less
  double elongation_max = 10.0;       ///< reject if in-graph path / gap exceeds this
  double isolated_cost_max = 10.0;    ///< longest extension for leftover endpoints
  double collinear_tolerance = 0.15;  ///< both angles below this: draw a straight join
  double angle_weight = 1.0;          ///< weight of the angular penalty in the cost

  /// Throws ValidationError on inconsistent values.
  void validate() const;

  friend bool operator==(const ConnectionParams&, const ConnectionParams&) = default;
};

struct EndpointGeometry {
  double distance = 0.0;
  double phi1 = 0.0;
  double phi2 = 0.0;
  double len1 = 0.0;
  double len2 = 0.0;
};

struct ConnectionCandidate {
  int e1 = 0;  ///< smaller node id
  int e2 = 0;
  EndpointGeometry geometry;
  double cost = 0.0;
};

/// Last polyline segment of the arc ending at an Endpoint node.
struct FinalSegment {
  Vec2 tip;        ///< endpoint position
  Vec2 direction;  ///< unit vector pointing out of the arc
  double length = 0.0;
  int arc = 0;
};

/// Throws ValidationError if `endpoint` is not an Endpoint with a polyline.
FinalSegment final_segment(const NetGraph& g, int endpoint);

/// Gap distance, angles between each final segment's outward direction and
/// the connecting segment, and the final segment lengths.
EndpointGeometry endpoint_geometry(const NetGraph& g, int e1, int e2);

/// D * (1 + k * (phi1 + phi2) / pi).
double connection_cost(double distance, double phi1, double phi2, double angle_weight);

/// The five acceptance tests for a proposed connection.
bool is_connectable(const EndpointGeometry& geo, double cost, const ConnectionParams& p);

/// Every endpoint pair passing is_connectable, sorted by (e1, e2). Pairs are
/// gathered from a uniform grid with cell size max_cost.
std::vector<ConnectionCandidate> candidate_connections(const NetGraph& g, const ConnectionParams& p);

/// Dijkstra over arcs weighted by their geometric length.
std::optional<double> shortest_path_length(const NetGraph& g, int a, int b);

enum class InhibitReason { Intersection, ShortCycle, ElongatedCycle };

struct RejectedCandidate {
  ConnectionCandidate candidate;
  InhibitReason reason;
};

/// Does the open segment (p, q) meet any arc polyline away from its two ends?
bool crosses_network(const NetGraph& g, Vec2 p, Vec2 q);

/// Drops candidates whose segment crosses the network or that would close a
/// cycle shorter than cycle_min_length or with path / gap > elongation_max.
std::vector<ConnectionCandidate> inhibit(const NetGraph& g, const std::vector<ConnectionCandidate>& candidates,
                                         const ConnectionParams& p,
                                         std::vector<RejectedCandidate>* rejected = nullptr);

struct MultiwayGroups {
  std::vector<std::vector<int>> groups;     ///< cliques of 3 or more endpoints, each sorted
  std::vector<std::pair<int, int>> pairs;   ///< cliques of two
  std::vector<int> leftovers;               ///< single vertices left after extraction
};

/// Splits the candidate graph into components (breadth-first), then
/// repeatedly removes the largest clique of each component; ties go to the
/// lexicographically smallest sorted vertex set.
MultiwayGroups find_multiway_groups(const std::vector<ConnectionCandidate>& candidates);

/// Intersection of the forward rays p1 + t d1 and p2 + s d2 (t, s > 0).
std::optional<Vec2> ray_intersection(Vec2 p1, Vec2 d1, Vec2 p2, Vec2 d2);

/// 8-connected digital line through the rounded polyline vertices.
std::vector<Pixel> rasterize_polyline(const Polyline& poly);

/// Joins two endpoints: straight when both final segments are aligned with
/// the gap within collinear_tolerance, otherwise through the intersection of
/// the extended final segments (straight if they do not meet ahead). The
/// endpoints are dissolved into a continuous arc.
void draw_pair(NetGraph& g, int e1, int e2, double collinear_tolerance);

/// Joins three or more endpoints at the barycentre of the pairwise
/// intersections of their extended final segments (of the endpoints
/// themselves if no pair intersects). Returns the new Junction id.
int draw_multiway(NetGraph& g, const std::vector<int>& group);

struct IsolatedConnection {
  int endpoint = 0;
  Vec2 hit;
  double extension = 0.0;
};

/// Extends each remaining endpoint along its final segment and joins it to
/// the first arc hit closer than isolated_cost_max, splitting that arc.
std::vector<IsolatedConnection> connect_isolated(NetGraph& g, const ConnectionParams& p);

struct GapClosureReport {
  std::vector<ConnectionCandidate> candidates;
  std::vector<RejectedCandidate> rejected;
  MultiwayGroups groups;
  std::vector<IsolatedConnection> isolated;
};

/// Candidates, inhibition, multiway grouping, drawing, then isolated endpoints.
NetGraph close_gaps(NetGraph g, const ConnectionParams& p, GapClosureReport* report = nullptr);

nlohmann::json to_json(const GapClosureReport& report);

}  // namespace vectra
