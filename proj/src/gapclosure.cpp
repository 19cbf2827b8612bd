#include "vectra/gapclosure.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numbers>
#include <queue>
#include <set>

#include <nlohmann/json.hpp>

namespace vectra {

namespace {

constexpr double kEps = 1e-9;

Pixel round_pixel(Vec2 p) { return {static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y))}; }

double angle_between(Vec2 u, Vec2 v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::acos(std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0));
}

}  // namespace

void ConnectionParams::validate() const {
  if (!(0.0 <= angle_min && angle_min <= angle_max && angle_max <= std::numbers::pi))
    throw ValidationError("connection angles must satisfy 0 <= angle_min <= angle_max <= pi");
  if (!(max_cost > 0 && cycle_min_length > 0 && elongation_max > 0 && isolated_cost_max > 0))
    throw ValidationError("connection lengths must be positive");
  if (min_segment_length < 0 || collinear_tolerance < 0 || angle_weight < 0)
    throw ValidationError("connection parameters must be non-negative");
  if (ratio_lo > ratio_hi) throw ValidationError("ratio_lo must not exceed ratio_hi");
}

FinalSegment final_segment(const NetGraph& g, int endpoint) {
  const auto& n = g.node(endpoint);
  if (n.kind != NodeKind::Endpoint)
    throw ValidationError("node " + std::to_string(endpoint) + " is not an endpoint");
  const int arc_id = g.incident(endpoint).front();
  const auto& arc = g.arc(arc_id);
  if (arc.polyline.size() < 2) throw ValidationError("arc " + std::to_string(arc_id) + " has no polyline");
  const bool at_front = arc.a == endpoint;
  const Vec2 tip = at_front ? arc.polyline.front() : arc.polyline.back();
  const Vec2 prev = at_front ? arc.polyline[1] : arc.polyline[arc.polyline.size() - 2];
  FinalSegment fs;
  fs.tip = tip;
  fs.length = distance(tip, prev);
  fs.direction = fs.length > 0 ? (tip - prev) * (1.0 / fs.length) : Vec2{};
  fs.arc = arc_id;
  return fs;
}

EndpointGeometry endpoint_geometry(const NetGraph& g, int e1, int e2) {
  const auto s1 = final_segment(g, e1);
  const auto s2 = final_segment(g, e2);
  const Vec2 gap = s2.tip - s1.tip;
  EndpointGeometry geo;
  geo.distance = gap.norm();
  geo.phi1 = angle_between(s1.direction, gap);
  geo.phi2 = angle_between(s2.direction, gap * -1.0);
  geo.len1 = s1.length;
  geo.len2 = s2.length;
  return geo;
}

double connection_cost(double distance, double phi1, double phi2, double angle_weight) {
  return distance * (1.0 + angle_weight * (phi1 + phi2) / std::numbers::pi);
}

bool is_connectable(const EndpointGeometry& geo, double cost, const ConnectionParams& p) {
  if (!(cost < p.max_cost)) return false;
  if (!(geo.len1 > p.min_segment_length && geo.len2 > p.min_segment_length)) return false;
  if (!(std::min(geo.phi1, geo.phi2) < p.angle_min)) return false;
  if (!(std::max(geo.phi1, geo.phi2) < p.angle_max)) return false;
  for (double len : {geo.len1, geo.len2}) {
    const double ratio = geo.distance / len;
    if (ratio < p.ratio_lo || ratio > p.ratio_hi) return false;
  }
  return true;
}

std::vector<ConnectionCandidate> candidate_connections(const NetGraph& g, const ConnectionParams& p) {
  p.validate();
  std::vector<int> ends;
  for (const auto& [id, n] : g.nodes())
    if (n.kind == NodeKind::Endpoint) ends.push_back(id);

  const double cell = p.max_cost;
  auto cell_of = [&](Vec2 v) {
    return std::pair<long long, long long>{static_cast<long long>(std::floor(v.x / cell)),
                                           static_cast<long long>(std::floor(v.y / cell))};
  };
  std::map<std::pair<long long, long long>, std::vector<int>> grid;
  for (int e : ends) grid[cell_of(g.node(e).pos)].push_back(e);

  std::vector<ConnectionCandidate> out;
  for (int e1 : ends) {
    const Vec2 p1 = g.node(e1).pos;
    const auto [cx, cy] = cell_of(p1);
    for (long long dy = -1; dy <= 1; ++dy)
      for (long long dx = -1; dx <= 1; ++dx) {
        const auto it = grid.find({cx + dx, cy + dy});
        if (it == grid.end()) continue;
        for (int e2 : it->second) {
          if (e2 <= e1) continue;
          if (distance(p1, g.node(e2).pos) >= p.max_cost) continue;
          ConnectionCandidate c;
          c.e1 = e1;
          c.e2 = e2;
          c.geometry = endpoint_geometry(g, e1, e2);
          c.cost = connection_cost(c.geometry.distance, c.geometry.phi1, c.geometry.phi2, p.angle_weight);
          if (is_connectable(c.geometry, c.cost, p)) out.push_back(c);
        }
      }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::pair(a.e1, a.e2) < std::pair(b.e1, b.e2);
  });
  return out;
}

std::optional<double> shortest_path_length(const NetGraph& g, int a, int b) {
  if (!g.has_node(a) || !g.has_node(b)) throw ValidationError("shortest_path_length: unknown node");
  if (a == b) return 0.0;
  std::map<int, double> dist;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[a] = 0.0;
  queue.emplace(0.0, a);
  while (!queue.empty()) {
    const auto [d, n] = queue.top();
    queue.pop();
    if (d > dist[n]) continue;
    if (n == b) return d;
    for (int arc_id : g.incident(n)) {
      const auto& arc = g.arc(arc_id);
      const int m = arc.a == n ? arc.b : arc.a;
      const double nd = d + arc_length(arc);
      const auto it = dist.find(m);
      if (it == dist.end() || nd < it->second) {
        dist[m] = nd;
        queue.emplace(nd, m);
      }
    }
  }
  return std::nullopt;
}

namespace {

// Parameter t along [p, q] where it meets [r, s], or nullopt. Collinear
// overlaps report the first overlapping parameter.
std::optional<double> segment_hit(Vec2 p, Vec2 q, Vec2 r, Vec2 s) {
  const Vec2 d = q - p;
  const Vec2 e = s - r;
  const double denom = d.cross(e);
  const Vec2 rp = r - p;
  const double scale = std::max({d.norm(), e.norm(), 1.0});
  if (std::abs(denom) < kEps * scale * scale) {
    if (std::abs(rp.cross(d)) > kEps * scale * scale) return std::nullopt;  // parallel, apart
    const double dd = d.dot(d);
    if (dd == 0.0) return std::nullopt;
    double t0 = rp.dot(d) / dd;
    double t1 = (s - p).dot(d) / dd;
    if (t0 > t1) std::swap(t0, t1);
    if (t1 < 0.0 || t0 > 1.0) return std::nullopt;
    return std::max(t0, 0.0);
  }
  const double t = rp.cross(e) / denom;
  const double u = rp.cross(d) / denom;
  if (t < -kEps || t > 1.0 + kEps || u < -kEps || u > 1.0 + kEps) return std::nullopt;
  return t;
}

}  // namespace

bool crosses_network(const NetGraph& g, Vec2 p, Vec2 q) {
  const double len = distance(p, q);
  if (len == 0.0) return false;
  const double margin = 1e-6 / len;
  for (const auto& [id, arc] : g.arcs()) {
    const auto& poly = arc.polyline;
    for (std::size_t i = 1; i < poly.size(); ++i) {
      const Vec2 r = poly[i - 1];
      const Vec2 s = poly[i];
      // Touching only at p or q (e.g. the endpoint's own arc) is allowed.
      auto t = segment_hit(p, q, r, s);
      if (!t) continue;
      if (*t > margin && *t < 1.0 - margin) return true;
      // A collinear overlap starting at an end may still run into the interior.
      if (std::abs((q - p).cross(s - r)) < kEps) {
        const double dd = (q - p).dot(q - p);
        const double t0 = (r - p).dot(q - p) / dd;
        const double t1 = (s - p).dot(q - p) / dd;
        if (std::max(t0, t1) > margin && std::min(t0, t1) < 1.0 - margin &&
            std::abs((r - p).cross(q - p)) < kEps * std::max(1.0, dd))
          return true;
      }
    }
  }
  return false;
}

std::vector<ConnectionCandidate> inhibit(const NetGraph& g, const std::vector<ConnectionCandidate>& candidates,
                                         const ConnectionParams& p, std::vector<RejectedCandidate>* rejected) {
  std::vector<ConnectionCandidate> kept;
  for (const auto& c : candidates) {
    std::optional<InhibitReason> reason;
    if (crosses_network(g, g.node(c.e1).pos, g.node(c.e2).pos)) {
      reason = InhibitReason::Intersection;
    } else if (const auto path = shortest_path_length(g, c.e1, c.e2)) {
      if (*path < p.cycle_min_length) reason = InhibitReason::ShortCycle;
      else if (c.geometry.distance <= 0.0 || *path / c.geometry.distance > p.elongation_max)
        reason = InhibitReason::ElongatedCycle;
    }
    if (reason) {
      if (rejected) rejected->push_back({c, *reason});
    } else {
      kept.push_back(c);
    }
  }
  return kept;
}

namespace {

using Adjacency = std::map<int, std::set<int>>;

void bron_kerbosch(const Adjacency& adj, std::vector<int>& r, std::set<int> p, std::set<int> x,
                   std::vector<int>& best) {
  if (p.empty() && x.empty()) {
    auto sorted = r;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.size() > best.size() || (sorted.size() == best.size() && sorted < best)) best = sorted;
    return;
  }
  if (r.size() + p.size() < best.size()) return;
  // Pivot on the vertex with most neighbours in p.
  int pivot = p.empty() ? *x.begin() : *p.begin();
  std::size_t most = 0;
  for (const auto& s : {p, x})
    for (int u : s) {
      std::size_t k = 0;
      for (int v : adj.at(u)) k += p.count(v);
      if (k > most) {
        most = k;
        pivot = u;
      }
    }
  std::vector<int> branch;
  for (int v : p)
    if (!adj.at(pivot).count(v)) branch.push_back(v);
  for (int v : branch) {
    std::set<int> np, nx;
    for (int u : adj.at(v)) {
      if (p.count(u)) np.insert(u);
      if (x.count(u)) nx.insert(u);
    }
    r.push_back(v);
    bron_kerbosch(adj, r, np, nx, best);
    r.pop_back();
    p.erase(v);
    x.insert(v);
  }
}

}  // namespace

MultiwayGroups find_multiway_groups(const std::vector<ConnectionCandidate>& candidates) {
  Adjacency adj;
  for (const auto& c : candidates) {
    if (c.e1 == c.e2) continue;
    adj[c.e1].insert(c.e2);
    adj[c.e2].insert(c.e1);
  }

  MultiwayGroups out;
  std::set<int> seen;
  for (const auto& [start, _] : adj) {
    if (seen.count(start)) continue;
    std::set<int> component;
    std::deque<int> queue{start};
    seen.insert(start);
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      component.insert(v);
      for (int u : adj[v])
        if (seen.insert(u).second) queue.push_back(u);
    }

    while (!component.empty()) {
      Adjacency sub;
      for (int v : component) {
        auto& s = sub[v];
        for (int u : adj[v])
          if (component.count(u)) s.insert(u);
      }
      std::vector<int> r;
      std::vector<int> best;
      bron_kerbosch(sub, r, component, {}, best);
      for (int v : best) component.erase(v);
      if (best.size() >= 3) out.groups.push_back(best);
      else if (best.size() == 2) out.pairs.emplace_back(best[0], best[1]);
      else out.leftovers.push_back(best.front());
    }
  }
  return out;
}

std::optional<Vec2> ray_intersection(Vec2 p1, Vec2 d1, Vec2 p2, Vec2 d2) {
  const double denom = d1.cross(d2);
  if (std::abs(denom) < kEps * std::max(1.0, d1.norm() * d2.norm())) return std::nullopt;
  const Vec2 w = p2 - p1;
  const double t = w.cross(d2) / denom;
  const double s = w.cross(d1) / denom;
  if (t <= 0.0 || s <= 0.0) return std::nullopt;
  return p1 + d1 * t;
}

std::vector<Pixel> rasterize_polyline(const Polyline& poly) {
  std::vector<Pixel> out;
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    Pixel a = round_pixel(poly[i]);
    const Pixel b = round_pixel(poly[i + 1]);
    const int dx = std::abs(b.x - a.x);
    const int dy = -std::abs(b.y - a.y);
    const int sx = a.x < b.x ? 1 : -1;
    const int sy = a.y < b.y ? 1 : -1;
    int err = dx + dy;
    for (;;) {
      if (out.empty() || !(out.back() == a)) out.push_back(a);
      if (a == b) break;
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        a.x += sx;
      }
      if (e2 <= dx) {
        err += dx;
        a.y += sy;
      }
    }
  }
  if (out.empty() && !poly.empty()) out.push_back(round_pixel(poly.front()));
  return out;
}

namespace {

void add_repair_arc(NetGraph& g, int from, int to, Polyline poly) {
  // Drop repeated vertices (e.g. a corner that coincides with an endpoint).
  Polyline clean;
  for (const auto& v : poly)
    if (clean.empty() || distance(clean.back(), v) > kEps) clean.push_back(v);
  if (clean.size() == 1) clean.push_back(clean.front());
  auto chain = rasterize_polyline(clean);
  g.add_arc(from, to, std::move(chain), std::move(clean), true);
}

}  // namespace

void draw_pair(NetGraph& g, int e1, int e2, double collinear_tolerance) {
  const auto s1 = final_segment(g, e1);
  const auto s2 = final_segment(g, e2);
  const auto geo = endpoint_geometry(g, e1, e2);
  Polyline poly{s1.tip, s2.tip};
  if (!(geo.phi1 <= collinear_tolerance && geo.phi2 <= collinear_tolerance)) {
    if (const auto corner = ray_intersection(s1.tip, s1.direction, s2.tip, s2.direction))
      poly = {s1.tip, *corner, s2.tip};
  }
  add_repair_arc(g, e1, e2, std::move(poly));
  if (g.has_node(e1)) g.normalize(e1);
  if (g.has_node(e2)) g.normalize(e2);
}

int draw_multiway(NetGraph& g, const std::vector<int>& group) {
  if (group.size() < 3) throw ValidationError("draw_multiway needs at least three endpoints");
  std::vector<FinalSegment> segs;
  for (int e : group) segs.push_back(final_segment(g, e));

  Vec2 sum;
  int hits = 0;
  for (std::size_t i = 0; i < segs.size(); ++i)
    for (std::size_t j = i + 1; j < segs.size(); ++j)
      if (const auto x = ray_intersection(segs[i].tip, segs[i].direction, segs[j].tip, segs[j].direction)) {
        sum = sum + *x;
        ++hits;
      }
  if (hits == 0) {
    for (const auto& s : segs) sum = sum + s.tip;
    hits = static_cast<int>(segs.size());
  }
  const Vec2 centre = sum * (1.0 / hits);

  const int junction = g.add_node(NodeKind::Junction, centre);
  for (std::size_t i = 0; i < group.size(); ++i) add_repair_arc(g, group[i], junction, {segs[i].tip, centre});
  for (int e : group)
    if (g.has_node(e)) g.normalize(e);
  if (g.has_node(junction)) g.normalize(junction);
  return junction;
}

namespace {

struct RayHit {
  double t = std::numeric_limits<double>::infinity();
  int arc = 0;
  std::size_t segment = 0;  // polyline segment index
  Vec2 point;
};

// Nearest forward hit of the ray tip + t * dir on any arc polyline.
RayHit cast_ray(const NetGraph& g, Vec2 tip, Vec2 dir) {
  RayHit best;
  for (const auto& [id, arc] : g.arcs()) {
    const auto& poly = arc.polyline;
    for (std::size_t i = 1; i < poly.size(); ++i) {
      const Vec2 r = poly[i - 1];
      const Vec2 e = poly[i] - r;
      const double denom = dir.cross(e);
      if (std::abs(denom) < kEps) continue;
      const Vec2 w = r - tip;
      const double t = w.cross(e) / denom;
      const double u = w.cross(dir) / denom;
      if (t <= 1e-6 || u < -kEps || u > 1.0 + kEps) continue;
      if (t < best.t) best = {t, id, i - 1, tip + dir * t};
    }
  }
  return best;
}

// Inserts a junction at `point` on polyline segment `segment` of `arc_id`;
// returns the node id to connect to (an existing end node when the point
// coincides with it).
int split_arc(NetGraph& g, int arc_id, std::size_t segment, Vec2 point) {
  const Arc arc = g.arc(arc_id);
  const auto& poly = arc.polyline;
  constexpr double snap = 1e-6;
  if (distance(point, poly.front()) < snap) return arc.a;
  if (distance(point, poly.back()) < snap) return arc.b;

  Polyline first(poly.begin(), poly.begin() + static_cast<long>(segment) + 1);
  Polyline second(poly.begin() + static_cast<long>(segment) + 1, poly.end());
  if (distance(first.back(), point) > snap) first.push_back(point);
  if (distance(second.front(), point) > snap) second.insert(second.begin(), point);
  else second.front() = point;
  first.back() = point;

  std::size_t cut = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < arc.chain.size(); ++i) {
    const double d = distance(Vec2(arc.chain[i]), point);
    if (d < best) {
      best = d;
      cut = i;
    }
  }
  cut = std::clamp<std::size_t>(cut, 1, arc.chain.size() >= 3 ? arc.chain.size() - 2 : 1);
  std::vector<Pixel> c1(arc.chain.begin(), arc.chain.begin() + static_cast<long>(cut) + 1);
  std::vector<Pixel> c2(arc.chain.begin() + static_cast<long>(std::min(cut, arc.chain.size() - 1)), arc.chain.end());

  g.remove_arc(arc_id);
  const int junction = g.add_node(NodeKind::Junction, point);
  g.add_arc(arc.a, junction, std::move(c1), std::move(first), arc.repair);
  g.add_arc(junction, arc.b, std::move(c2), std::move(second), arc.repair);
  return junction;
}

}  // namespace

std::vector<IsolatedConnection> connect_isolated(NetGraph& g, const ConnectionParams& p) {
  std::vector<IsolatedConnection> made;
  std::vector<int> ends;
  for (const auto& [id, n] : g.nodes())
    if (n.kind == NodeKind::Endpoint) ends.push_back(id);

  for (int e : ends) {
    if (!g.has_node(e) || g.node(e).kind != NodeKind::Endpoint) continue;
    const auto& arc = g.arc(g.incident(e).front());
    if (arc.polyline.size() < 2) continue;
    const auto seg = final_segment(g, e);
    if (seg.length == 0.0) continue;
    const auto hit = cast_ray(g, seg.tip, seg.direction);
    if (hit.arc == 0 || !(hit.t < p.isolated_cost_max)) continue;

    const int target = split_arc(g, hit.arc, hit.segment, hit.point);
    if (target == e) continue;
    add_repair_arc(g, e, target, {seg.tip, hit.point});
    made.push_back({e, hit.point, hit.t});
    if (g.has_node(e)) g.normalize(e);
    if (g.has_node(target)) g.normalize(target);
  }
  return made;
}

NetGraph close_gaps(NetGraph g, const ConnectionParams& p, GapClosureReport* report) {
  p.validate();
  GapClosureReport local;
  GapClosureReport& r = report ? *report : local;
  r.candidates = candidate_connections(g, p);
  const auto kept = inhibit(g, r.candidates, p, &r.rejected);
  r.groups = find_multiway_groups(kept);
  for (const auto& group : r.groups.groups) draw_multiway(g, group);
  for (const auto& [a, b] : r.groups.pairs) draw_pair(g, a, b, p.collinear_tolerance);
  r.isolated = connect_isolated(g, p);
  return g;
}

namespace {

const char* reason_name(InhibitReason r) {
  switch (r) {
    case InhibitReason::Intersection: return "intersection";
    case InhibitReason::ShortCycle: return "short_cycle";
    case InhibitReason::ElongatedCycle: return "elongated_cycle";
  }
  return "unknown";
}

nlohmann::json candidate_json(const ConnectionCandidate& c) {
  return {{"e1", c.e1},
          {"e2", c.e2},
          {"D", c.geometry.distance},
          {"phi1", c.geometry.phi1},
          {"phi2", c.geometry.phi2},
          {"L1", c.geometry.len1},
          {"L2", c.geometry.len2},
          {"cost", c.cost}};
}

}  // namespace

nlohmann::json to_json(const GapClosureReport& report) {
  nlohmann::json j;
  j["candidates"] = nlohmann::json::array();
  for (const auto& c : report.candidates) j["candidates"].push_back(candidate_json(c));
  j["rejected"] = nlohmann::json::array();
  for (const auto& r : report.rejected) {
    auto cj = candidate_json(r.candidate);
    cj["reason"] = reason_name(r.reason);
    j["rejected"].push_back(cj);
  }
  j["groups"] = report.groups.groups;
  j["pairs"] = nlohmann::json::array();
  for (const auto& [a, b] : report.groups.pairs) j["pairs"].push_back({a, b});
  j["leftovers"] = report.groups.leftovers;
  j["isolated"] = nlohmann::json::array();
  for (const auto& c : report.isolated)
    j["isolated"].push_back({{"endpoint", c.endpoint}, {"x", c.hit.x}, {"y", c.hit.y}, {"extension", c.extension}});
  return j;
}

}  // namespace vectra
