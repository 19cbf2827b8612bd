#include "vectra/lineargraph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <set>
#include <unordered_set>

#include "vectra/skeleton.hpp"

namespace vectra {

const char* node_kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::Endpoint: return "endpoint";
    case NodeKind::Junction: return "junction";
    case NodeKind::Isolated: return "isolated";
    case NodeKind::Anchor: return "anchor";
  }
  return "isolated";
}

NodeKind parse_node_kind(const std::string& name) {
  if (name == "endpoint") return NodeKind::Endpoint;
  if (name == "junction") return NodeKind::Junction;
  if (name == "isolated") return NodeKind::Isolated;
  if (name == "anchor") return NodeKind::Anchor;
  throw ValidationError("unknown node kind '" + name + "'");
}

namespace {

bool lex_less(Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

Pixel round_pixel(Vec2 p) { return {static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y))}; }

}  // namespace

int NetGraph::add_node(NodeKind kind, Vec2 pos) {
  const int id = next_node_++;
  nodes_[id] = Node{id, kind, pos};
  incidence_[id];
  return id;
}

void NetGraph::insert_node(const Node& node) {
  if (nodes_.count(node.id)) throw ValidationError("duplicate node id " + std::to_string(node.id));
  nodes_[node.id] = node;
  incidence_[node.id];
  next_node_ = std::max(next_node_, node.id + 1);
}

int NetGraph::add_arc(int a, int b, std::vector<Pixel> chain, Polyline polyline, bool repair) {
  if (!has_node(a) || !has_node(b)) throw ValidationError("arc references a missing node");
  const int id = next_arc_++;
  arcs_[id] = Arc{id, a, b, std::move(chain), std::move(polyline), repair};
  incidence_[a].push_back(id);
  incidence_[b].push_back(id);
  canonicalize(id);
  return id;
}

void NetGraph::insert_arc(const Arc& arc) {
  if (arcs_.count(arc.id)) throw ValidationError("duplicate arc id " + std::to_string(arc.id));
  if (!has_node(arc.a) || !has_node(arc.b)) throw ValidationError("arc references a missing node");
  arcs_[arc.id] = arc;
  incidence_[arc.a].push_back(arc.id);
  incidence_[arc.b].push_back(arc.id);
  next_arc_ = std::max(next_arc_, arc.id + 1);
}

void NetGraph::remove_arc(int id) {
  const auto it = arcs_.find(id);
  if (it == arcs_.end()) return;
  for (int n : {it->second.a, it->second.b}) {
    auto& inc = incidence_[n];
    const auto pos = std::find(inc.begin(), inc.end(), id);
    if (pos != inc.end()) inc.erase(pos);
  }
  arcs_.erase(it);
}

void NetGraph::remove_node(int id) {
  if (!incident(id).empty()) throw ValidationError("cannot remove a node that still has arcs");
  nodes_.erase(id);
  incidence_.erase(id);
}

const Node& NetGraph::node(int id) const {
  const auto it = nodes_.find(id);
  if (it == nodes_.end()) throw ValidationError("no node with id " + std::to_string(id));
  return it->second;
}

Node& NetGraph::node(int id) {
  const auto it = nodes_.find(id);
  if (it == nodes_.end()) throw ValidationError("no node with id " + std::to_string(id));
  return it->second;
}

const Arc& NetGraph::arc(int id) const {
  const auto it = arcs_.find(id);
  if (it == arcs_.end()) throw ValidationError("no arc with id " + std::to_string(id));
  return it->second;
}

Arc& NetGraph::arc(int id) {
  const auto it = arcs_.find(id);
  if (it == arcs_.end()) throw ValidationError("no arc with id " + std::to_string(id));
  return it->second;
}

const std::vector<int>& NetGraph::incident(int node) const {
  const auto it = incidence_.find(node);
  if (it == incidence_.end()) throw ValidationError("no node with id " + std::to_string(node));
  return it->second;
}

bool NetGraph::normalize(int id) {
  const auto& inc = incident(id);
  switch (inc.size()) {
    case 0: node(id).kind = NodeKind::Isolated; return true;
    case 1: node(id).kind = NodeKind::Endpoint; return true;
    case 2:
      if (inc[0] == inc[1]) {
        node(id).kind = NodeKind::Anchor;
        return true;
      }
      dissolve(id);
      return false;
    default: node(id).kind = NodeKind::Junction; return true;
  }
}

int NetGraph::dissolve(int id) {
  const auto inc = incident(id);
  if (inc.size() != 2 || inc[0] == inc[1]) throw ValidationError("dissolve needs two distinct arcs at the node");
  Arc first = arc(inc[0]);
  Arc second = arc(inc[1]);
  // first runs into the node, second runs out of it.
  if (first.b != id) {
    std::reverse(first.chain.begin(), first.chain.end());
    std::reverse(first.polyline.begin(), first.polyline.end());
    std::swap(first.a, first.b);
  }
  if (second.a != id) {
    std::reverse(second.chain.begin(), second.chain.end());
    std::reverse(second.polyline.begin(), second.polyline.end());
    std::swap(second.a, second.b);
  }
  std::vector<Pixel> chain = first.chain;
  auto tail = second.chain.begin();
  if (!chain.empty() && tail != second.chain.end() && chain.back() == *tail) ++tail;
  chain.insert(chain.end(), tail, second.chain.end());

  Polyline poly;
  if (!first.polyline.empty() && !second.polyline.empty()) {
    poly = first.polyline;
    auto ptail = second.polyline.begin();
    if (poly.back() == *ptail) ++ptail;
    poly.insert(poly.end(), ptail, second.polyline.end());
  }
  remove_arc(first.id);
  remove_arc(second.id);
  remove_node(id);
  return add_arc(first.a, second.b, std::move(chain), std::move(poly), first.repair || second.repair);
}

void NetGraph::canonicalize(int id) {
  Arc& arc = arcs_.at(id);
  bool flip = false;
  if (arc.a != arc.b) {
    const Vec2 pa = node(arc.a).pos;
    const Vec2 pb = node(arc.b).pos;
    flip = lex_less(pb, pa) || (pa == pb && arc.b < arc.a);
  } else if (arc.chain.size() >= 3) {
    flip = arc.chain[arc.chain.size() - 2] < arc.chain[1];
  } else if (arc.polyline.size() >= 3) {
    flip = lex_less(arc.polyline[arc.polyline.size() - 2], arc.polyline[1]);
  }
  if (!flip) return;
  std::swap(arc.a, arc.b);
  std::reverse(arc.chain.begin(), arc.chain.end());
  std::reverse(arc.polyline.begin(), arc.polyline.end());
}

std::vector<std::vector<int>> NetGraph::components() const {
  std::vector<std::vector<int>> out;
  std::set<int> seen;
  for (const auto& [id, _] : nodes_) {
    if (seen.count(id)) continue;
    std::vector<int> comp;
    std::deque<int> queue{id};
    seen.insert(id);
    while (!queue.empty()) {
      const int n = queue.front();
      queue.pop_front();
      comp.push_back(n);
      for (int a : incident(n)) {
        const auto& arc = arcs_.at(a);
        for (int m : {arc.a, arc.b})
          if (seen.insert(m).second) queue.push_back(m);
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

bool operator==(const NetGraph& a, const NetGraph& b) {
  if (a.width_ != b.width_ || a.height_ != b.height_) return false;
  if (a.nodes_.size() != b.nodes_.size() || a.arcs_.size() != b.arcs_.size()) return false;
  for (auto it = a.nodes_.begin(), jt = b.nodes_.begin(); it != a.nodes_.end(); ++it, ++jt) {
    const auto& x = it->second;
    const auto& y = jt->second;
    if (x.id != y.id || x.kind != y.kind || !(x.pos == y.pos)) return false;
  }
  for (auto it = a.arcs_.begin(), jt = b.arcs_.begin(); it != a.arcs_.end(); ++it, ++jt) {
    const auto& x = it->second;
    const auto& y = jt->second;
    if (x.id != y.id || x.a != y.a || x.b != y.b || x.chain != y.chain || x.polyline != y.polyline ||
        x.repair != y.repair)
      return false;
  }
  return true;
}

double chain_length(std::span<const Pixel> chain) {
  double len = 0.0;
  for (std::size_t i = 1; i < chain.size(); ++i) {
    const int dx = std::abs(chain[i].x - chain[i - 1].x);
    const int dy = std::abs(chain[i].y - chain[i - 1].y);
    len += (dx != 0 && dy != 0) ? std::numbers::sqrt2 : static_cast<double>(dx + dy);
  }
  return len;
}

double polyline_length(std::span<const Vec2> polyline) {
  double len = 0.0;
  for (std::size_t i = 1; i < polyline.size(); ++i) len += distance(polyline[i - 1], polyline[i]);
  return len;
}

double arc_length(const Arc& arc) {
  return arc.polyline.size() >= 2 ? polyline_length(arc.polyline) : chain_length(arc.chain);
}

namespace {

// Links of a skeleton pixel: 4-neighbours, plus diagonal neighbours whose two
// shared 4-neighbours are both background.
std::vector<Pixel> links(const BinaryMask& m, Pixel p) {
  std::vector<Pixel> out;
  for (int k = 0; k < 8; ++k) {
    const int nx = p.x + kDx8[k];
    const int ny = p.y + kDy8[k];
    if (!m.at_or(nx, ny, 0)) continue;
    if (kDx8[k] != 0 && kDy8[k] != 0 && (m.at_or(nx, p.y, 0) || m.at_or(p.x, ny, 0))) continue;
    out.push_back({nx, ny});
  }
  return out;
}

}  // namespace

NetGraph raster_to_graph(const BinaryMask& skeleton) {
  if (const auto sq = find_square(skeleton))
    throw ValidationError("skeleton is not unit-width: 2x2 foreground square at (" + std::to_string(sq->x) + ", " +
                          std::to_string(sq->y) + ")");

  const int w = skeleton.width();
  const int h = skeleton.height();
  NetGraph g(w, h);
  Grid<int> node_at(w, h, 0);
  Grid<std::uint8_t> visited(w, h, 0);

  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!skeleton(x, y)) continue;
      const auto n = links(skeleton, {x, y}).size();
      if (n == 2) continue;
      const auto kind = n == 0 ? NodeKind::Isolated : n == 1 ? NodeKind::Endpoint : NodeKind::Junction;
      node_at(x, y) = g.add_node(kind, Vec2(Pixel{x, y}));
      visited(x, y) = 1;
    }

  std::unordered_set<std::uint64_t> used;
  auto edge_key = [&](Pixel p, Pixel q) {
    auto a = static_cast<std::uint64_t>(skeleton.index(p.x, p.y));
    auto b = static_cast<std::uint64_t>(skeleton.index(q.x, q.y));
    if (b < a) std::swap(a, b);
    return (a << 32) | b;
  };

  // Follows 2-branch pixels from `start` through `first` until a node pixel.
  auto trace = [&](Pixel start, Pixel first) {
    std::vector<Pixel> chain{start, first};
    used.insert(edge_key(start, first));
    Pixel prev = start;
    Pixel cur = first;
    while (node_at[cur] == 0) {
      visited[cur] = 1;
      Pixel next = cur;
      for (const auto& q : links(skeleton, cur))
        if (!(q == prev) && !used.count(edge_key(cur, q))) {
          next = q;
          break;
        }
      if (next == cur) break;  // closed back onto the start of an anchorless loop
      used.insert(edge_key(cur, next));
      chain.push_back(next);
      prev = cur;
      cur = next;
    }
    return chain;
  };

  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (node_at(x, y) == 0) continue;
      const Pixel p{x, y};
      for (const auto& q : links(skeleton, p)) {
        if (used.count(edge_key(p, q))) continue;
        auto chain = trace(p, q);
        const int end = node_at[chain.back()];
        g.add_arc(node_at[p], end, std::move(chain));
      }
    }

  // Closed loops without any singular pixel.
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!skeleton(x, y) || visited(x, y)) continue;
      const Pixel p{x, y};
      const int anchor = g.add_node(NodeKind::Anchor, Vec2(p));
      node_at[p] = anchor;
      visited[p] = 1;
      const auto nbrs = links(skeleton, p);
      auto chain = trace(p, nbrs.front());
      g.add_arc(anchor, anchor, std::move(chain));
    }
  return g;
}

BinaryMask rasterize(const NetGraph& g) {
  BinaryMask m(g.width(), g.height());
  for (const auto& [id, arc] : g.arcs())
    for (const auto& p : arc.chain)
      if (m.contains(p)) m[p] = 1;
  for (const auto& [id, node] : g.nodes()) {
    const auto p = round_pixel(node.pos);
    if (m.contains(p)) m[p] = 1;
  }
  return m;
}

void remove_short_components(NetGraph& g, double min_length) {
  for (const auto& comp : g.components()) {
    std::set<int> arcs;
    for (int n : comp)
      for (int a : g.incident(n)) arcs.insert(a);
    double total = 0.0;
    for (int a : arcs) total += chain_length(g.arc(a).chain);
    if (total >= min_length) continue;
    for (int a : arcs) g.remove_arc(a);
    for (int n : comp) g.remove_node(n);
  }
}

NetGraph prune(NetGraph g, double chain_min, double branch_min) {
  remove_short_components(g, chain_min);
  for (;;) {
    int victim = 0;
    double best = branch_min;
    for (const auto& [id, arc] : g.arcs()) {
      const bool open = g.node(arc.a).kind == NodeKind::Endpoint || g.node(arc.b).kind == NodeKind::Endpoint;
      if (!open) continue;
      const double len = chain_length(arc.chain);
      if (len < best) {
        best = len;
        victim = id;
      }
    }
    if (victim == 0) break;
    const int a = g.arc(victim).a;
    const int b = g.arc(victim).b;
    g.remove_arc(victim);
    for (int n : {a, b}) {
      if (!g.has_node(n)) continue;
      if (g.degree(n) == 0) g.remove_node(n);
      else g.normalize(n);
    }
  }
  remove_short_components(g, chain_min);
  return g;
}

NetGraph trim_endpoints(NetGraph g, int n) {
  if (n < 0) throw ValidationError("trim_endpoints: negative pixel count");
  std::vector<int> ids;
  for (const auto& [id, _] : g.arcs()) ids.push_back(id);
  for (int id : ids) {
    Arc& arc = g.arc(id);
    arc.polyline.clear();
    if (n == 0) continue;
    const bool open_a = g.node(arc.a).kind == NodeKind::Endpoint;
    const bool open_b = g.node(arc.b).kind == NodeKind::Endpoint;
    const int k = static_cast<int>(arc.chain.size());
    const int room = std::max(0, k - 2);
    int front = 0;
    int back = 0;
    if (open_a && open_b) {
      front = std::min(n, (room + 1) / 2);
      back = std::min(n, room - front);
    } else if (open_a) {
      front = std::min(n, room);
    } else if (open_b) {
      back = std::min(n, room);
    }
    if (front == 0 && back == 0) continue;
    arc.chain.erase(arc.chain.end() - back, arc.chain.end());
    arc.chain.erase(arc.chain.begin(), arc.chain.begin() + front);
    if (open_a) g.node(arc.a).pos = Vec2(arc.chain.front());
    if (open_b) g.node(arc.b).pos = Vec2(arc.chain.back());
  }
  // Moving endpoints can change which end is lexicographically first.
  for (int id : ids) g.canonicalize(id);
  return g;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

namespace {

void fit_range(std::span<const Vec2> chain, std::size_t i, std::size_t j, double tol, Polyline& out) {
  double worst = -1.0;
  std::size_t split = i;
  for (std::size_t k = i + 1; k < j; ++k) {
    const double d = point_segment_distance(chain[k], chain[i], chain[j]);
    if (d > worst) {
      worst = d;
      split = k;
    }
  }
  if (worst > tol) {
    fit_range(chain, i, split, tol, out);
    fit_range(chain, split, j, tol, out);
  } else {
    out.push_back(chain[j]);
  }
}

}  // namespace

Polyline approximate_polygonal(std::span<const Vec2> chain, double tol) {
  if (!(tol > 0.0)) throw ValidationError("approximate_polygonal: tolerance must be positive");
  if (chain.empty()) return {};
  Polyline out{chain.front()};
  if (chain.size() == 1) return out;
  fit_range(chain, 0, chain.size() - 1, tol, out);
  return out;
}

Polyline approximate_polygonal(std::span<const Pixel> chain, double tol) {
  std::vector<Vec2> pts;
  pts.reserve(chain.size());
  for (const auto& p : chain) pts.emplace_back(p);
  return approximate_polygonal(std::span<const Vec2>(pts), tol);
}

NetGraph attach_polylines(NetGraph g, double tol) {
  if (!(tol > 0.0)) throw ValidationError("attach_polylines: tolerance must be positive");
  std::vector<int> ids;
  for (const auto& [id, _] : g.arcs()) ids.push_back(id);
  for (int id : ids) {
    Arc& arc = g.arc(id);
    auto poly = approximate_polygonal(std::span<const Pixel>(arc.chain), tol);
    if (poly.size() < 2) poly.push_back(poly.empty() ? g.node(arc.a).pos : poly.front());
    poly.front() = g.node(arc.a).pos;
    poly.back() = g.node(arc.b).pos;
    arc.polyline = std::move(poly);
  }
  return g;
}

}  // namespace vectra
