#include "vectra/export.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <limits>

#include <nlohmann/json.hpp>

#include "vectra/error.hpp"

namespace vectra {

namespace {

struct AciEntry {
  int index;
  int r, g, b;
};

// Index 7 is drawn black or white depending on the background.
constexpr std::array<AciEntry, 16> kPalette{{
    {1, 255, 0, 0},
    {2, 255, 255, 0},
    {3, 0, 255, 0},
    {4, 0, 255, 255},
    {5, 0, 0, 255},
    {6, 255, 0, 255},
    {7, 255, 255, 255},
    {7, 0, 0, 0},
    {8, 128, 128, 128},
    {9, 192, 192, 192},
    {250, 51, 51, 51},
    {251, 91, 91, 91},
    {252, 132, 132, 132},
    {253, 173, 173, 173},
    {254, 214, 214, 214},
    {255, 255, 255, 255},
}};

std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // no negative zero
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

class DxfWriter {
 public:
  void group(int code, std::string_view value) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%3d", code);
    out_ += buf;
    out_ += '\n';
    out_ += value;
    out_ += '\n';
  }
  void group(int code, int value) { group(code, std::to_string(value)); }
  void group(int code, double value) { group(code, format_double(value)); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

void validate_layer(const std::string& layer) {
  if (layer.empty() || layer.size() > 255) throw ValidationError("DXF layer name must have 1 to 255 characters");
  for (char c : layer) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x21 || u > 0x7e || std::string_view("<>/\\\":;?*|=`,").find(c) != std::string_view::npos)
      throw ValidationError("invalid character in DXF layer name '" + layer + "'");
  }
}

}  // namespace

int nearest_aci(RgbPixel color) {
  const double r = std::clamp(color.r, 0.0, 1.0) * 255.0;
  const double g = std::clamp(color.g, 0.0, 1.0) * 255.0;
  const double b = std::clamp(color.b, 0.0, 1.0) * 255.0;
  int best = 7;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& e : kPalette) {
    const double d = (r - e.r) * (r - e.r) + (g - e.g) * (g - e.g) + (b - e.b) * (b - e.b);
    if (d < best_d) {
      best_d = d;
      best = e.index;
    }
  }
  return best;
}

std::string write_dxf(const NetGraph& g, const std::string& layer, RgbPixel color) {
  validate_layer(layer);
  for (const auto& [id, arc] : g.arcs())
    if (arc.polyline.size() < 2) throw ValidationError("arc " + std::to_string(id) + " has no polyline");
  const int aci = nearest_aci(color);
  const double flip = g.height() - 1;

  DxfWriter w;
  w.group(0, "SECTION");
  w.group(2, "HEADER");
  w.group(9, "$ACADVER");
  w.group(1, "AC1009");
  w.group(0, "ENDSEC");

  w.group(0, "SECTION");
  w.group(2, "TABLES");
  w.group(0, "TABLE");
  w.group(2, "LAYER");
  w.group(70, 1);
  w.group(0, "LAYER");
  w.group(2, layer);
  w.group(70, 0);
  w.group(62, aci);
  w.group(6, "CONTINUOUS");
  w.group(0, "ENDTAB");
  w.group(0, "ENDSEC");

  w.group(0, "SECTION");
  w.group(2, "ENTITIES");
  for (const auto& [id, arc] : g.arcs()) {
    w.group(0, "POLYLINE");
    w.group(8, layer);
    w.group(66, 1);
    w.group(10, 0.0);
    w.group(20, 0.0);
    w.group(30, 0.0);
    w.group(70, 0);
    for (const auto& v : arc.polyline) {
      w.group(0, "VERTEX");
      w.group(8, layer);
      w.group(10, v.x);
      w.group(20, flip - v.y);
      w.group(30, 0.0);
    }
    w.group(0, "SEQEND");
    w.group(8, layer);
  }
  w.group(0, "ENDSEC");
  w.group(0, "EOF");
  return w.take();
}

nlohmann::ordered_json graph_to_json(const NetGraph& g) {
  nlohmann::ordered_json j;
  if (g.width() != 0 || g.height() != 0) {
    j["width"] = g.width();
    j["height"] = g.height();
  }
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& [id, n] : g.nodes())
    j["nodes"].push_back({{"id", id}, {"kind", node_kind_name(n.kind)}, {"x", n.pos.x}, {"y", n.pos.y}});
  j["arcs"] = nlohmann::ordered_json::array();
  for (const auto& [id, arc] : g.arcs()) {
    nlohmann::ordered_json chain = nlohmann::ordered_json::array();
    for (const auto& p : arc.chain) chain.push_back({p.x, p.y});
    nlohmann::ordered_json poly = nlohmann::ordered_json::array();
    for (const auto& v : arc.polyline) poly.push_back({v.x, v.y});
    j["arcs"].push_back({{"id", id},
                         {"a", arc.a},
                         {"b", arc.b},
                         {"chain", std::move(chain)},
                         {"polyline", std::move(poly)},
                         {"repair", arc.repair}});
  }
  return j;
}

NetGraph graph_from_json(const nlohmann::json& j) {
  try {
    NetGraph g(j.value("width", 0), j.value("height", 0));
    for (const auto& n : j.at("nodes")) {
      g.insert_node(Node{n.at("id").get<int>(), parse_node_kind(n.at("kind").get<std::string>()),
                         Vec2{n.at("x").get<double>(), n.at("y").get<double>()}});
    }
    for (const auto& a : j.at("arcs")) {
      Arc arc;
      arc.id = a.at("id").get<int>();
      arc.a = a.at("a").get<int>();
      arc.b = a.at("b").get<int>();
      for (const auto& p : a.at("chain")) arc.chain.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
      if (a.contains("polyline"))
        for (const auto& v : a.at("polyline")) arc.polyline.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
      arc.repair = a.value("repair", false);
      g.insert_arc(arc);
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed graph JSON: ") + e.what());
  }
}

std::string write_json(const NetGraph& g) { return graph_to_json(g).dump(); }

NetGraph read_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid JSON: ") + e.what());
  }
  return graph_from_json(j);
}

}  // namespace vectra
