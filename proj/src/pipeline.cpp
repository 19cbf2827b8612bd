#include "vectra/pipeline.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vectra/export.hpp"
#include "vectra/io.hpp"
#include "vectra/regions.hpp"
#include "vectra/skeleton.hpp"

namespace vectra {

namespace {

enum class Kind { Real, Count, Integer, Bool, Text };

struct KeyDef {
  std::string name;
  Kind kind;
  std::function<std::string(const PipelineConfig&)> get;
  std::function<void(PipelineConfig&, const std::string&)> set;
};

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw ValidationError("invalid value '" + value + "' for config key '" + key + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = first + value.size();
  if (!value.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc() || res.ptr != last) bad_value(key, value);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  bad_value(key, value);
}

std::string format_color(const std::optional<RgbPixel>& c) {
  if (!c) return {};
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", to_rgb8(*c).r, to_rgb8(*c).g, to_rgb8(*c).b);
  return buf;
}

std::optional<RgbPixel> parse_color(const std::string& key, const std::string& value) {
  if (value.empty()) return std::nullopt;
  if (value.size() != 7 || value[0] != '#') bad_value(key, value);
  unsigned rgb = 0;
  const auto res = std::from_chars(value.data() + 1, value.data() + 7, rgb, 16);
  if (res.ec != std::errc() || res.ptr != value.data() + 7) bad_value(key, value);
  return to_unit(Rgb8{static_cast<std::uint8_t>(rgb >> 16), static_cast<std::uint8_t>(rgb >> 8),
                      static_cast<std::uint8_t>(rgb)});
}

KeyDef real_key(std::string name, double PipelineConfig::*member) {
  return {name, Kind::Real, [member](const PipelineConfig& c) { return format_real(c.*member); },
          [name, member](PipelineConfig& c, const std::string& v) { c.*member = parse_number<double>(name, v); }};
}

KeyDef connection_key(std::string name, double ConnectionParams::*member) {
  return {name, Kind::Real, [member](const PipelineConfig& c) { return format_real(c.connection.*member); },
          [name, member](PipelineConfig& c, const std::string& v) {
            c.connection.*member = parse_number<double>(name, v);
          }};
}

KeyDef count_key(std::string name, std::size_t PipelineConfig::*member) {
  return {name, Kind::Count, [member](const PipelineConfig& c) { return std::to_string(c.*member); },
          [name, member](PipelineConfig& c, const std::string& v) { c.*member = parse_number<std::size_t>(name, v); }};
}

KeyDef bool_key(std::string name, bool PipelineConfig::*member) {
  return {name, Kind::Bool, [member](const PipelineConfig& c) { return std::string(c.*member ? "true" : "false"); },
          [name, member](PipelineConfig& c, const std::string& v) { c.*member = parse_bool(name, v); }};
}

const std::vector<KeyDef>& key_defs() {
  static const std::vector<KeyDef> defs = [] {
    std::vector<KeyDef> d;
    d.push_back({"mode", Kind::Text, [](const PipelineConfig& c) { return mode_name(c.mode); },
                 [](PipelineConfig& c, const std::string& v) { c.mode = parse_mode(v); }});
    d.push_back({"bins_x", Kind::Integer, [](const PipelineConfig& c) { return std::to_string(c.bins.width); },
                 [](PipelineConfig& c, const std::string& v) { c.bins.width = parse_number<int>("bins_x", v); }});
    d.push_back({"bins_y", Kind::Integer, [](const PipelineConfig& c) { return std::to_string(c.bins.height); },
                 [](PipelineConfig& c, const std::string& v) { c.bins.height = parse_number<int>("bins_y", v); }});
    d.push_back(count_key("min_region_area", &PipelineConfig::min_region_area));
    d.push_back(count_key("min_object_area", &PipelineConfig::min_object_area));
    d.push_back(count_key("max_hole_area", &PipelineConfig::max_hole_area));
    d.push_back(real_key("growth_distance", &PipelineConfig::growth_distance));
    d.push_back(bool_key("grow", &PipelineConfig::grow));
    d.push_back(bool_key("connect", &PipelineConfig::connect));
    d.push_back(bool_key("thin", &PipelineConfig::thin));
    d.push_back(bool_key("gap_closure", &PipelineConfig::gap_closure));
    d.push_back(real_key("prune_chain_min", &PipelineConfig::prune_chain_min));
    d.push_back(real_key("prune_branch_min", &PipelineConfig::prune_branch_min));
    d.push_back({"trim", Kind::Integer, [](const PipelineConfig& c) { return std::to_string(c.trim); },
                 [](PipelineConfig& c, const std::string& v) { c.trim = parse_number<int>("trim", v); }});
    d.push_back(real_key("polygon_tolerance", &PipelineConfig::polygon_tolerance));
    d.push_back(connection_key("max_cost", &ConnectionParams::max_cost));
    d.push_back(connection_key("min_segment_length", &ConnectionParams::min_segment_length));
    d.push_back(connection_key("angle_min", &ConnectionParams::angle_min));
    d.push_back(connection_key("angle_max", &ConnectionParams::angle_max));
    d.push_back(connection_key("ratio_lo", &ConnectionParams::ratio_lo));
    d.push_back(connection_key("ratio_hi", &ConnectionParams::ratio_hi));
    d.push_back(connection_key("cycle_min_length", &ConnectionParams::cycle_min_length));
    d.push_back(connection_key("elongation_max", &ConnectionParams::elongation_max));
    d.push_back(connection_key("isolated_cost_max", &ConnectionParams::isolated_cost_max));
    d.push_back(connection_key("collinear_tolerance", &ConnectionParams::collinear_tolerance));
    d.push_back(connection_key("angle_weight", &ConnectionParams::angle_weight));
    d.push_back(real_key("final_chain_min", &PipelineConfig::final_chain_min));
    d.push_back(real_key("final_branch_min", &PipelineConfig::final_branch_min));
    d.push_back({"layer", Kind::Text, [](const PipelineConfig& c) { return c.layer; },
                 [](PipelineConfig& c, const std::string& v) { c.layer = v; }});
    d.push_back({"color", Kind::Text, [](const PipelineConfig& c) { return format_color(c.color); },
                 [](PipelineConfig& c, const std::string& v) { c.color = parse_color("color", v); }});
    return d;
  }();
  return defs;
}

const KeyDef& find_key(const std::string& key) {
  for (const auto& d : key_defs())
    if (d.name == key) return d;
  throw ValidationError("unknown config key '" + key + "'");
}

}  // namespace

void PipelineConfig::validate() const {
  if (bins.width < 2 || bins.height < 2) throw ValidationError("histogram needs at least 2 bins per axis");
  for (double v : {growth_distance, prune_chain_min, prune_branch_min, polygon_tolerance, final_chain_min,
                   final_branch_min})
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("thresholds must be finite and non-negative");
  if (trim < 0) throw ValidationError("trim must be non-negative");
  if (final_chain_min > prune_chain_min || final_branch_min > prune_branch_min)
    throw ValidationError("the final prune must not be stricter than the first");
  if (layer.empty()) throw ValidationError("layer name must not be empty");
  connection.validate();
}

void PipelineConfig::set(const std::string& key, const std::string& value) { find_key(key).set(*this, value); }

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& d : key_defs()) k.push_back(d.name);
    return k;
  }();
  return keys;
}

PipelineConfig parse_config(const std::string& text, PipelineConfig base) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trimmed(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(number) + ": expected key = value");
    base.set(trimmed(line.substr(0, eq)), trimmed(line.substr(eq + 1)));
  }
  return base;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  const auto bytes = io::read_file(path);
  return parse_config(std::string(bytes.begin(), bytes.end()), std::move(base));
}

std::string format_config(const PipelineConfig& cfg) {
  std::string out;
  for (const auto& d : key_defs()) out += d.name + " = " + d.get(cfg) + "\n";
  return out;
}

nlohmann::json to_json(const PipelineConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& d : key_defs()) {
    const auto v = d.get(cfg);
    switch (d.kind) {
      case Kind::Real: j[d.name] = parse_number<double>(d.name, v); break;
      case Kind::Count: j[d.name] = parse_number<std::size_t>(d.name, v); break;
      case Kind::Integer: j[d.name] = parse_number<int>(d.name, v); break;
      case Kind::Bool: j[d.name] = v == "true"; break;
      case Kind::Text:
        if (v.empty()) j[d.name] = nullptr;
        else j[d.name] = v;
        break;
    }
  }
  return j;
}

PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    std::string text;
    if (value.is_string()) text = value.get<std::string>();
    else if (value.is_boolean()) text = value.get<bool>() ? "true" : "false";
    else if (value.is_number_integer()) text = value.dump();
    else if (value.is_number_float()) text = format_real(value.get<double>());
    else if (value.is_null()) text = "";
    else throw ValidationError("config key '" + key + "' must be a scalar");
    base.set(key, text);
  }
  return base;
}

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names{"preliminary", "cleaned", "grown",   "connected",
                                              "refined",     "skeleton", "thinned", "graph"};
  return names;
}

std::optional<BinaryMask> RunArtifacts::stage_mask(const std::string& name) const {
  if (name == "preliminary") return preliminary;
  if (name == "cleaned") return cleaned;
  if (name == "grown") return grown;
  if (name == "connected") return connected;
  if (name == "refined") return refined;
  if (name == "skeleton") return skeleton;
  if (name == "thinned") return thinned;
  if (name == "graph") {
    auto mask = rasterize(final_graph);
    if (mask.empty()) mask = BinaryMask(thinned.width(), thinned.height());
    return mask;
  }
  return std::nullopt;
}

RunArtifacts run_pipeline(const RgbImage& image, const ColorSelection& selection, const PipelineConfig& cfg) {
  RunArtifacts run;

  auto stage = [&](const char* name, auto&& fn) {
    const auto start = std::chrono::steady_clock::now();
    try {
      fn();
    } catch (const StageError&) {
      throw;
    } catch (const Error& e) {
      throw StageError(name, e.what());
    }
    const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - start;
    run.timings.push_back({name, elapsed.count()});
  };
  auto require = [](bool ok, const char* name, const char* what) {
    if (!ok) throw StageError(name, what);
  };

  stage("config", [&] {
    cfg.validate();
    if (selection.mode != cfg.mode) throw ValidationError("selection mode differs from the configured mode");
    selection.validate(cfg.bins);
    if (image.empty()) throw EmptyInputError("image is empty");
  });
  stage("extract", [&] { run.preliminary = extract_mask(image, selection, cfg.bins); });
  stage("clean", [&] {
    run.cleaned = remove_small_regions(run.preliminary, cfg.min_region_area);
    require(is_subset(run.cleaned, run.preliminary), "clean", "output is not a subset of the extracted mask");
  });
  stage("grow", [&] {
    if (cfg.grow && count_foreground(run.cleaned) > 0)
      run.grown = region_grow(image, run.cleaned, GrowthParams{cfg.growth_distance, std::nullopt});
    else
      run.grown = run.cleaned;
    require(is_subset(run.cleaned, run.grown), "grow", "output does not contain the seed");
  });
  stage("connect", [&] {
    run.connected = cfg.connect ? connect_adjacent(run.grown) : run.grown;
    require(is_subset(run.grown, run.connected), "connect", "output does not contain its input");
  });
  stage("refine", [&] {
    const auto kept = remove_small_regions(run.connected, cfg.min_object_area);
    require(is_subset(kept, run.connected), "refine", "area filter added pixels");
    run.refined = remove_small_holes(kept, cfg.max_hole_area);
    require(is_subset(kept, run.refined), "refine", "hole filling removed pixels");
  });
  stage("skeleton", [&] {
    run.skeleton = skeletonize(run.refined);
    require(is_subset(run.skeleton, run.refined), "skeleton", "skeleton leaves the region");
  });
  stage("thin", [&] {
    run.thinned = cfg.thin ? thin(run.skeleton, &run.refined) : run.skeleton;
    require(is_subset(run.thinned, run.refined), "thin", "thinning left the region");
  });
  NetGraph graph;
  stage("graph", [&] { graph = raster_to_graph(run.thinned); });
  stage("prune", [&] { run.pruned = prune(std::move(graph), cfg.prune_chain_min, cfg.prune_branch_min); });
  NetGraph trimmed;
  stage("trim", [&] { trimmed = trim_endpoints(run.pruned, cfg.trim); });
  stage("approximate", [&] { run.approximated = attach_polylines(std::move(trimmed), cfg.polygon_tolerance); });
  stage("gap_closure", [&] {
    run.closed = cfg.gap_closure ? close_gaps(run.approximated, cfg.connection, &run.gaps) : run.approximated;
  });
  stage("final_prune", [&] { run.final_graph = prune(run.closed, cfg.final_chain_min, cfg.final_branch_min); });
  stage("export", [&] {
    if (cfg.color) run.color = *cfg.color;
    else if (count_foreground(run.grown) > 0) run.color = mean_region_color(image, run.grown);
    else run.color = RgbPixel{};
    run.dxf = write_dxf(run.final_graph, cfg.layer, run.color);
  });
  return run;
}

nlohmann::json timings_json(const RunArtifacts& run) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& t : run.timings) j.push_back({{"stage", t.stage}, {"ms", t.milliseconds}});
  return j;
}

}  // namespace vectra
