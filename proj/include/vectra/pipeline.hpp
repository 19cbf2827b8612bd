#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vectra/colorspace.hpp"
#include "vectra/error.hpp"
#include "vectra/gapclosure.hpp"
#include "vectra/histogram.hpp"
#include "vectra/lineargraph.hpp"
#include "vectra/raster.hpp"

namespace vectra {

/// Every threshold of a run. The defaults are engineering choices tuned on
/// synthetic maps; see the configuration reference in the README.
struct PipelineConfig {
  ProjectionMode mode = ProjectionMode::SaturationHue;
  BinGrid bins;

  std::size_t min_region_area = 10;   ///< T1, before growing
  std::size_t min_object_area = 50;   ///< T2, after growing
  std::size_t max_hole_area = 20;     ///< T3, holes up to this size are filled
  double growth_distance = 0.1;       ///< colour distance limit for region growing

  bool grow = true;
  bool connect = true;
  bool thin = true;
  bool gap_closure = true;

  double prune_chain_min = 20.0;   ///< L1
  double prune_branch_min = 10.0;  ///< L2
  int trim = 2;                    ///< pixels removed at every endpoint
  double polygon_tolerance = 1.5;
  ConnectionParams connection;
  double final_chain_min = 10.0;   ///< L1', at most L1
  double final_branch_min = 5.0;   ///< L2', at most L2

  std::string layer = "NETWORK";
  std::optional<RgbPixel> color;  ///< overrides the mean colour of the grown mask

  /// Throws ValidationError unless all thresholds are non-negative and the
  /// final prune is no stricter than the first.
  void validate() const;

  /// Sets one key from its text form. Throws ValidationError on unknown keys
  /// or unparsable values.
  void set(const std::string& key, const std::string& value);

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Names accepted by PipelineConfig::set, in documentation order.
const std::vector<std::string>& config_keys();

/// Flat `key = value` lines; lines starting with `#` are comments. Unset keys keep their defaults.
PipelineConfig parse_config(const std::string& text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});
std::string format_config(const PipelineConfig& cfg);

/// The same keys as a flat JSON object; values may be numbers, booleans or strings.
nlohmann::json to_json(const PipelineConfig& cfg);
PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base = {});

/// A failure inside run_pipeline, tagged with the stage that raised it.
class StageError : public ValidationError {
 public:
  StageError(std::string stage, const std::string& message)
      : ValidationError("stage '" + stage + "': " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct StageTiming {
  std::string stage;
  double milliseconds = 0.0;
};

struct RunArtifacts {
  BinaryMask preliminary;  ///< extract_mask
  BinaryMask cleaned;      ///< small regions removed
  BinaryMask grown;
  BinaryMask connected;
  BinaryMask refined;      ///< second area filter and hole filling
  BinaryMask skeleton;
  BinaryMask thinned;
  NetGraph pruned;
  NetGraph approximated;
  NetGraph closed;
  NetGraph final_graph;
  GapClosureReport gaps;
  RgbPixel color;
  std::string dxf;
  std::vector<StageTiming> timings;

  /// Raster of a stage by name ("preliminary" ... "thinned", or "graph" for
  /// the final graph); nullopt for unknown names.
  std::optional<BinaryMask> stage_mask(const std::string& name) const;
};

/// Names accepted by RunArtifacts::stage_mask.
const std::vector<std::string>& stage_names();

/// Runs every stage in order and records the intermediates. Throws
/// StageError when a stage rejects its input.
RunArtifacts run_pipeline(const RgbImage& image, const ColorSelection& selection, const PipelineConfig& cfg);

nlohmann::json timings_json(const RunArtifacts& run);

}  // namespace vectra
