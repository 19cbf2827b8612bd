#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "vectra/colorspace.hpp"
#include "vectra/lineargraph.hpp"

namespace vectra {

/// Nearest entry of the standard AutoCAD colour index among the primary
/// colours (1-9) and the grey ramp (250-255).
int nearest_aci(RgbPixel color);

/// ASCII DXF (R12): HEADER, TABLES with a single layer, one POLYLINE per arc.
/// Y is flipped so that raster row 0 ends up at the top of the drawing.
/// Throws ValidationError if an arc has no polyline or the layer name is invalid.
std::string write_dxf(const NetGraph& g, const std::string& layer, RgbPixel color);

/// {"nodes":[{id,kind,x,y}],"arcs":[{id,a,b,chain,polyline,repair}]}, plus
/// "width"/"height" when the graph has raster dimensions.
nlohmann::ordered_json graph_to_json(const NetGraph& g);
NetGraph graph_from_json(const nlohmann::json& j);

std::string write_json(const NetGraph& g);
/// Throws ValidationError on malformed documents.
NetGraph read_json(std::string_view text);

}  // namespace vectra
