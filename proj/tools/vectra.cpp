#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vectra/export.hpp"
#include "vectra/histogram.hpp"
#include "vectra/io.hpp"
#include "vectra/pipeline.hpp"
#include "vectra/service.hpp"

namespace fs = std::filesystem;
using namespace vectra;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

std::string read_text(const fs::path& path) {
  const auto bytes = io::read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

// The selection's mode is the default; a config file or --set may override it.
PipelineConfig build_config(const std::string& config_path, const std::vector<std::string>& overrides,
                            ProjectionMode mode) {
  PipelineConfig cfg;
  cfg.mode = mode;
  if (!config_path.empty()) cfg = load_config(config_path, cfg);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

void dump_stages(const RunArtifacts& run, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  for (const auto& name : stage_names()) {
    const auto png = io::encode_png(io::mask_to_image(*run.stage_mask(name)));
    io::write_file(dir / (name + ".png"), png);
  }
  io::write_file(dir / "pruned.json", write_json(run.pruned));
  io::write_file(dir / "approximated.json", write_json(run.approximated));
  io::write_file(dir / "closed.json", write_json(run.closed));
  io::write_file(dir / "final.json", write_json(run.final_graph));
  io::write_file(dir / "gaps.json", to_json(run.gaps).dump(2));
  io::write_file(dir / "timings.json", timings_json(run).dump(2));
}

int guarded(const std::function<void()>& fn) {
  try {
    fn();
    return 0;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vectorise linear features of a colour map raster"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "extract, vectorise and export one colour class");
  std::string image_path, selection_path, config_path, out_path, dump_dir, json_out;
  std::vector<std::string> overrides;
  run_cmd->add_option("--image", image_path, "PNG or PPM raster")->required();
  run_cmd->add_option("--selection", selection_path, "ColorSelection JSON file")->required();
  run_cmd->add_option("--config", config_path, "key = value config file");
  run_cmd->add_option("--set", overrides, "override a config key (key=value)");
  run_cmd->add_option("--out", out_path, "DXF output")->required();
  run_cmd->add_option("--dump-stages", dump_dir, "directory for intermediate rasters and graphs");
  run_cmd->add_option("--json-out", json_out, "final graph as JSON");

  auto* hist_cmd = app.add_subcommand("histogram", "render the 2D colour histogram");
  std::string hist_image, hist_mode = "sh", hist_out;
  int bins_x = 256, bins_y = 256;
  hist_cmd->add_option("--image", hist_image, "PNG or PPM raster")->required();
  hist_cmd->add_option("--mode", hist_mode, "sh or si")->check(CLI::IsMember({"sh", "si"}));
  hist_cmd->add_option("--out", hist_out, "PNG output")->required();
  hist_cmd->add_option("--bins-x", bins_x, "saturation bins");
  hist_cmd->add_option("--bins-y", bins_y, "hue or intensity bins");

  auto* serve_cmd = app.add_subcommand("serve", "run the HTTP service");
  std::string host = "127.0.0.1", serve_config;
  int port = 8080;
  std::size_t max_upload_mb = 64;
  serve_cmd->add_option("--host", host, "bind address");
  serve_cmd->add_option("--port", port, "bind port");
  serve_cmd->add_option("--config", serve_config, "default config for runs");
  serve_cmd->add_option("--max-upload-mb", max_upload_mb, "upload size cap");

  app.add_subcommand("config", "print the default configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  if (*run_cmd) {
    return guarded([&] {
      const auto selection = parse_selection(read_text(selection_path));
      const auto cfg = build_config(config_path, overrides, selection.mode);
      const auto image = io::load_image(image_path);
      const auto run = run_pipeline(image, selection, cfg);
      io::write_file(out_path, run.dxf);
      if (!json_out.empty()) io::write_file(json_out, write_json(run.final_graph));
      if (!dump_dir.empty()) dump_stages(run, dump_dir);
      std::cout << "arcs " << run.final_graph.arcs().size() << ", nodes " << run.final_graph.nodes().size()
                << ", components " << run.final_graph.components().size() << "\n";
    });
  }
  if (*hist_cmd) {
    return guarded([&] {
      const auto image = io::load_image(hist_image);
      const auto hist = build_histogram(image, parse_mode(hist_mode), BinGrid{bins_x, bins_y});
      io::write_file(hist_out, io::encode_png(render_histogram(hist)));
    });
  }
  if (*serve_cmd) {
    return guarded([&] {
      ServiceOptions options;
      if (!serve_config.empty()) options.defaults = load_config(serve_config);
      options.max_upload_bytes = max_upload_mb << 20;
      Service service(options);
      std::cerr << "listening on " << host << ":" << port << "\n";
      if (!service.listen(host, port)) throw IoError("cannot bind " + host + ":" + std::to_string(port));
    });
  }
  std::cout << format_config(PipelineConfig{});
  return 0;
}
