#include <doctest.h>

#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "support.hpp"
#include "vectra/export.hpp"
#include "vectra/io.hpp"
#include "vectra/service.hpp"

using namespace vectra;

namespace {

class Server {
 public:
  explicit Server(ServiceOptions options = {}) : service_(std::move(options)) {
    port_ = service_.bind_any_port("127.0.0.1");
    REQUIRE(port_ > 0);
    thread_ = std::thread([this] { service_.listen_after_bind(); });
    service_.wait_until_ready();
  }
  ~Server() {
    service_.stop();
    thread_.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(60, 0);
    return c;
  }
  Service& service() { return service_; }

 private:
  Service service_;
  int port_ = -1;
  std::thread thread_;
};

std::string png_of(const RgbImage& img) {
  const auto bytes = io::encode_png(img);
  return std::string(bytes.begin(), bytes.end());
}

RgbImage decode(const std::string& body) { return io::decode_png(io::Bytes(body.begin(), body.end())); }

std::string new_session(httplib::Client& c) {
  const auto res = c.Post("/api/session");
  REQUIRE(res);
  REQUIRE(res->status == 201);
  return nlohmann::json::parse(res->body).at("session_id").get<std::string>();
}

}  // namespace

TEST_CASE("service end to end") {
  Server server;
  auto c = server.client();
  const auto map = testing::make_river_map(160, 1, 4);
  const auto sel = testing::selection_around(map.river_color, 8, 2);

  const auto sid = new_session(c);
  CHECK(sid.size() == 16);
  const std::string base = "/api/session/" + sid;

  SUBCASE("missing image and selection give 409") {
    CHECK(c.Get(base + "/histogram")->status == 409);
    CHECK(c.Get(base + "/preview")->status == 409);
    CHECK(c.Post(base + "/run", "{}", "application/json")->status == 409);
  }

  auto up = c.Post(base + "/image", png_of(map.image), "image/png");
  REQUIRE(up);
  REQUIRE(up->status == 200);
  CHECK(nlohmann::json::parse(up->body) == nlohmann::json{{"width", 160}, {"height", 160}});

  SUBCASE("histogram") {
    const auto res = c.Get(base + "/histogram?mode=si");
    REQUIRE(res->status == 200);
    CHECK(res->get_header_value("Content-Type") == "image/png");
    const auto img = decode(res->body);
    CHECK(img.width() == 256);
    CHECK(decode(c.Get(base + "/histogram")->body) ==
          render_histogram(build_histogram(map.image, ProjectionMode::SaturationHue)));
    CHECK(c.Get(base + "/histogram?mode=xx")->status == 400);
  }

  SUBCASE("selection, preview and run") {
    CHECK(c.Post(base + "/preview", "", "text/plain")->status == 404);
    CHECK(c.Get(base + "/preview")->status == 409);
    const auto bad = c.Post(base + "/selection", R"({"mode":"sh","rect":[0,0,999,1]})", "application/json");
    CHECK(bad->status == 400);
    const auto ok = c.Post(base + "/selection", to_json(sel).dump(), "application/json");
    CHECK(ok->status == 204);

    const auto prev = c.Get(base + "/preview");
    REQUIRE(prev->status == 200);
    const auto shown = decode(prev->body);
    const auto mask = extract_mask(map.image, sel);
    CHECK(shown == render_preview(map.image, mask));
    for (int y = 0; y < shown.height(); ++y)
      for (int x = 0; x < shown.width(); ++x) CHECK((shown(x, y) == Rgb8{255, 0, 0}) == (mask(x, y) != 0));

    const auto run = c.Post(base + "/run", R"({"trim": 2})", "application/json");
    REQUIRE(run->status == 200);
    const auto rj = nlohmann::json::parse(run->body);
    const auto rid = rj.at("run_id").get<std::string>();
    CHECK(rj.at("timings").size() == 15);

    const auto expected = run_pipeline(map.image, sel, PipelineConfig{});
    const auto dxf = c.Get(base + "/run/" + rid + "/result.dxf");
    REQUIRE(dxf->status == 200);
    CHECK(dxf->body == expected.dxf);
    const auto graph = c.Get(base + "/run/" + rid + "/graph");
    REQUIRE(graph->status == 200);
    CHECK(read_json(graph->body) == expected.final_graph);

    for (const auto& name : stage_names()) {
      const auto st = c.Get(base + "/run/" + rid + "/stage/" + name + ".png");
      REQUIRE(st->status == 200);
      CHECK(decode(st->body) == io::mask_to_image(*expected.stage_mask(name)));
    }
    CHECK(c.Get(base + "/run/" + rid + "/stage/bogus.png")->status == 404);
    CHECK(c.Get(base + "/run/999/result.dxf")->status == 404);

    const auto failing = c.Post(base + "/run", R"({"layer": "A;B"})", "application/json");
    CHECK(failing->status == 422);
    CHECK(nlohmann::json::parse(failing->body).at("stage") == "export");
    CHECK(c.Post(base + "/run", R"({"nonsense": 1})", "application/json")->status == 400);
    CHECK(c.Post(base + "/run", "not json", "application/json")->status == 400);

    // A new image clears the selection.
    c.Post(base + "/image", png_of(map.image), "image/png");
    CHECK(c.Get(base + "/preview")->status == 409);
  }

  SUBCASE("bad uploads") {
    CHECK(c.Post(base + "/image", "garbage", "image/png")->status == 400);
    CHECK(c.Get("/api/session/0123456789abcdef/histogram")->status == 404);
  }
}

TEST_CASE("service limits") {
  ServiceOptions opt;
  opt.max_upload_bytes = 1000;
  opt.max_sessions = 2;
  Server server(opt);
  auto c = server.client();
  const auto a = new_session(c);
  const auto big = c.Post("/api/session/" + a + "/image", std::string(5000, 'x'), "image/png");
  REQUIRE(big);
  CHECK(big->status == 413);

  new_session(c);
  new_session(c);
  CHECK(server.service().session_count() == 2);
  CHECK(c.Get("/api/session/" + a + "/preview")->status == 404);
}

TEST_CASE("render_preview") {
  RgbImage img(2, 1, Rgb8{0, 100, 255});
  BinaryMask m(2, 1);
  m(1, 0) = 1;
  const auto p = render_preview(img, m);
  CHECK(p(0, 0) == Rgb8{128, 178, 255});
  CHECK(p(1, 0) == Rgb8{255, 0, 0});
}
