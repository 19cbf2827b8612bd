#include "vectra/service.hpp"

#include <list>
#include <map>
#include <mutex>
#include <optional>
#include <random>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "vectra/export.hpp"
#include "vectra/io.hpp"

namespace vectra {

RgbImage render_preview(const RgbImage& image, const BinaryMask& mask) {
  if (image.width() != mask.width() || image.height() != mask.height())
    throw ValidationError("preview mask and image sizes differ");
  RgbImage out(image.width(), image.height());
  for (std::size_t k = 0; k < image.size(); ++k) {
    if (mask.data()[k]) {
      out.data()[k] = Rgb8{255, 0, 0};
    } else {
      const auto& c = image.data()[k];
      auto dim = [](std::uint8_t v) { return static_cast<std::uint8_t>(128 + v / 2); };
      out.data()[k] = Rgb8{dim(c.r), dim(c.g), dim(c.b)};
    }
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Session {
  std::mutex mutex;
  std::optional<RgbImage> image;
  std::optional<ColorSelection> selection;
  std::map<int, std::shared_ptr<const RunArtifacts>> runs;
  int next_run = 1;
};

struct HttpError {
  int status;
  std::string message;
};

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_png(httplib::Response& res, const RgbImage& image) {
  const auto png = io::encode_png(image);
  res.status = 200;
  res.set_content(std::string(png.begin(), png.end()), "image/png");
}

nlohmann::json parse_body(const httplib::Request& req) {
  try {
    return nlohmann::json::parse(req.body);
  } catch (const nlohmann::json::exception& e) {
    throw HttpError{400, std::string("invalid JSON body: ") + e.what()};
  }
}

}  // namespace

struct Service::Impl {
  ServiceOptions options;
  httplib::Server server;
  mutable std::mutex store_mutex;
  // Most recently used session last.
  std::list<std::string> lru;
  std::map<std::string, std::pair<std::shared_ptr<Session>, Clock::time_point>> sessions;
  std::mt19937_64 rng{std::random_device{}()};

  explicit Impl(ServiceOptions opts) : options(std::move(opts)) {
    options.defaults.validate();
    server.set_payload_max_length(options.max_upload_bytes);
    routes();
  }

  void expire_locked() {
    const auto now = Clock::now();
    for (auto it = lru.begin(); it != lru.end();) {
      const auto s = sessions.find(*it);
      if (now - s->second.second > options.session_ttl) {
        sessions.erase(s);
        it = lru.erase(it);
      } else {
        ++it;
      }
    }
  }

  std::string create_session() {
    std::lock_guard lock(store_mutex);
    expire_locked();
    while (sessions.size() >= options.max_sessions && !lru.empty()) {
      sessions.erase(lru.front());
      lru.pop_front();
    }
    std::string id;
    do {
      char buf[17];
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
      id = buf;
    } while (sessions.count(id));
    sessions[id] = {std::make_shared<Session>(), Clock::now()};
    lru.push_back(id);
    return id;
  }

  std::shared_ptr<Session> session(const std::string& id) {
    std::lock_guard lock(store_mutex);
    expire_locked();
    const auto it = sessions.find(id);
    if (it == sessions.end()) throw HttpError{404, "unknown session " + id};
    it->second.second = Clock::now();
    lru.remove(id);
    lru.push_back(id);
    return it->second.first;
  }

  static std::shared_ptr<const RunArtifacts> run_of(Session& s, const std::string& run_id) {
    std::lock_guard lock(s.mutex);
    const auto it = s.runs.find(std::atoi(run_id.c_str()));
    if (it == s.runs.end()) throw HttpError{404, "unknown run " + run_id};
    return it->second;
  }

  template <typename Fn>
  static httplib::Server::Handler wrap(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const HttpError& e) {
        send_json(res, e.status, {{"error", e.message}});
      } catch (const StageError& e) {
        send_json(res, 422, {{"error", e.what()}, {"stage", e.stage()}});
      } catch (const ValidationError& e) {
        send_json(res, 400, {{"error", e.what()}});
      } catch (const IoError& e) {
        send_json(res, 400, {{"error", e.what()}});
      } catch (const std::exception& e) {
        send_json(res, 500, {{"error", e.what()}});
      }
    };
  }

  void routes() {
    server.Post("/api/session", wrap([this](const httplib::Request&, httplib::Response& res) {
                  send_json(res, 201, {{"session_id", create_session()}});
                }));

    server.Post(R"(/api/session/([0-9a-f]+)/image)",
                wrap([this](const httplib::Request& req, httplib::Response& res) {
                  auto s = session(req.matches[1]);
                  if (req.body.size() > options.max_upload_bytes) throw HttpError{413, "upload too large"};
                  auto image = io::decode_image(io::Bytes(req.body.begin(), req.body.end()));
                  if (image.empty()) throw HttpError{400, "image is empty"};
                  std::lock_guard lock(s->mutex);
                  send_json(res, 200, {{"width", image.width()}, {"height", image.height()}});
                  s->image = std::move(image);
                  s->selection.reset();
                }));

    server.Get(R"(/api/session/([0-9a-f]+)/histogram)",
               wrap([this](const httplib::Request& req, httplib::Response& res) {
                 auto s = session(req.matches[1]);
                 const auto mode =
                     req.has_param("mode") ? parse_mode(req.get_param_value("mode")) : options.defaults.mode;
                 std::lock_guard lock(s->mutex);
                 if (!s->image) throw HttpError{409, "no image uploaded"};
                 send_png(res, render_histogram(build_histogram(*s->image, mode, options.defaults.bins)));
               }));

    server.Post(R"(/api/session/([0-9a-f]+)/selection)",
                wrap([this](const httplib::Request& req, httplib::Response& res) {
                  auto s = session(req.matches[1]);
                  auto sel = selection_from_json(parse_body(req));
                  sel.validate(options.defaults.bins);
                  std::lock_guard lock(s->mutex);
                  s->selection = std::move(sel);
                  res.status = 204;
                }));

    server.Get(R"(/api/session/([0-9a-f]+)/preview)",
               wrap([this](const httplib::Request& req, httplib::Response& res) {
                 auto s = session(req.matches[1]);
                 std::lock_guard lock(s->mutex);
                 if (!s->image) throw HttpError{409, "no image uploaded"};
                 if (!s->selection) throw HttpError{409, "no selection posted"};
                 const auto mask = extract_mask(*s->image, *s->selection, options.defaults.bins);
                 send_png(res, render_preview(*s->image, mask));
               }));

    server.Post(R"(/api/session/([0-9a-f]+)/run)", wrap([this](const httplib::Request& req, httplib::Response& res) {
                  auto s = session(req.matches[1]);
                  const auto body = req.body.empty() ? nlohmann::json::object() : parse_body(req);
                  std::lock_guard lock(s->mutex);
                  if (!s->image) throw HttpError{409, "no image uploaded"};
                  if (!s->selection) throw HttpError{409, "no selection posted"};
                  auto base = options.defaults;
                  base.mode = s->selection->mode;
                  const auto cfg = config_from_json(body, base);
                  auto run = std::make_shared<const RunArtifacts>(run_pipeline(*s->image, *s->selection, cfg));
                  const int id = s->next_run++;
                  s->runs[id] = run;
                  while (s->runs.size() > options.max_runs_per_session) s->runs.erase(s->runs.begin());
                  send_json(res, 200, {{"run_id", std::to_string(id)}, {"timings", timings_json(*run)}});
                }));

    server.Get(R"(/api/session/([0-9a-f]+)/run/([0-9]+)/graph)",
               wrap([this](const httplib::Request& req, httplib::Response& res) {
                 const auto run = run_of(*session(req.matches[1]), req.matches[2]);
                 res.status = 200;
                 res.set_content(write_json(run->final_graph), "application/json");
               }));

    server.Get(R"(/api/session/([0-9a-f]+)/run/([0-9]+)/result\.dxf)",
               wrap([this](const httplib::Request& req, httplib::Response& res) {
                 const auto run = run_of(*session(req.matches[1]), req.matches[2]);
                 res.status = 200;
                 res.set_content(run->dxf, "application/dxf");
               }));

    server.Get(R"(/api/session/([0-9a-f]+)/run/([0-9]+)/stage/([a-z_]+)\.png)",
               wrap([this](const httplib::Request& req, httplib::Response& res) {
                 const auto run = run_of(*session(req.matches[1]), req.matches[2]);
                 const auto mask = run->stage_mask(req.matches[3]);
                 if (!mask) throw HttpError{404, "unknown stage " + std::string(req.matches[3])};
                 send_png(res, io::mask_to_image(*mask));
               }));
  }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Service::~Service() { stop(); }

bool Service::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int Service::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool Service::listen_after_bind() { return impl_->server.listen_after_bind(); }

void Service::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

std::size_t Service::session_count() const {
  std::lock_guard lock(impl_->store_mutex);
  return impl_->sessions.size();
}

}  // namespace vectra
