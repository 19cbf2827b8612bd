#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <string>

#include "vectra/pipeline.hpp"

namespace vectra {

struct ServiceOptions {
  std::size_t max_upload_bytes = 64u << 20;
  std::size_t max_sessions = 32;             ///< least recently used sessions are evicted beyond this
  std::size_t max_runs_per_session = 8;      ///< oldest runs are dropped beyond this
  std::chrono::seconds session_ttl{3600};    ///< idle sessions expire after this
  PipelineConfig defaults;                   ///< base for every run's config
};

/// Extraction preview: the source blended halfway to white, with mask pixels
/// painted pure red.
RgbImage render_preview(const RgbImage& image, const BinaryMask& mask);

/// HTTP front end for interactive sessions. Each session holds one image,
/// one selection and its recent runs; runs within a session are serialised.
class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and serves until stop(). Returns false if binding fails.
  bool listen(const std::string& host, int port);
  /// Binds to an ephemeral port and returns it, or -1.
  int bind_any_port(const std::string& host);
  /// Serves on the socket bound by bind_any_port until stop().
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

  std::size_t session_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vectra
