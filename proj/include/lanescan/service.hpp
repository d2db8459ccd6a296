#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "lanescan/report.hpp"

namespace lanescan {

struct ServiceConfig {
  std::filesystem::path state_dir = "lanescan-state";
  std::size_t max_upload_bytes = 32u * 1024u * 1024u;
  std::chrono::seconds idle_timeout{30 * 60};
  std::optional<std::filesystem::path> static_dir;  // browser assets mounted at "/"
  PlotStyle style;
};

/// Stateful HTTP API mirroring the interactive workflow: upload, rotate,
/// select a lane, mark seed and front, pick peaks, finalize.
///
/// Sessions live in memory and are evicted after `idle_timeout` without a
/// request. Requests against one session are serialized; different sessions
/// proceed concurrently.
class AnalysisService {
 public:
  using Logger = std::function<void(const std::string& line)>;

  explicit AnalysisService(ServiceConfig config);
  ~AnalysisService();
  AnalysisService(const AnalysisService&) = delete;
  AnalysisService& operator=(const AnalysisService&) = delete;

  /// Binds the listening socket. Port 0 picks a free port. Returns the bound
  /// port, or -1 when binding fails.
  int bind(const std::string& host, int port);

  /// Serves until stop() is called. Requires a successful bind().
  bool listen();
  void stop();
  bool is_running() const;

  /// Receives one line per handled request.
  void set_request_logger(Logger logger);

  std::size_t session_count() const;
  /// Drops sessions idle for longer than the configured timeout.
  std::size_t evict_idle(std::chrono::steady_clock::time_point now);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace lanescan
