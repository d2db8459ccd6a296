// lanescan: thin-layer chromatography densitometry from the command line.
//
//   lanescan analyze <session.json> [--baseline raw|linear] [--out-dir DIR]
//   lanescan synth <spec.json> <out.png> <manifest.json> [--seed N]
//   lanescan serve [--port N] [--state-dir DIR]
//
// Exit status: 0 success, 2 schema or usage error, 3 analysis error,
// 4 environment error (unreadable input, unwritable output, bind failure).

#include <pthread.h>
#include <signal.h>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "lanescan/error.hpp"
#include "lanescan/image.hpp"
#include "lanescan/report.hpp"
#include "lanescan/service.hpp"
#include "lanescan/session.hpp"
#include "lanescan/synth.hpp"

namespace fs = std::filesystem;
using lanescan::Error;
using lanescan::ErrorCode;

namespace {

constexpr int kExitSchema = 2;
constexpr int kExitAnalysis = 3;
constexpr int kExitEnvironment = 4;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SchemaViolation:
    case ErrorCode::SpecOutOfBounds:
      return kExitSchema;
    case ErrorCode::FileUnreadable:
    case ErrorCode::IoError:
      return kExitEnvironment;
    default:
      return kExitAnalysis;
  }
}

int report_error(const Error& e) {
  std::cerr << "error [" << lanescan::code_name(e.code()) << "]: " << e.what() << "\n";
  switch (e.code()) {
    case ErrorCode::DegenerateSelection:
      std::cerr << "hint: rect_clicks must be two opposite corners in different rows and columns\n";
      break;
    case ErrorCode::CoincidentMarks:
      std::cerr << "hint: seed_click_y and front_click_y must round to different rows of the crop\n";
      break;
    case ErrorCode::OverlappingPeaks:
      std::cerr << "hint: peak intervals may share an endpoint but must not overlap\n";
      break;
    default:
      break;
  }
  return exit_code_for(e.code());
}

int cmd_analyze(const std::string& session_path, const std::optional<std::string>& baseline,
                const std::optional<std::string>& out_dir) {
  try {
    const lanescan::SessionFile session = lanescan::load_session(session_path);
    lanescan::AnalysisOptions options;
    if (baseline) options.baseline_override = lanescan::parse_baseline(*baseline);
    if (out_dir) options.out_dir = fs::path(*out_dir);
    const auto result = lanescan::run_session(session, options);
    std::cout << lanescan::summary_table(result.reports);
    std::cout << "output: " << result.output_dir.string() << "\n";
    return 0;
  } catch (const Error& e) {
    return report_error(e);
  }
}

int cmd_synth(const std::string& spec_path, const std::string& out_image, const std::string& manifest_path,
              std::uint64_t seed) {
  try {
    std::ifstream in(spec_path);
    if (!in) throw Error(ErrorCode::FileUnreadable, "cannot read plate spec: " + spec_path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::SchemaViolation, "plate spec is not valid JSON: " + std::string(e.what()));
    }
    const lanescan::PlateSpec spec = lanescan::plate_spec_from_json(j);
    const auto plate = lanescan::generate_plate(spec, seed);
    lanescan::write_file(out_image, lanescan::encode_png(plate.image));
    const std::string manifest = lanescan::manifest_json(spec, plate.truth, seed).dump(2) + "\n";
    lanescan::write_file(manifest_path, std::span(reinterpret_cast<const std::uint8_t*>(manifest.data()),
                                                  manifest.size()));
    std::cout << "wrote " << out_image << " (" << spec.width << "x" << spec.height << ") and "
              << manifest_path << "\n";
    return 0;
  } catch (const Error& e) {
    return report_error(e);
  }
}

int cmd_serve(const std::string& host, int port, std::string state_dir, const std::optional<std::string>& ui_dir,
              std::size_t max_upload_mb, int idle_minutes) {
  if (const char* env = std::getenv("LANESCAN_STATE_DIR"); env && *env) state_dir = env;

  // Signals are consumed by a dedicated thread so the handler can stop the
  // server outside of async-signal context.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  lanescan::ServiceConfig config;
  config.state_dir = state_dir;
  config.max_upload_bytes = max_upload_mb * 1024u * 1024u;
  config.idle_timeout = std::chrono::minutes(idle_minutes);
  if (ui_dir) config.static_dir = fs::path(*ui_dir);

  std::error_code ec;
  fs::create_directories(config.state_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create state directory " << state_dir << ": " << ec.message() << "\n";
    return kExitEnvironment;
  }

  lanescan::AnalysisService service(config);
  service.set_request_logger([](const std::string& line) { std::cerr << line << std::endl; });
  const int bound = service.bind(host, port);
  if (bound < 0) {
    std::cerr << "error: cannot bind " << host << ":" << port << "\n";
    return kExitEnvironment;
  }
  std::cerr << "listening on http://" << host << ":" << bound << " (state: " << state_dir << ")" << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    service.stop();
  });
  service.listen();
  // Wake the waiter if the server stopped on its own.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  std::cerr << "shut down" << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thin-layer chromatography lane densitometry"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "Replay a recorded session file and write the output bundle");
  std::string session_path;
  std::optional<std::string> baseline;
  std::optional<std::string> out_dir;
  analyze->add_option("session", session_path, "Session JSON file")->required();
  analyze->add_option("--baseline", baseline, "Override the session baseline")
      ->check(CLI::IsMember({"raw", "linear"}));
  analyze->add_option("--out-dir", out_dir, "Write the bundle here instead of next to the image");

  auto* synth = app.add_subcommand("synth", "Render a synthetic plate and its ground-truth manifest");
  std::string spec_path;
  std::string out_image;
  std::string manifest_path;
  std::uint64_t seed = 0;
  synth->add_option("spec", spec_path, "Plate spec JSON")->required();
  synth->add_option("out_image", out_image, "Output PNG")->required();
  synth->add_option("manifest", manifest_path, "Output ground-truth JSON")->required();
  synth->add_option("--seed", seed, "Noise RNG seed");

  auto* serve = app.add_subcommand("serve", "Run the interactive analysis HTTP API");
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string state_dir = "lanescan-state";
  std::optional<std::string> ui_dir;
  std::size_t max_upload_mb = 32;
  int idle_minutes = 30;
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--port", port, "Listen port (0 picks a free port)")->check(CLI::Range(0, 65535));
  serve->add_option("--state-dir", state_dir, "Where finalized bundles are written (LANESCAN_STATE_DIR overrides)");
  serve->add_option("--ui-dir", ui_dir, "Static browser assets to serve at /");
  serve->add_option("--max-upload-mb", max_upload_mb, "Upload size limit in MiB")->check(CLI::PositiveNumber);
  serve->add_option("--idle-timeout-min", idle_minutes, "Evict sessions idle this long")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitSchema;
  }

  if (*analyze) return cmd_analyze(session_path, baseline, out_dir);
  if (*synth) return cmd_synth(spec_path, out_image, manifest_path, seed);
  return cmd_serve(host, port, state_dir, ui_dir, max_upload_mb, idle_minutes);
}
