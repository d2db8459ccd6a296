#include "lanescan/service.hpp"

#include <sys/socket.h>

#include <atomic>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <random>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "json_fields.hpp"
#include "lanescan/chromatogram.hpp"
#include "lanescan/error.hpp"
#include "lanescan/image.hpp"
#include "lanescan/lane.hpp"
#include "lanescan/peaks.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace lanescan {

namespace {

struct HttpError {
  int status;
  std::string code;
  std::string message;
  std::optional<std::string> field;
};

struct RunState {
  LaneCrop crop;
  std::optional<Chromatogram> chromatogram;  // present once marks are set
  std::optional<std::vector<PeakResult>> peaks;
  BaselineMode baseline = BaselineMode::Raw;
  std::string comments;
  bool stale = false;  // rotation changed after the rect was selected
};

struct Session {
  Session(std::string name, RgbImage img, GrayImage g)
      : image_name(std::move(name)), original(std::move(img)), gray(std::move(g)) {}

  std::mutex mu;
  std::string id;
  std::string image_name;
  RgbImage original;
  GrayImage gray;
  double rotation_degrees = 0.0;
  std::vector<RunState> runs;  // run_id = index + 1
  std::vector<std::string> finalized_files;
  std::optional<fs::path> output_dir;
};

struct Entry {
  std::shared_ptr<Session> session;
  std::chrono::steady_clock::time_point last_access;
};

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnsupportedFormat: return 415;
    case ErrorCode::IoError:
    case ErrorCode::FileUnreadable: return 500;
    default: return 422;
  }
}

json error_body(const std::string& code, const std::string& message, const std::optional<std::string>& field) {
  json body = {{"code", code}, {"message", message}};
  if (field) body["field"] = *field;
  return body;
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json peak_json(const PeakResult& p) {
  return {{"number", p.number},  {"start_idx", p.bounds.start_idx}, {"end_idx", p.bounds.end_idx},
          {"area", p.area},      {"percent", p.percent},             {"apex_idx", p.apex_idx},
          {"rf", p.rf}};
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw HttpError{400, "malformed_json", std::string("request body is not valid JSON: ") + e.what(), std::nullopt};
  }
}

std::string content_type_for(const std::string& name) {
  const auto ext = fs::path(name).extension().string();
  if (ext == ".png") return "image/png";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".txt") return "text/plain; charset=utf-8";
  return "application/octet-stream";
}

}  // namespace

struct AnalysisService::Impl {
  explicit Impl(ServiceConfig c) : config(std::move(c)), rng(std::random_device{}()) { install_routes(); }

  ServiceConfig config;
  httplib::Server server;
  Logger logger = [](const std::string& line) { std::fprintf(stderr, "%s\n", line.c_str()); };

  mutable std::mutex map_mu;
  std::unordered_map<std::string, Entry> sessions;
  std::mt19937_64 rng;  // guarded by map_mu
  std::atomic<bool> bound{false};

  std::string new_session_id() {
    std::ostringstream out;
    out << std::hex << std::setfill('0') << std::setw(16) << rng() << std::setw(16) << rng();
    return out.str();
  }

  std::shared_ptr<Session> find(const std::string& id) {
    std::lock_guard lock(map_mu);
    const auto it = sessions.find(id);
    if (it == sessions.end()) {
      throw HttpError{404, "unknown_session", "no session with id " + id, std::nullopt};
    }
    it->second.last_access = std::chrono::steady_clock::now();
    return it->second.session;
  }

  std::size_t evict(std::chrono::steady_clock::time_point now) {
    std::lock_guard lock(map_mu);
    return std::erase_if(sessions, [&](const auto& kv) { return now - kv.second.last_access > config.idle_timeout; });
  }

  static RunState& find_run(Session& s, const std::string& rid_text) {
    std::size_t rid = 0;
    try {
      rid = std::stoul(rid_text);
    } catch (const std::exception&) {
      rid = 0;
    }
    if (rid < 1 || rid > s.runs.size()) {
      throw HttpError{404, "unknown_run", "no run " + rid_text + " in this session", std::nullopt};
    }
    return s.runs[rid - 1];
  }

  static void require_current(const RunState& run) {
    if (run.stale) {
      throw HttpError{409, "rect_required",
                      "the image rotation changed after this lane was selected; select the lane again",
                      std::nullopt};
    }
  }

  static void require_marks(const RunState& run) {
    require_current(run);
    if (!run.chromatogram) {
      throw HttpError{409, "marks_required", "mark the seed point and solvent front first", std::nullopt};
    }
  }

  using Body = std::function<void(const httplib::Request&, httplib::Response&)>;

  httplib::Server::Handler guarded(Body body) {
    return [body = std::move(body)](const httplib::Request& req, httplib::Response& res) {
      try {
        body(req, res);
      } catch (const HttpError& e) {
        send_json(res, e.status, error_body(e.code, e.message, e.field));
      } catch (const Error& e) {
        send_json(res, status_for(e.code()), error_body(std::string(code_name(e.code())), e.what(), e.field()));
      } catch (const std::exception& e) {
        send_json(res, 500, error_body("internal", e.what(), std::nullopt));
      }
    };
  }

  // Runs `fn` with the session locked.
  template <typename Fn>
  Body with_session(Fn fn) {
    return [this, fn](const httplib::Request& req, httplib::Response& res) {
      const auto session = find(req.matches[1]);
      std::lock_guard lock(session->mu);
      fn(*session, req, res);
    };
  }

  void create_session(const httplib::Request& req, httplib::Response& res) {
    std::string bytes;
    std::string name;
    if (req.is_multipart_form_data()) {
      if (req.files.empty()) {
        throw HttpError{422, "schema_violation", "multipart upload carries no file", std::string("image")};
      }
      const auto& file = req.has_file("image") ? req.get_file_value("image") : req.files.begin()->second;
      bytes = file.content;
      name = file.filename;
    } else {
      bytes = req.body;
      name = req.has_param("name") ? req.get_param_value("name") : req.get_header_value("X-Image-Name");
    }
    if (bytes.size() > config.max_upload_bytes) {
      throw HttpError{413, "payload_too_large", "upload exceeds the configured size limit", std::nullopt};
    }
    name = fs::path(name).filename().string();
    if (name.empty() || name == "." || name == ".." || fs::path(name).stem().empty()) name = "image.png";

    RgbImage original = decode_image(
        std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
    GrayImage gray = to_grayscale(original);
    auto session = std::make_shared<Session>(name, std::move(original), std::move(gray));

    std::string id;
    {
      std::lock_guard lock(map_mu);
      do {
        id = new_session_id();
      } while (sessions.contains(id));
      session->id = id;
      sessions.emplace(id, Entry{session, std::chrono::steady_clock::now()});
    }
    send_json(res, 201, {{"session_id", id}, {"width", session->gray.width()}, {"height", session->gray.height()}});
  }

  void set_rotation(Session& s, const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = req.body.empty() ? json::object() : json::parse(req.body);
    } catch (const json::out_of_range&) {
      throw Error(ErrorCode::NonFiniteAngle, "rotation angle must be finite", std::string("degrees"));
    } catch (const json::exception& e) {
      throw HttpError{400, "malformed_json", std::string("request body is not valid JSON: ") + e.what(), std::nullopt};
    }
    const auto& degrees = json_fields::member(body, "degrees", "");
    if (degrees.is_null()) {
      // JSON has no NaN or Infinity; browsers serialize both as null.
      throw Error(ErrorCode::NonFiniteAngle, "rotation angle must be finite", std::string("degrees"));
    }
    if (!degrees.is_number()) json_fields::fail("degrees", "expected a number");
    const double angle = degrees.get<double>();

    s.gray = rotate(to_grayscale(s.original), angle);
    s.rotation_degrees = angle;
    for (RunState& run : s.runs) {
      run.stale = true;
      run.chromatogram.reset();
      run.peaks.reset();
    }
    send_json(res, 200, {{"width", s.gray.width()}, {"height", s.gray.height()}, {"degrees", angle}});
  }

  void preview(Session& s, const httplib::Request&, httplib::Response& res) {
    const auto png = encode_png(s.gray);
    res.status = 200;
    res.set_content(std::string(png.begin(), png.end()), "image/png");
  }

  void create_run(Session& s, const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    const auto [a, b] = json_fields::point_pair(json_fields::member(body, "rect_clicks", ""), "rect_clicks");
    const LaneRect rect = make_rect(a, b, s.gray.width(), s.gray.height());
    s.runs.push_back(RunState{crop(s.gray, rect), std::nullopt, std::nullopt, BaselineMode::Raw, {}, false});
    send_json(res, 201, {{"run_id", s.runs.size()},
                         {"crop_width", rect.width()},
                         {"crop_height", rect.height()},
                         {"rect", {{"x0", rect.x0}, {"y0", rect.y0}, {"x1", rect.x1}, {"y1", rect.y1}}}});
  }

  static json run_json(std::size_t run_id, const RunState& run) {
    const LaneRect& r = run.crop.rect;
    json out = {{"run_id", run_id},
                {"crop_width", r.width()},
                {"crop_height", r.height()},
                {"rect", {{"x0", r.x0}, {"y0", r.y0}, {"x1", r.x1}, {"y1", r.y1}}},
                {"completed", run.peaks.has_value()}};
    if (run.crop.marks) {
      out["marks"] = {{"seed_row", run.crop.marks->seed_row}, {"front_row", run.crop.marks->front_row}};
    }
    if (run.peaks) {
      json peaks = json::array();
      for (const auto& p : *run.peaks) peaks.push_back(peak_json(p));
      out["peaks"] = peaks;
      out["baseline"] = std::string(to_string(run.baseline));
      out["comments"] = run.comments;
    }
    return out;
  }

  void get_run(Session& s, const httplib::Request& req, httplib::Response& res) {
    RunState& run = find_run(s, req.matches[2]);
    require_current(run);
    send_json(res, 200, run_json(std::stoul(req.matches[2].str()), run));
  }

  void set_marks(Session& s, const httplib::Request& req, httplib::Response& res) {
    RunState& run = find_run(s, req.matches[2]);
    require_current(run);
    const json body = parse_body(req);
    const double seed_y = json_fields::number(body, "seed_click_y", "");
    const double front_y = json_fields::number(body, "front_click_y", "");
    const LaneMarks marks = make_marks(seed_y, front_y, run.crop.rect.height());
    run.crop.marks = marks;
    run.chromatogram = compute_profile(run.crop);
    run.peaks.reset();
    send_json(res, 200, {{"seed_row", marks.seed_row}, {"front_row", marks.front_row}});
  }

  void chromatogram(Session& s, const httplib::Request& req, httplib::Response& res) {
    RunState& run = find_run(s, req.matches[2]);
    require_marks(run);
    const Chromatogram& c = *run.chromatogram;
    send_json(res, 200, {{"signal", std::vector<double>(c.signal().begin(), c.signal().end())},
                         {"seed_idx", c.seed_idx()},
                         {"front_idx", c.front_idx()}});
  }

  RunReport report_for(const Session& s, std::size_t run_id, const RunState& run) const {
    return RunReport{s.image_name, static_cast<int>(run_id), run.comments, run.baseline,
                     *run.crop.marks, run.crop.rect, *run.peaks};
  }

  void set_peaks(Session& s, const httplib::Request& req, httplib::Response& res) {
    RunState& run = find_run(s, req.matches[2]);
    require_marks(run);
    const json body = parse_body(req);
    const auto& clicks_json = json_fields::array(body, "peak_clicks", "");
    std::vector<PeakClick> clicks;
    for (std::size_t k = 0; k < clicks_json.size(); ++k) {
      const auto [a, b] = json_fields::point_pair(clicks_json[k], json_fields::index("peak_clicks", k));
      clicks.push_back({a, b});
    }
    BaselineMode mode = BaselineMode::Raw;
    if (body.contains("baseline")) {
      const std::string text = json_fields::string(body, "baseline", "");
      if (text != "raw" && text != "linear") json_fields::fail("baseline", "expected \"raw\" or \"linear\"");
      mode = parse_baseline(text);
    }
    std::string comments = body.contains("comments") ? json_fields::string(body, "comments", "") : std::string();

    auto peaks = analyze_run(*run.chromatogram, clicks, mode);
    run.peaks = std::move(peaks);
    run.baseline = mode;
    run.comments = std::move(comments);

    const std::size_t run_id = std::stoul(req.matches[2].str());
    json out_peaks = json::array();
    for (const auto& p : *run.peaks) out_peaks.push_back(peak_json(p));
    send_json(res, 200, {{"peaks", out_peaks}, {"report_text", format_report(report_for(s, run_id, run))}});
  }

  void finalize(Session& s, const httplib::Request&, httplib::Response& res) {
    std::vector<std::size_t> done;
    for (std::size_t i = 0; i < s.runs.size(); ++i) {
      if (!s.runs[i].stale && s.runs[i].peaks) done.push_back(i);
    }
    if (done.empty()) {
      throw HttpError{409, "no_completed_runs", "complete at least one run before finalizing", std::nullopt};
    }

    const fs::path session_root = config.state_dir / s.id;
    std::error_code ec;
    fs::create_directories(session_root, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + session_root.string() + ": " + ec.message());
    const fs::path dir = output_dir_for(session_root / s.image_name);

    std::vector<std::string> files;
    std::vector<std::string> vector_files;
    files.push_back(write_grayscale(dir, s.gray).filename().string());
    for (std::size_t i : done) {
      const RunState& run = s.runs[i];
      const RunReport report = report_for(s, i + 1, run);
      const auto plot = write_chromatogram(dir, report.run_number,
                                           render_chromatogram(*run.chromatogram, *run.peaks, config.style));
      files.push_back(plot.png.filename().string());
      files.push_back(write_report(dir, report).filename().string());
      vector_files.push_back(plot.svg.filename().string());
    }
    s.output_dir = dir;
    s.finalized_files = files;
    s.finalized_files.insert(s.finalized_files.end(), vector_files.begin(), vector_files.end());
    send_json(res, 200, {{"output_dir", dir.string()}, {"files", files}, {"vector_files", vector_files}});
  }

  void download(Session& s, const httplib::Request& req, httplib::Response& res) {
    const std::string name = req.matches[2];
    if (!s.output_dir || std::find(s.finalized_files.begin(), s.finalized_files.end(), name) == s.finalized_files.end()) {
      throw HttpError{404, "unknown_file", "no finalized file named " + name, std::nullopt};
    }
    std::ifstream in(*s.output_dir / name, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + name);
    std::ostringstream data;
    data << in.rdbuf();
    res.status = 200;
    res.set_content(data.str(), content_type_for(name));
  }

  void install_routes() {
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    server.set_payload_max_length(config.max_upload_bytes);

    server.set_pre_routing_handler([this](const httplib::Request&, httplib::Response&) {
      evict(std::chrono::steady_clock::now());
      return httplib::Server::HandlerResponse::Unhandled;
    });

    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
      std::string code = "http_" + std::to_string(res.status);
      if (res.status == 404) code = "not_found";
      if (res.status == 413) code = "payload_too_large";
      if (res.status == 400) code = "bad_request";
      send_json(res, res.status, error_body(code, httplib::status_message(res.status), std::nullopt));
      return httplib::Server::HandlerResponse::Handled;
    });

    server.set_logger([this](const httplib::Request& req, const httplib::Response& res) {
      logger(req.method + " " + req.path + " " + std::to_string(res.status));
    });

    constexpr const char* kSession = "/sessions/([0-9a-f]+)";
    const std::string s = kSession;
    auto bind_session = [this](void (Impl::*m)(Session&, const httplib::Request&, httplib::Response&)) {
      return guarded(with_session([this, m](Session& sess, const httplib::Request& req, httplib::Response& res) {
        (this->*m)(sess, req, res);
      }));
    };

    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("ok", "text/plain");
    });
    server.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
                  create_session(req, res);
                }));
    server.Post(s + "/rotation", bind_session(&Impl::set_rotation));
    server.Get(s + "/preview\\.png", bind_session(&Impl::preview));
    server.Post(s + "/runs", bind_session(&Impl::create_run));
    server.Get(s + "/runs/([0-9]+)", bind_session(&Impl::get_run));
    server.Post(s + "/runs/([0-9]+)/marks", bind_session(&Impl::set_marks));
    server.Get(s + "/runs/([0-9]+)/chromatogram", bind_session(&Impl::chromatogram));
    server.Post(s + "/runs/([0-9]+)/peaks", bind_session(&Impl::set_peaks));
    server.Post(s + "/finalize", bind_session(&Impl::finalize));
    server.Get(s + "/files/([A-Za-z0-9_.]+)", bind_session(&Impl::download));

    if (config.static_dir) server.set_mount_point("/", config.static_dir->string());
  }
};

AnalysisService::AnalysisService(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

AnalysisService::~AnalysisService() { stop(); }

int AnalysisService::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                              : (impl_->server.bind_to_port(host, port) ? port : -1);
  impl_->bound = bound > 0;
  return bound > 0 ? bound : -1;
}

bool AnalysisService::listen() {
  if (!impl_->bound) return false;
  return impl_->server.listen_after_bind();
}

void AnalysisService::stop() { impl_->server.stop(); }

bool AnalysisService::is_running() const { return impl_->server.is_running(); }

void AnalysisService::set_request_logger(Logger logger) { impl_->logger = std::move(logger); }

std::size_t AnalysisService::session_count() const {
  std::lock_guard lock(impl_->map_mu);
  return impl_->sessions.size();
}

std::size_t AnalysisService::evict_idle(std::chrono::steady_clock::time_point now) { return impl_->evict(now); }

}  // namespace lanescan
