#include "doctest.h"
#include "lanescan/error.hpp"
#include "lanescan/session.hpp"
#include "lanescan/synth.hpp"
#include "support.hpp"

using namespace lanescan;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Two-lane plate: lane 1 has spots at rf 0.25 / 0.7, lane 2 a single spot.
PlateSpec two_lane_spec() {
  PlateSpec spec;
  spec.width = 80;
  spec.height = 240;
  spec.lanes.push_back(LaneSpec{5, 35, 220, 20, {{0.25, 120.0, 4.0}, {0.7, 60.0, 4.0}}});
  spec.lanes.push_back(LaneSpec{45, 75, 220, 20, {{0.5, 90.0, 5.0}}});
  return spec;
}

fs::path make_plate(const fs::path& dir) {
  const auto plate = generate_plate(two_lane_spec(), 0);
  const auto path = dir / "plate.png";
  write_file(path, encode_png(plate.image));
  return path;
}

// Crop covers rows 0..239; index = 239 - row.  Seed row 220 -> idx 19,
// front row 20 -> idx 219.  Spot rows: 170 (idx 69), 80 (idx 159), 120 (idx 119).
json session_json() {
  return {{"image", "plate.png"},
          {"baseline", "raw"},
          {"runs",
           {{{"rect_clicks", {{5.2, 0.0}, {34.8, 239.0}}},
             {"seed_click_y", 220.0},
             {"front_click_y", 20.0},
             {"peak_clicks", {{{53.0, 0.0}, {85.0, 0.0}}, {{143.0, 0.0}, {175.0, 0.0}}}},
             {"comments", "lane one"}},
            {{"rect_clicks", {{74.9, 239.0}, {45.0, 0.0}}},
             {"seed_click_y", 220.0},
             {"front_click_y", 20.0},
             {"peak_clicks", {{{99.0, 0.0}, {139.0, 0.0}}}}}}}};
}

std::string field_of(const json& j) {
  try {
    parse_session(j, "/base");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaViolation);
    return e.field().value_or("");
  }
  return "accepted";
}

}  // namespace

TEST_CASE("session files parse and resolve the image next to them") {
  const SessionFile s = parse_session(session_json(), "/base/dir");
  CHECK(s.image == fs::path("/base/dir/plate.png"));
  CHECK(s.rotation_degrees == 0.0);
  REQUIRE(s.runs.size() == 2);
  CHECK(s.runs[0].peak_clicks.size() == 2);
  CHECK(s.runs[0].comments == "lane one");
  CHECK(s.runs[1].comments.empty());

  json abs = session_json();
  abs["image"] = "/elsewhere/p.png";
  CHECK(parse_session(abs, "/base").image == fs::path("/elsewhere/p.png"));

  const SessionFile back = parse_session(to_json(s), "/ignored");
  CHECK(back.image == s.image);
  CHECK(back.runs.size() == 2);
  CHECK(back.runs[0].peak_clicks[1].end.x == 175.0);
}

TEST_CASE("schema errors name the offending field") {
  json j = session_json();
  j["runs"][1]["peak_clicks"][0][1] = {1.0};
  CHECK(field_of(j) == "runs[1].peak_clicks[0][1]");

  j = session_json();
  j["runs"][0].erase("seed_click_y");
  CHECK(field_of(j) == "runs[0].seed_click_y");

  j = session_json();
  j["runs"][0]["front_click_y"] = "top";
  CHECK(field_of(j) == "runs[0].front_click_y");

  j = session_json();
  j["baseline"] = "cubic";
  CHECK(field_of(j) == "baseline");

  j = session_json();
  j["runs"] = json::array();
  CHECK(field_of(j) == "runs");

  j = session_json();
  j.erase("image");
  CHECK(field_of(j) == "image");

  CHECK(field_of(json::array()) != "accepted");
}

TEST_CASE("load_session reports unreadable and malformed files") {
  const auto dir = test_support::scratch_dir("session_load");
  try {
    load_session(dir / "absent.json");
    FAIL("expected FileUnreadable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FileUnreadable);
  }
  test_support::write_text(dir / "bad.json", "{ not json");
  try {
    load_session(dir / "bad.json");
    FAIL("expected SchemaViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaViolation);
  }
}

TEST_CASE("run_session writes the full bundle") {
  const auto dir = test_support::scratch_dir("session_run");
  make_plate(dir);
  test_support::write_text(dir / "session.json", session_json().dump());
  const auto result = run_session(load_session(dir / "session.json"), AnalysisOptions{});

  CHECK(result.output_dir == dir / "plate");
  for (const char* name : {"grayscale.png", "chromatogram_run1.png", "chromatogram_run1.svg", "results_run1.txt",
                           "chromatogram_run2.png", "chromatogram_run2.svg", "results_run2.txt"}) {
    CHECK_MESSAGE(fs::exists(dir / "plate" / name), name);
  }
  REQUIRE(result.reports.size() == 2);
  const auto& lane1 = result.reports[0].peaks;
  REQUIRE(lane1.size() == 2);
  CHECK(lane1[0].percent == doctest::Approx(200.0 / 3.0).epsilon(0.01));
  CHECK(lane1[0].rf == doctest::Approx(0.25).epsilon(0.02));
  CHECK(lane1[1].rf == doctest::Approx(0.7).epsilon(0.02));
  CHECK(result.reports[1].peaks.at(0).percent == doctest::Approx(100.0));
  CHECK(result.reports[1].peaks.at(0).rf == doctest::Approx(0.5).epsilon(0.02));

  const auto parsed = parse_report(test_support::read_text(dir / "plate" / "results_run1.txt"));
  CHECK(parsed.image_name == "plate.png");
  CHECK(parsed.comments == "lane one");

  CHECK(summary_table(result.reports).find("run") != std::string::npos);
}

TEST_CASE("a failing run leaves no partial bundle and names the run") {
  const auto dir = test_support::scratch_dir("session_fail");
  make_plate(dir);
  json j = session_json();
  j["runs"][1]["peak_clicks"] = {{{99.0, 0.0}, {139.0, 0.0}}, {{120.0, 0.0}, {150.0, 0.0}}};
  test_support::write_text(dir / "session.json", j.dump());
  try {
    run_session(load_session(dir / "session.json"), AnalysisOptions{});
    FAIL("expected OverlappingPeaks");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OverlappingPeaks);
    CHECK(std::string(e.what()).rfind("run 2: ", 0) == 0);
  }
  CHECK_FALSE(fs::exists(dir / "plate"));
}

TEST_CASE("baseline override and explicit output folder") {
  const auto dir = test_support::scratch_dir("session_override");
  make_plate(dir);
  test_support::write_text(dir / "session.json", session_json().dump());
  AnalysisOptions opts;
  opts.baseline_override = BaselineMode::LinearChord;
  opts.out_dir = dir / "custom" / "nested";
  const auto result = run_session(load_session(dir / "session.json"), opts);
  CHECK(result.output_dir == dir / "custom" / "nested");
  CHECK(parse_report(test_support::read_text(dir / "custom" / "nested" / "results_run2.txt")).baseline ==
        BaselineMode::LinearChord);
  CHECK_FALSE(fs::exists(dir / "plate"));
}

TEST_CASE("rotation is applied before the lane is cut") {
  const auto dir = test_support::scratch_dir("session_rotation");
  make_plate(dir);
  json j = session_json();
  j["rotation_degrees"] = 0.0;
  test_support::write_text(dir / "a.json", j.dump());
  j.erase("rotation_degrees");
  test_support::write_text(dir / "b.json", j.dump());
  AnalysisOptions oa;
  oa.out_dir = dir / "a";
  AnalysisOptions ob;
  ob.out_dir = dir / "b";
  run_session(load_session(dir / "a.json"), oa);
  run_session(load_session(dir / "b.json"), ob);
  CHECK(test_support::read_text(dir / "a" / "results_run1.txt") ==
        test_support::read_text(dir / "b" / "results_run1.txt"));

  // A half turn moves lane 1 to the right-hand side upside down; the lower
  // mark (old front) now acts as the seed, mirroring the rf values.
  j["rotation_degrees"] = 180.0;
  j["runs"][0]["rect_clicks"] = {{45.0, 0.0}, {74.9, 239.0}};
  j["runs"][0]["seed_click_y"] = 19.0;
  j["runs"][0]["front_click_y"] = 219.0;
  j["runs"][0]["peak_clicks"] = {{{64.0, 0.0}, {96.0, 0.0}}, {{154.0, 0.0}, {186.0, 0.0}}};
  j["runs"].erase(1);
  test_support::write_text(dir / "c.json", j.dump());
  AnalysisOptions oc;
  oc.out_dir = dir / "c";
  const auto rotated = run_session(load_session(dir / "c.json"), oc);
  REQUIRE(rotated.reports[0].peaks.size() == 2);
  CHECK(rotated.reports[0].peaks[1].percent == doctest::Approx(200.0 / 3.0).epsilon(0.01));
  CHECK(rotated.reports[0].peaks[0].rf == doctest::Approx(0.3).epsilon(0.02));
  CHECK(rotated.reports[0].peaks[1].rf == doctest::Approx(0.75).epsilon(0.02));
}
