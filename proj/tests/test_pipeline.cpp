#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "glassfrac/errors.hpp"
#include "glassfrac/pipeline.hpp"
#include "oracles.hpp"

using namespace glassfrac;
namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

PipelineConfig small_config(const fs::path& in, const fs::path& out) {
  PipelineConfig cfg;
  cfg.particle_count = 2000;
  cfg.input = in;
  cfg.output_dir = out;
  cfg.seed = 40;
  cfg.record_timings = false;
  return cfg;
}

fs::path image_dir(const std::string& name, int count) {
  const fs::path dir = oracle::temp_dir(name);
  for (int i = 0; i < count; ++i) {
    write_png(dir / ("img" + std::to_string(i) + ".png"), synthetic_frame(200 + 10 * i, 120));
  }
  return dir;
}

// Left half of the frame set.
BinaryMask half_mask(int w, int h) {
  BinaryMask m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w / 2; ++x) m.set(x, y, true);
  }
  return m;
}

}  // namespace

TEST_CASE("config JSON round trip and overrides") {
  PipelineConfig cfg;
  cfg.particle_count = 1234;
  cfg.radius = 7.5;
  cfg.render.focus_mode = FocusMode::short_focus;
  cfg.annotation_dir = fs::path("labels");
  const PipelineConfig back = config_from_json(config_to_json(cfg));
  CHECK(back.particle_count == 1234);
  CHECK(back.radius == 7.5);
  CHECK(back.render.focus_mode == FocusMode::short_focus);
  CHECK(back.render.effective_blur_sigma() == 4.0);
  CHECK_FALSE(back.render.blur_sigma.has_value());
  CHECK(back.annotation_dir == fs::path("labels"));
  CHECK(config_to_json(back) == config_to_json(cfg));

  const PipelineConfig partial = config_from_json(nlohmann::json::parse(R"({"force": 800})"));
  CHECK(partial.force == 800.0);
  CHECK(partial.stop_threshold == 300.0);
  CHECK(partial.particle_count == 10000);

  const PipelineConfig nulls = config_from_json(
      nlohmann::json::parse(R"({"annotation_dir": null, "render": {"blur_sigma": null}})"), back);
  CHECK_FALSE(nulls.annotation_dir.has_value());
  CHECK_FALSE(nulls.render.blur_sigma.has_value());
}

TEST_CASE("config rejects unknown keys and bad values") {
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"forse": 1})")), ParseError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"render": {"blurr": 1}})")), ParseError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"force": "big"})")), ParseError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"render": {"focus_mode": "mid"}})")),
                  ParseError);
  CHECK_THROWS_AS(load_config("/nonexistent/glassfrac.json"), NotFoundError);
  PipelineConfig cfg;
  cfg.decay = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.particle_count = 2;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("config light directions are normalized") {
  const PipelineConfig cfg = config_from_json(
      nlohmann::json::parse(R"({"render": {"light": {"azimuth": [3, 4], "zenith": [0, 2, 5]}}})"));
  CHECK(cfg.render.light.azimuth_dir.x == doctest::Approx(0.6));
  CHECK(cfg.render.light.zenith_dir.y == doctest::Approx(1.0));
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("KITTI label parsing") {
  const auto boxes = parse_annotations(
      "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 46.70 -1.59\n"
      "\n"
      "Pedestrian 0.00 0 0.21 423.17 173.67 433.17 224.03 1.87 0.50 0.90 -5.12 1.85 24.17 0.00\n");
  REQUIRE(boxes.size() == 2);
  CHECK(boxes[0] == BoundingBox{"Car", 587.01, 173.33, 614.12, 200.12});
  CHECK(boxes[1].class_label == "Pedestrian");
  CHECK(parse_annotations("").empty());
}

TEST_CASE("malformed labels are reported with line numbers") {
  try {
    parse_annotations("Car 0 0 0 10 10 20 20\nCar 0 0 0 30 10 20 20\nVan 0 0\nCar 0 0 0 1 2 x 4\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.lines() == std::vector<std::size_t>{2, 3, 4});
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(load_annotations("/nonexistent/000000.txt"), NotFoundError);
}

TEST_CASE("objects in crack thresholds") {
  const BinaryMask full(100, 50, true);
  const BoundingBox inside{"Car", 10, 10, 30, 30};
  CHECK(objects_in_crack({inside}, full, 0.5).size() == 1);

  const BinaryMask empty(100, 50);
  CHECK(objects_in_crack({inside}, empty, 0.01).empty());

  // Box spanning x in [40, 60): 10 of its 20 columns lie in the left half.
  const BinaryMask half = half_mask(100, 50);
  const BoundingBox straddle{"Van", 40, 10, 60, 30};
  CHECK(mask_overlap(straddle, half) == 0.5);
  CHECK(objects_in_crack({straddle}, half, 0.4).size() == 1);
  CHECK(objects_in_crack({straddle}, half, 0.6).empty());
  CHECK_THROWS_AS(objects_in_crack({straddle}, half, 1.5), std::invalid_argument);
}

TEST_CASE("objects in crack is monotone in the threshold") {
  const BinaryMask half = half_mask(100, 50);
  std::vector<BoundingBox> boxes;
  for (int i = 0; i < 20; ++i) boxes.push_back({"Car", 5.0 * i, 5, 5.0 * i + 17, 40});
  std::size_t prev = boxes.size() + 1;
  for (double t = 0.0; t <= 1.0; t += 0.05) {
    const auto hits = objects_in_crack(boxes, half, t);
    CHECK(hits.size() <= prev);
    prev = hits.size();
  }
}

TEST_CASE("boxes are clipped to the frame") {
  const BinaryMask full(100, 50, true);
  CHECK(mask_overlap({"Car", -20, -20, 10, 10}, full) == 1.0);
  CHECK(mask_overlap({"Car", 200, 10, 220, 20}, full) == 0.0);
}

TEST_CASE("list_images sorts by filename and filters extensions") {
  const fs::path dir = oracle::temp_dir("list");
  for (const char* name : {"b.png", "a.JPG", "c.jpeg", "notes.txt", "d.bmp"}) write_file(dir / name, "x");
  const auto images = list_images(dir);
  REQUIRE(images.size() == 3);
  CHECK(images[0].filename() == "a.JPG");
  CHECK(images[1].filename() == "b.png");
  CHECK(images[2].filename() == "c.jpeg");
  CHECK_THROWS_AS(list_images(dir / "missing"), NotFoundError);
}

TEST_CASE("batch: three images get distinct derived seeds") {
  const fs::path in = image_dir("batch3_in", 3);
  const fs::path out = oracle::temp_dir("batch3_out");
  const RunManifest m = run_batch(small_config(in, out));
  REQUIRE(m.images.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(m.images[i].seed == 40 + i);
    CHECK(m.images[i].status == "ok");
    CHECK(fs::exists(out / m.images[i].output));
    CHECK(fs::exists(out / m.images[i].mask));
    CHECK(fs::exists(out / m.images[i].pattern));
    CHECK(fs::exists(out / m.images[i].shading));
  }
  const auto doc = nlohmann::json::parse(oracle::read_file(out / "manifest.json"));
  CHECK(doc.at("images").size() == 3);
  CHECK(doc.at("images")[1].at("input") == "img1.png");
  CHECK(doc.at("images")[1].at("impact").at("point").size() == 2);
  CHECK_FALSE(doc.at("images")[0].contains("timings_ms"));
  const RgbImage adv = read_image(out / "img2_adv.png");
  CHECK(adv.width == 220);
}

TEST_CASE("batch: reruns and pool widths give identical bytes") {
  const fs::path in = image_dir("det_in", 4);
  std::vector<fs::path> outs;
  for (int threads : {1, 4, 1}) {
    const fs::path out = oracle::temp_dir("det_out_" + std::to_string(outs.size()));
    PipelineConfig cfg = small_config(in, out);
    cfg.threads = threads;
    run_batch(cfg);
    outs.push_back(out);
  }
  for (const auto& entry : fs::directory_iterator(outs[0])) {
    const std::string name = entry.path().filename().string();
    const std::string ref = oracle::read_file(entry.path());
    for (std::size_t k = 1; k < outs.size(); ++k) CHECK(oracle::read_file(outs[k] / name) == ref);
  }
}

TEST_CASE("batch: unreadable images are skipped and recorded") {
  const fs::path in = image_dir("skip_in", 2);
  write_file(in / "broken.png", "not a png");
  const fs::path out = oracle::temp_dir("skip_out");
  const RunManifest m = run_batch(small_config(in, out));
  REQUIRE(m.images.size() == 3);
  CHECK(m.images[0].input == "broken.png");
  CHECK(m.images[0].status == "skipped");
  CHECK_FALSE(m.images[0].reason.empty());
  CHECK(m.images[1].status == "ok");
  const auto doc = nlohmann::json::parse(oracle::read_file(out / "manifest.json"));
  CHECK(doc.at("images")[0].at("status") == "skipped");
}

TEST_CASE("batch: empty input is an error") {
  const fs::path in = oracle::temp_dir("empty_in");
  CHECK_THROWS_AS(run_batch(small_config(in, oracle::temp_dir("empty_out"))), std::invalid_argument);
}

TEST_CASE("batch: annotations and frames") {
  const fs::path in = image_dir("ann_in", 1);
  const fs::path labels = oracle::temp_dir("ann_labels");
  // A box covering the whole frame always overlaps a nonempty crack.
  write_file(labels / "img0.txt", "Car 0 0 0 0 0 200 120\nTruck 0 0 0 0 0 1 1\n");
  const fs::path out = oracle::temp_dir("ann_out");
  PipelineConfig cfg = small_config(in, out);
  cfg.annotation_dir = labels;
  cfg.overlap_threshold = 0.0001;
  cfg.frame_count = 3;
  const RunManifest m = run_batch(cfg);
  REQUIRE(m.images[0].objects.has_value());
  const auto& objects = *m.images[0].objects;
  REQUIRE_FALSE(objects.empty());
  CHECK(objects[0].class_label == "Car");
  CHECK(m.images[0].frames.size() == 3);
  CHECK(fs::exists(out / "img0_frame_003.png"));
  CHECK(read_image(out / "img0_frame_003.png") == read_image(out / "img0_adv.png"));
}

TEST_CASE("thread count resolution") {
  PipelineConfig cfg;
  cfg.threads = 3;
  unsetenv("GLASSFRAC_THREADS");
  CHECK(resolve_thread_count(cfg) == 3);
  setenv("GLASSFRAC_THREADS", "2", 1);
  CHECK(resolve_thread_count(cfg) == 2);
  setenv("GLASSFRAC_THREADS", "junk", 1);
  CHECK(resolve_thread_count(cfg) == 3);
  unsetenv("GLASSFRAC_THREADS");
  cfg.threads = 0;
  CHECK(resolve_thread_count(cfg) >= 1);
}

TEST_CASE("random impact is seeded and inside the frame") {
  PipelineConfig cfg;
  const ImpactSpec a = random_impact(cfg, {1242, 375}, 5);
  const ImpactSpec b = random_impact(cfg, {1242, 375}, 5);
  CHECK(a.impact_point == b.impact_point);
  CHECK(a.impact_vector == b.impact_vector);
  CHECK_NOTHROW(a.validate({1242, 375}));
  CHECK(random_impact(cfg, {1242, 375}, 6).impact_point != a.impact_point);
}

TEST_CASE("image IO round trip") {
  const fs::path dir = oracle::temp_dir("io");
  const RgbImage img = synthetic_frame(64, 48);
  write_png(dir / "a.png", img);
  CHECK(read_image(dir / "a.png") == img);
  CHECK_THROWS_AS(read_image(dir / "missing.png"), NotFoundError);
  write_file(dir / "bad.jpg", "garbage");
  CHECK_THROWS(read_image(dir / "bad.jpg"));
}
