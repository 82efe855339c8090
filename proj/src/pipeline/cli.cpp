#include <fstream>
#include <iostream>
#include <memory>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"

#include "glassfrac/analysis.hpp"
#include "glassfrac/errors.hpp"
#include "glassfrac/pipeline.hpp"

namespace glassfrac {

namespace fs = std::filesystem;

namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;
constexpr int kDefaultAnimationFrames = 8;

// Pipeline flags shared by the subcommands. Only flags given on the command
// line override the config file.
struct PipelineFlags {
  std::size_t particles = 0;
  double force = 0.0;
  double threshold = 0.0;
  double critical = 0.0;
  double safety = 0.0;
  double radius = 0.0;
  int branches = 0;
  double decay = 0.0;
  std::uint64_t seed = 0;
  int width = 0;
  int height = 0;
  std::string focus;
  double blur_sigma = 0.0;
  double alpha = 0.0;
  double stroke = 0.0;
  int dilation = 0;

  std::vector<std::pair<CLI::Option*, std::function<void(PipelineConfig&)>>> setters;

  template <typename T, typename Apply>
  void add(CLI::App* app, const std::string& name, T& storage, const std::string& help, Apply apply) {
    CLI::Option* opt = app->add_option(name, storage, help);
    setters.emplace_back(opt, [&storage, apply](PipelineConfig& c) { apply(c, storage); });
  }

  void attach(CLI::App* app) {
    add(app, "--seed", seed, "Base seed", [](PipelineConfig& c, std::uint64_t v) { c.seed = v; });
    add(app, "--particles", particles, "Particle count",
        [](PipelineConfig& c, std::size_t v) { c.particle_count = v; });
    add(app, "--force", force, "Impact force", [](PipelineConfig& c, double v) { c.force = v; });
    add(app, "--threshold", threshold, "Stop threshold",
        [](PipelineConfig& c, double v) { c.stop_threshold = v; });
    add(app, "--critical-stress", critical, "Material critical stress",
        [](PipelineConfig& c, double v) { c.critical_stress = v; });
    add(app, "--safety-factor", safety, "Safety factor",
        [](PipelineConfig& c, double v) { c.safety_factor = v; });
    add(app, "--radius", radius, "Neighbor radius in pixels",
        [](PipelineConfig& c, double v) { c.radius = v; });
    add(app, "--branches", branches, "Crack arms leaving the impact point",
        [](PipelineConfig& c, int v) { c.branch_k = v; });
    add(app, "--decay", decay, "Per-hop stress decay in (0, 1)",
        [](PipelineConfig& c, double v) { c.decay = v; });
    add(app, "--width", width, "Frame width without an input image",
        [](PipelineConfig& c, int v) { c.width = v; });
    add(app, "--height", height, "Frame height without an input image",
        [](PipelineConfig& c, int v) { c.height = v; });
    add(app, "--focus", focus, "far or short",
        [](PipelineConfig& c, const std::string& v) { c.render.focus_mode = focus_mode_from_string(v); });
    add(app, "--blur-sigma", blur_sigma, "Blur sigma in pixels",
        [](PipelineConfig& c, double v) { c.render.blur_sigma = v; });
    add(app, "--alpha", alpha, "Crack opacity",
        [](PipelineConfig& c, double v) { c.render.alpha = v; });
    add(app, "--stroke", stroke, "Crack stroke width at the impact point",
        [](PipelineConfig& c, double v) { c.render.stroke_width = v; });
    add(app, "--dilation", dilation, "Mask dilation radius",
        [](PipelineConfig& c, int v) { c.render.dilation = v; });
  }

  void apply(PipelineConfig& c) const {
    for (const auto& [opt, set] : setters) {
      if (opt->count() > 0) set(c);
    }
  }
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void use_stderr_logger(int verbosity) {
  auto logger = std::make_shared<spdlog::logger>(
      "glassfrac", std::make_shared<spdlog::sinks::stderr_color_sink_mt>());
  logger->set_level(verbosity > 0 ? spdlog::level::debug
                                  : verbosity < 0 ? spdlog::level::warn : spdlog::level::info);
  spdlog::set_default_logger(std::move(logger));
}

Extent frame_extent(const PipelineConfig& c, const std::string& input) {
  if (input.empty()) return {static_cast<double>(c.width), static_cast<double>(c.height)};
  const RgbImage img = read_image(input);
  return {static_cast<double>(img.width), static_cast<double>(img.height)};
}

int run_simulate(const PipelineConfig& cfg, const std::string& input, const fs::path& out,
                 fs::path png) {
  const Extent extent = frame_extent(cfg, input);
  const Simulation sim = simulate_crack(cfg, extent, cfg.seed);
  write_text(out, pattern_to_json(sim.pattern).dump(2) + "\n");
  if (png.empty()) png = fs::path(out).replace_extension(".png");
  const CrackImage crack =
      rasterize(sim.pattern, static_cast<int>(extent.width), static_cast<int>(extent.height),
                RasterOptions{cfg.render.stroke_width, true});
  write_png(png, crack_to_gray(crack));
  spdlog::info("crack with {} nodes, {} edges -> {}, {}", sim.pattern.nodes.size(),
               sim.pattern.edges.size(), out.string(), png.string());
  return 0;
}

int run_animate(const PipelineConfig& cfg, const std::string& input, int frames) {
  const RgbImage source = input.empty() ? synthetic_frame(cfg.width, cfg.height) : read_image(input);
  const std::string prefix = input.empty() ? "synthetic" : fs::path(input).stem().string();
  const Corruption result = corrupt_image(source, cfg, cfg.seed);
  fs::create_directories(cfg.output_dir);
  const std::vector<RgbImage> images = render_frames(source, result, cfg, frames);
  for (std::size_t i = 0; i < images.size(); ++i) {
    write_png(cfg.output_dir / frame_file_name(prefix, static_cast<int>(i) + 1), images[i]);
  }
  write_text(cfg.output_dir / (prefix + "_pattern.json"),
             pattern_to_json(result.pattern).dump(2) + "\n");
  spdlog::info("{} frames -> {}", images.size(), cfg.output_dir.string());
  return 0;
}

int run_objects(const fs::path& annotations, const fs::path& mask_png, double threshold) {
  const BinaryMask mask = mask_from_gray(to_gray(read_image(mask_png)));
  nlohmann::json list = nlohmann::json::array();
  for (const BoundingBox& b : objects_in_crack(load_annotations(annotations), mask, threshold)) {
    list.push_back({{"class", b.class_label}, {"left", b.left}, {"top", b.top},
                    {"right", b.right}, {"bottom", b.bottom}, {"overlap", mask_overlap(b, mask)}});
  }
  std::cout << nlohmann::json{{"threshold", threshold}, {"objects", list}}.dump(2) << "\n";
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Physically based glass-crack corruption of camera images", "glassfrac"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  int verbosity = 0;
  app.add_option("--config", config_path, "JSON config file");
  app.add_flag("-v,--verbose", [&](std::int64_t n) { verbosity += static_cast<int>(n); },
               "More logging");
  app.add_flag("-q,--quiet", [&](std::int64_t n) { verbosity -= static_cast<int>(n); },
               "Warnings and errors only");

  // simulate
  CLI::App* simulate = app.add_subcommand("simulate", "Simulate one crack; write pattern JSON and crack PNG");
  PipelineFlags sim_flags;
  sim_flags.attach(simulate);
  std::string sim_input;
  fs::path sim_out = "pattern.json";
  fs::path sim_png;
  simulate->add_option("--in", sim_input, "Image whose size defines the frame");
  simulate->add_option("--out", sim_out, "Pattern JSON path");
  simulate->add_option("--png", sim_png, "Crack PNG path (default: --out with .png)");

  // overlay
  CLI::App* overlay = app.add_subcommand("overlay", "Corrupt one image or a folder of images");
  PipelineFlags ov_flags;
  ov_flags.attach(overlay);
  std::string ov_input;
  std::string ov_out;
  std::string ov_annotations;
  int ov_threads = 0;
  int ov_frames = 0;
  double ov_overlap = 0.0;
  bool ov_no_timings = false;
  CLI::Option* ov_in_opt = overlay->add_option("--in", ov_input, "Image file or folder");
  CLI::Option* ov_out_opt = overlay->add_option("--out-dir", ov_out, "Output folder");
  CLI::Option* ov_ann_opt =
      overlay->add_option("--annotations", ov_annotations, "Folder of KITTI label files");
  CLI::Option* ov_threads_opt = overlay->add_option("--threads", ov_threads, "Worker threads");
  CLI::Option* ov_frames_opt = overlay->add_option("--frames", ov_frames, "Growth frames per image");
  CLI::Option* ov_overlap_opt =
      overlay->add_option("--overlap", ov_overlap, "Object overlap threshold in [0, 1]");
  overlay->add_flag("--no-timings", ov_no_timings, "Leave timings out of the manifest");

  // animate
  CLI::App* animate = app.add_subcommand("animate", "Write crack growth frames for one image");
  PipelineFlags an_flags;
  an_flags.attach(animate);
  std::string an_input;
  std::string an_out;
  int an_frames = kDefaultAnimationFrames;
  animate->add_option("--in", an_input, "Image (synthetic frame when omitted)");
  CLI::Option* an_out_opt = animate->add_option("--out-dir", an_out, "Output folder");
  animate->add_option("--frames", an_frames, "Frame count")->check(CLI::PositiveNumber);

  // analyze
  CLI::App* analyze = app.add_subcommand("analyze", "Distribution and object analyses");
  analyze->require_subcommand(1);
  CLI::App* kl = analyze->add_subcommand("kl", "K-L divergence between two image folders");
  std::string set_a;
  std::string set_b;
  double epsilon = kDefaultSmoothingEpsilon;
  kl->add_option("--set-a", set_a, "First image folder")->required();
  kl->add_option("--set-b", set_b, "Second image folder")->required();
  kl->add_option("--epsilon", epsilon, "Histogram smoothing")->check(CLI::PositiveNumber);
  CLI::App* objects = analyze->add_subcommand("objects", "Annotated objects inside a crack mask");
  std::string obj_labels;
  std::string obj_mask;
  double obj_threshold = kDefaultOverlapThreshold;
  objects->add_option("--annotations", obj_labels, "KITTI label file")->required();
  objects->add_option("--mask", obj_mask, "Mask PNG")->required();
  objects->add_option("--threshold", obj_threshold, "Overlap threshold in [0, 1]");

  // bench
  CLI::App* bench = app.add_subcommand("bench", "Per-stage timing report");
  PipelineFlags bench_flags;
  bench_flags.attach(bench);
  int bench_runs = 10;
  std::string bench_input;
  std::vector<std::size_t> sweep;
  bench->add_option("--runs", bench_runs, "Timed runs after one warm-up")->check(CLI::PositiveNumber);
  bench->add_option("--in", bench_input, "Image (synthetic frame when omitted)");
  bench->add_option("--sweep", sweep, "Particle counts to sweep")->delimiter(',');

  if (argc <= 1) {
    std::cerr << app.help();
    return kUsageError;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }
  use_stderr_logger(verbosity);

  PipelineConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    for (PipelineFlags* flags : {&sim_flags, &ov_flags, &an_flags, &bench_flags}) flags->apply(cfg);
    if (ov_in_opt->count()) cfg.input = ov_input;
    if (ov_out_opt->count()) cfg.output_dir = ov_out;
    if (an_out_opt->count()) cfg.output_dir = an_out;
    if (ov_ann_opt->count()) cfg.annotation_dir = fs::path(ov_annotations);
    if (ov_threads_opt->count()) cfg.threads = ov_threads;
    if (ov_frames_opt->count()) cfg.frame_count = ov_frames;
    if (ov_overlap_opt->count()) cfg.overlap_threshold = ov_overlap;
    if (ov_no_timings) cfg.record_timings = false;
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "glassfrac: " << e.what() << "\n" << app.help();
    return kUsageError;
  }

  try {
    if (*simulate) return run_simulate(cfg, sim_input, sim_out, sim_png);
    if (*overlay) {
      if (cfg.input.empty()) {
        std::cerr << "glassfrac: overlay needs --in or an input in the config\n";
        return kUsageError;
      }
      run_batch(cfg);
      std::cout << (cfg.output_dir / "manifest.json").string() << "\n";
      return 0;
    }
    if (*animate) return run_animate(cfg, an_input, an_frames);
    if (*kl) {
      const KlReport report = compare_folders(set_a, set_b, epsilon);
      std::cout << report.to_json().dump(2) << "\n";
      std::cerr << report.to_table();
      return 0;
    }
    if (*objects) return run_objects(obj_labels, obj_mask, obj_threshold);
    if (*bench) {
      const RgbImage source = bench_input.empty() ? RgbImage{} : read_image(bench_input);
      if (sweep.empty()) {
        const TimingReport report = timing_report(cfg, bench_runs, source);
        std::cout << report.to_json().dump(2) << "\n";
        std::cerr << report.to_table();
      } else {
        nlohmann::json list = nlohmann::json::array();
        for (const TimingReport& r : particle_sweep(cfg, sweep, bench_runs, source)) {
          list.push_back(r.to_json());
          std::cerr << r.to_table() << "\n";
        }
        std::cout << nlohmann::json{{"sweep", list}}.dump(2) << "\n";
      }
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return kUsageError;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kRuntimeError;
  }
  std::cerr << app.help();
  return kUsageError;
}

}  // namespace glassfrac
