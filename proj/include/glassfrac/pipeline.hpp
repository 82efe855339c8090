#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "glassfrac/crack_raster.hpp"
#include "glassfrac/image.hpp"
#include "glassfrac/mesh_gen.hpp"
#include "glassfrac/pbr_overlay.hpp"
#include "glassfrac/stress_sim.hpp"

namespace glassfrac {

inline constexpr std::size_t kDefaultParticleCount = 10000;
inline constexpr double kDefaultOverlapThreshold = 0.1;
inline constexpr int kDefaultFrameWidth = 1242;
inline constexpr int kDefaultFrameHeight = 375;

struct PipelineConfig {
  std::size_t particle_count = kDefaultParticleCount;
  double force = kDefaultForce;
  double stop_threshold = kDefaultStopThreshold;
  double critical_stress = kDefaultCriticalStress;
  double safety_factor = kDefaultSafetyFactor;
  /// Unset: 1.5 x expected particle spacing.
  std::optional<double> radius;
  int branch_k = kDefaultBranchCount;
  double decay = kDefaultDecay;
  RenderConfig render;
  std::uint64_t seed = 0;
  /// Image file or directory of images.
  std::filesystem::path input;
  std::optional<std::filesystem::path> annotation_dir;
  std::filesystem::path output_dir = "glassfrac_out";
  /// Growth frames written per image when > 0.
  int frame_count = 0;
  /// Worker threads; 0 picks GLASSFRAC_THREADS or the hardware concurrency.
  int threads = 0;
  double overlap_threshold = kDefaultOverlapThreshold;
  /// Frame size for runs without a source image (simulate, bench).
  int width = kDefaultFrameWidth;
  int height = kDefaultFrameHeight;
  /// Wall-clock timings make manifests differ between runs; off gives
  /// byte-reproducible manifests.
  bool record_timings = true;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
  double radius_for(Extent extent) const;
};

/// Reads a JSON config; unknown keys are rejected. Throws NotFoundError or
/// ParseError.
PipelineConfig load_config(const std::filesystem::path& path);
/// Overlays the keys present in `doc` onto `base`. Throws ParseError.
PipelineConfig config_from_json(const nlohmann::json& doc, PipelineConfig base = {});
nlohmann::json config_to_json(const PipelineConfig& config);

struct BoundingBox {
  std::string class_label;
  double left = 0.0;
  double top = 0.0;
  double right = 0.0;
  double bottom = 0.0;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// KITTI label file: class token first, 2D box at fields 4-7. Blank lines are
/// skipped. Throws NotFoundError for a missing file and ParseError listing every
/// malformed line.
std::vector<BoundingBox> load_annotations(const std::filesystem::path& path);
std::vector<BoundingBox> parse_annotations(const std::string& text);

/// Fraction of the box's pixels (after clipping to the mask) that are set.
double mask_overlap(const BoundingBox& box, const BinaryMask& mask);

/// Boxes with mask_overlap >= overlap_threshold. Throws std::invalid_argument
/// for a threshold outside [0, 1].
std::vector<BoundingBox> objects_in_crack(const std::vector<BoundingBox>& boxes,
                                          const BinaryMask& mask, double overlap_threshold);

struct StageTimings {
  double simulate_ms = 0.0;
  double rasterize_ms = 0.0;
  double render_ms = 0.0;
  double total_ms() const { return simulate_ms + rasterize_ms + render_ms; }
};

/// Impact point and vector drawn from `seed` for a frame of the given size.
ImpactSpec random_impact(const PipelineConfig& config, Extent extent, std::uint64_t seed);

/// Everything produced for one image.
struct Corruption {
  ImpactSpec impact;
  StressField field;
  CrackPattern pattern;
  CrackImage crack;
  std::vector<Rgb> shading;
  OverlayResult overlay;
  StageTimings timings;
  ParticleSet particles;
};

/// Runs the crack simulation only (sampling, index, mesh, propagation, MST).
struct Simulation {
  ImpactSpec impact;
  StressField field;
  CrackPattern pattern;
  ParticleSet particles;
};
Simulation simulate_crack(const PipelineConfig& config, Extent extent, std::uint64_t seed);

/// Full mesh -> stress -> raster -> overlay chain on one source image.
Corruption corrupt_image(const RgbImage& source, const PipelineConfig& config, std::uint64_t seed);

/// Growth frames of a corruption composited onto `source`, one per frame.
/// Throws std::invalid_argument for frame_count < 1.
std::vector<RgbImage> render_frames(const RgbImage& source, const Corruption& corruption,
                                    const PipelineConfig& config, int frame_count);

/// <prefix>_frame_NNN.png, 1-based.
std::string frame_file_name(const std::string& prefix, int index);

struct ManifestEntry {
  std::string input;
  std::string status;  // "ok" or "skipped"
  std::string reason;
  std::string output;
  std::string mask;
  std::string pattern;
  std::string shading;
  std::vector<std::string> frames;
  std::uint64_t seed = 0;
  ImpactSpec impact;
  StageTimings timings;
  std::optional<std::vector<BoundingBox>> objects;
};

struct RunManifest {
  std::vector<ManifestEntry> images;
  nlohmann::json to_json(bool include_timings) const;
};

/// Image files (png/jpg/jpeg) under `input`, lexicographic by filename; a
/// regular file is returned on its own.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& input);

/// Processes every input image with seed base_seed + index and writes
/// <stem>_adv.png, <stem>_mask.png, <stem>_pattern.json, <stem>_shading.json
/// and manifest.json into output_dir. Unreadable images are skipped and noted.
/// Throws std::invalid_argument when no input images are found.
RunManifest run_batch(const PipelineConfig& config);

/// config.threads (hardware concurrency when 0), capped by GLASSFRAC_THREADS.
int resolve_thread_count(const PipelineConfig& config);

/// Deterministic stand-in camera frame for runs without an input image.
RgbImage synthetic_frame(int width, int height);

/// Command-line entry; returns the process exit code.
int cli_main(int argc, const char* const* argv);

}  // namespace glassfrac
