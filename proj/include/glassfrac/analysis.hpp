#pragma once

// Distribution shift between image sets and per-stage runtime statistics.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "glassfrac/image.hpp"
#include "glassfrac/pipeline.hpp"

namespace glassfrac {

inline constexpr std::size_t kHistogramBins = 256;
inline constexpr double kDefaultSmoothingEpsilon = 1e-6;

/// Smoothed luma histogram: bins[i] = (count_i + eps) / (N + bins * eps).
struct IntensityDistribution {
  std::vector<double> bins;
  std::uint64_t sample_count = 0;
  double smoothing_epsilon = kDefaultSmoothingEpsilon;
};

/// Pools every pixel of every image. Throws std::invalid_argument for an empty
/// list or epsilon <= 0.
IntensityDistribution intensity_histogram(std::span<const GrayImage> images,
                                          double epsilon = kDefaultSmoothingEpsilon);

/// Smoothed distribution from raw bin counts (any bin count >= 1).
IntensityDistribution distribution_from_counts(std::span<const std::uint64_t> counts,
                                               double epsilon = kDefaultSmoothingEpsilon);

/// sum p_i ln(p_i / q_i), natural log. Throws std::invalid_argument on a bin
/// count mismatch or a non-positive q_i where p_i > 0.
double kl_divergence(const IntensityDistribution& p, const IntensityDistribution& q);

struct KlReport {
  double kl_ab = 0.0;
  double kl_ba = 0.0;
  std::size_t bins = kHistogramBins;
  double epsilon = kDefaultSmoothingEpsilon;
  std::size_t images_a = 0;
  std::size_t images_b = 0;

  nlohmann::json to_json() const;
  std::string to_table() const;
};

/// Pooled luma histograms of two image folders compared both ways.
/// Throws NotFoundError for a missing folder and std::invalid_argument for a
/// folder without readable images.
KlReport compare_folders(const std::filesystem::path& set_a, const std::filesystem::path& set_b,
                         double epsilon = kDefaultSmoothingEpsilon);

struct StageStats {
  double min_ms = 0.0;
  double mean_ms = 0.0;
  double max_ms = 0.0;
};

struct TimingReport {
  std::size_t particle_count = 0;
  int runs = 0;
  StageStats simulate;
  StageStats rasterize;
  StageStats render;
  StageStats total;

  nlohmann::json to_json() const;
  std::string to_table() const;
};

/// Min / mean / max per stage. Throws std::invalid_argument for no samples.
TimingReport summarize_timings(std::span<const StageTimings> samples, std::size_t particle_count);

/// Runs the single-image pipeline `runs` times on `source` (a synthetic frame
/// of config.width x config.height when empty) with seeds config.seed + i,
/// after one discarded warm-up run. Throws std::invalid_argument for runs < 1.
TimingReport timing_report(const PipelineConfig& config, int runs, const RgbImage& source = {});

/// timing_report for each particle count.
std::vector<TimingReport> particle_sweep(const PipelineConfig& config,
                                         std::span<const std::size_t> particle_counts, int runs,
                                         const RgbImage& source = {});

}  // namespace glassfrac
