#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "glassfrac/analysis.hpp"

namespace glassfrac {

namespace {

template <typename Get>
StageStats stats_of(std::span<const StageTimings> samples, Get get) {
  StageStats s{get(samples[0]), 0.0, get(samples[0])};
  double sum = 0.0;
  for (const StageTimings& t : samples) {
    const double v = get(t);
    s.min_ms = std::min(s.min_ms, v);
    s.max_ms = std::max(s.max_ms, v);
    sum += v;
  }
  // Clamp guards against the mean rounding outside [min, max].
  s.mean_ms = std::clamp(sum / static_cast<double>(samples.size()), s.min_ms, s.max_ms);
  return s;
}

nlohmann::json stats_json(const StageStats& s) {
  return {{"min", s.min_ms}, {"mean", s.mean_ms}, {"max", s.max_ms}};
}

}  // namespace

TimingReport summarize_timings(std::span<const StageTimings> samples, std::size_t particle_count) {
  if (samples.empty()) throw std::invalid_argument("no timing samples");
  TimingReport r;
  r.particle_count = particle_count;
  r.runs = static_cast<int>(samples.size());
  r.simulate = stats_of(samples, [](const StageTimings& t) { return t.simulate_ms; });
  r.rasterize = stats_of(samples, [](const StageTimings& t) { return t.rasterize_ms; });
  r.render = stats_of(samples, [](const StageTimings& t) { return t.render_ms; });
  r.total = stats_of(samples, [](const StageTimings& t) { return t.total_ms(); });
  return r;
}

TimingReport timing_report(const PipelineConfig& config, int runs, const RgbImage& source) {
  if (runs < 1) throw std::invalid_argument("runs must be at least 1");
  const RgbImage frame = source.pixels.empty() ? synthetic_frame(config.width, config.height) : source;
  (void)corrupt_image(frame, config, config.seed);  // warm-up
  std::vector<StageTimings> samples;
  samples.reserve(static_cast<std::size_t>(runs));
  for (int i = 0; i < runs; ++i) {
    samples.push_back(corrupt_image(frame, config, config.seed + static_cast<std::uint64_t>(i)).timings);
  }
  return summarize_timings(samples, config.particle_count);
}

std::vector<TimingReport> particle_sweep(const PipelineConfig& config,
                                         std::span<const std::size_t> particle_counts, int runs,
                                         const RgbImage& source) {
  std::vector<TimingReport> reports;
  for (std::size_t count : particle_counts) {
    PipelineConfig c = config;
    c.particle_count = count;
    reports.push_back(timing_report(c, runs, source));
  }
  return reports;
}

nlohmann::json TimingReport::to_json() const {
  return {{"particle_count", particle_count},
          {"runs", runs},
          {"unit", "ms"},
          {"simulate", stats_json(simulate)},
          {"rasterize", stats_json(rasterize)},
          {"render", stats_json(render)},
          {"total", stats_json(total)}};
}

std::string TimingReport::to_table() const {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "particles %zu, runs %d\n%-10s %10s %10s %10s\n", particle_count,
                runs, "stage", "min ms", "mean ms", "max ms");
  out += buf;
  const std::pair<const char*, const StageStats*> rows[] = {
      {"simulate", &simulate}, {"rasterize", &rasterize}, {"render", &render}, {"total", &total}};
  for (const auto& [name, s] : rows) {
    std::snprintf(buf, sizeof buf, "%-10s %10.2f %10.2f %10.2f\n", name, s->min_ms, s->mean_ms,
                  s->max_ms);
    out += buf;
  }
  return out;
}

}  // namespace glassfrac
