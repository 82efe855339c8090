#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "glassfrac/pipeline.hpp"
#include "glassfrac/rng.hpp"

namespace glassfrac {

namespace {

// Sub-streams of a per-image seed.
constexpr std::uint64_t kParticleStream = 0;
constexpr std::uint64_t kImpactStream = 1;

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

}  // namespace

ImpactSpec random_impact(const PipelineConfig& config, Extent extent, std::uint64_t seed) {
  Rng rng(mix_seed(seed, kImpactStream));
  ImpactSpec impact;
  impact.impact_point = {rng.uniform(0.0, extent.width), rng.uniform(0.0, extent.height)};
  const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  impact.impact_vector = {std::cos(angle), std::sin(angle)};
  impact.force = config.force;
  impact.critical_stress = config.critical_stress;
  impact.safety_factor = config.safety_factor;
  impact.stop_threshold = config.stop_threshold;
  return impact;
}

Simulation simulate_crack(const PipelineConfig& config, Extent extent, std::uint64_t seed) {
  config.validate();
  ParticleSet particles =
      sample_particles(config.particle_count, extent, mix_seed(seed, kParticleStream));
  const NeighborIndex index(particles);
  const TriMesh mesh = triangulate(particles);
  const ImpactSpec impact = random_impact(config, extent, seed);
  StressField field =
      propagate(mesh, index, impact, config.radius_for(extent), config.branch_k, config.decay);
  CrackPattern pattern = extract_crack_pattern(field, particles, impact);
  return Simulation{impact, std::move(field), std::move(pattern), std::move(particles)};
}

Corruption corrupt_image(const RgbImage& source, const PipelineConfig& config, std::uint64_t seed) {
  if (source.width <= 0 || source.height <= 0) {
    throw std::invalid_argument("source image is empty");
  }
  const Extent extent{static_cast<double>(source.width), static_cast<double>(source.height)};
  Corruption out;

  auto start = Clock::now();
  Simulation sim = simulate_crack(config, extent, seed);
  out.timings.simulate_ms = elapsed_ms(start);
  out.impact = sim.impact;
  out.field = std::move(sim.field);
  out.pattern = std::move(sim.pattern);
  out.particles = std::move(sim.particles);

  start = Clock::now();
  out.crack = rasterize(out.pattern, source.width, source.height,
                        RasterOptions{config.render.stroke_width, true});
  BinaryMask mask = crack_mask(out.crack, config.render.dilation);
  out.timings.rasterize_ms = elapsed_ms(start);

  start = Clock::now();
  out.shading = shade_pattern(out.pattern, config.render.light);
  out.overlay = composite(source, out.crack, out.shading, mask, config.render);
  out.timings.render_ms = elapsed_ms(start);
  return out;
}

std::vector<RgbImage> render_frames(const RgbImage& source, const Corruption& corruption,
                                    const PipelineConfig& config, int frame_count) {
  if (frame_count < 1) throw std::invalid_argument("frame count must be at least 1");
  std::vector<RgbImage> frames;
  for (const CrackPattern& pattern :
       crack_frames(corruption.field, corruption.particles, corruption.impact, frame_count)) {
    const CrackImage crack = rasterize(pattern, source.width, source.height,
                                       RasterOptions{config.render.stroke_width, true});
    const BinaryMask mask = crack_mask(crack, config.render.dilation);
    const std::vector<Rgb> shading = shade_pattern(pattern, config.render.light);
    frames.push_back(composite(source, crack, shading, mask, config.render).image);
  }
  return frames;
}

std::string frame_file_name(const std::string& prefix, int index) {
  char suffix[32];
  std::snprintf(suffix, sizeof suffix, "_frame_%03d.png", index);
  return prefix + suffix;
}

RgbImage synthetic_frame(int width, int height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("frame size must be positive");
  RgbImage img(width, height);
  const int horizon = height * 2 / 5;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      int r = 0, g = 0, b = 0;
      if (y < horizon) {
        // Sky gradient.
        r = 110 + 60 * y / std::max(1, horizon);
        g = 150 + 50 * y / std::max(1, horizon);
        b = 215;
      } else {
        // Road with a faint texture and a dashed center line.
        const int shade = 70 + 40 * (y - horizon) / std::max(1, height - horizon);
        const int grain = static_cast<int>((static_cast<unsigned>(x) * 73856093u ^
                                            static_cast<unsigned>(y) * 19349663u) % 9u) - 4;
        r = g = b = shade + grain;
        const int center = width / 2;
        const int half = 1 + 4 * (y - horizon) / std::max(1, height - horizon);
        if (std::abs(x - center) <= half && (y / 12) % 2 == 0) r = g = b = 225;
      }
      img.at(x, y, 0) = static_cast<std::uint8_t>(std::clamp(r, 0, 255));
      img.at(x, y, 1) = static_cast<std::uint8_t>(std::clamp(g, 0, 255));
      img.at(x, y, 2) = static_cast<std::uint8_t>(std::clamp(b, 0, 255));
    }
  }
  return img;
}

}  // namespace glassfrac
