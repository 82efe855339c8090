#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>

#include <spdlog/spdlog.h>

#include "glassfrac/errors.hpp"
#include "glassfrac/pipeline.hpp"

namespace glassfrac {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool is_image_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

json box_to_json(const BoundingBox& b) {
  return {{"class", b.class_label}, {"left", b.left}, {"top", b.top}, {"right", b.right},
          {"bottom", b.bottom}};
}

// Output prefix per input. Stems shared by several inputs keep their extension.
std::vector<std::string> output_prefixes(const std::vector<fs::path>& inputs) {
  std::map<std::string, int> seen;
  for (const fs::path& p : inputs) ++seen[p.stem().string()];
  std::vector<std::string> out;
  for (const fs::path& p : inputs) {
    out.push_back(seen[p.stem().string()] > 1 ? p.filename().string() : p.stem().string());
  }
  return out;
}

void process_one(const PipelineConfig& config, const fs::path& input, const std::string& prefix,
                 ManifestEntry& entry) {
  RgbImage source;
  try {
    source = read_image(input);
  } catch (const std::exception& e) {
    spdlog::warn("skipping {}: {}", input.string(), e.what());
    entry.status = "skipped";
    entry.reason = e.what();
    return;
  }

  Corruption result;
  try {
    result = corrupt_image(source, config, entry.seed);
  } catch (const std::exception& e) {
    spdlog::warn("skipping {}: {}", input.string(), e.what());
    entry.status = "skipped";
    entry.reason = e.what();
    return;
  }
  entry.impact = result.impact;
  entry.timings = result.timings;

  entry.output = prefix + "_adv.png";
  entry.mask = prefix + "_mask.png";
  entry.pattern = prefix + "_pattern.json";
  entry.shading = prefix + "_shading.json";
  write_png(config.output_dir / entry.output, result.overlay.image);
  write_png(config.output_dir / entry.mask, mask_to_gray(result.overlay.mask));
  write_text(config.output_dir / entry.pattern, pattern_to_json(result.pattern).dump(2) + "\n");
  write_text(config.output_dir / entry.shading,
             shading_to_json(result.pattern, result.shading).dump(2) + "\n");

  if (config.frame_count > 0) {
    const std::vector<RgbImage> frames = render_frames(source, result, config, config.frame_count);
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const std::string name = frame_file_name(prefix, static_cast<int>(i) + 1);
      write_png(config.output_dir / name, frames[i]);
      entry.frames.push_back(name);
    }
  }

  if (config.annotation_dir) {
    const fs::path labels = *config.annotation_dir / (input.stem().string() + ".txt");
    try {
      entry.objects =
          objects_in_crack(load_annotations(labels), result.overlay.mask, config.overlap_threshold);
    } catch (const NotFoundError&) {
      spdlog::debug("no annotations for {}", input.string());
    } catch (const ParseError& e) {
      spdlog::warn("ignoring annotations for {}: {}", input.string(), e.what());
    }
  }
  entry.status = "ok";
}

}  // namespace

std::vector<fs::path> list_images(const fs::path& input) {
  if (!fs::exists(input)) throw NotFoundError("input not found: " + input.string());
  if (!fs::is_directory(input)) return {input};
  std::vector<fs::path> images;
  for (const auto& entry : fs::directory_iterator(input)) {
    if (entry.is_regular_file() && is_image_extension(entry.path())) images.push_back(entry.path());
  }
  std::sort(images.begin(), images.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  return images;
}

int resolve_thread_count(const PipelineConfig& config) {
  int count = config.threads > 0 ? config.threads
                                 : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("GLASSFRAC_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) {
      count = std::min<long>(count, cap);
    } else {
      spdlog::warn("ignoring GLASSFRAC_THREADS='{}'", env);
    }
  }
  return count;
}

json RunManifest::to_json(bool include_timings) const {
  json list = json::array();
  for (const ManifestEntry& e : images) {
    json item = {{"input", e.input}, {"status", e.status}, {"seed", e.seed}};
    if (e.status != "ok") {
      item["reason"] = e.reason;
      list.push_back(std::move(item));
      continue;
    }
    item["output"] = e.output;
    item["mask"] = e.mask;
    item["pattern"] = e.pattern;
    item["shading"] = e.shading;
    if (!e.frames.empty()) item["frames"] = e.frames;
    item["impact"] = {{"point", {e.impact.impact_point.x, e.impact.impact_point.y}},
                      {"vector", {e.impact.impact_vector.x, e.impact.impact_vector.y}}};
    if (include_timings) {
      item["timings_ms"] = {{"simulate", e.timings.simulate_ms},
                            {"rasterize", e.timings.rasterize_ms},
                            {"render", e.timings.render_ms}};
    }
    if (e.objects) {
      json objects = json::array();
      for (const BoundingBox& b : *e.objects) objects.push_back(box_to_json(b));
      item["objects"] = std::move(objects);
    }
    list.push_back(std::move(item));
  }
  return {{"images", std::move(list)}};
}

RunManifest run_batch(const PipelineConfig& config) {
  config.validate();
  const std::vector<fs::path> inputs = list_images(config.input);
  if (inputs.empty()) {
    throw std::invalid_argument("no images found in " + config.input.string());
  }
  fs::create_directories(config.output_dir);
  const std::vector<std::string> prefixes = output_prefixes(inputs);

  RunManifest manifest;
  manifest.images.resize(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    ManifestEntry& e = manifest.images[i];
    e.input = inputs[i].filename().string();
    e.seed = config.seed + i;
  }

  const int workers =
      std::min<int>(resolve_thread_count(config), static_cast<int>(inputs.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(inputs.size());
  auto work = [&] {
    for (std::size_t i = next++; i < inputs.size(); i = next++) {
      try {
        process_one(config, inputs[i], prefixes[i], manifest.images[i]);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  // Output failures (disk full, permissions) abort the run.
  for (const std::exception_ptr& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  write_text(config.output_dir / "manifest.json",
             manifest.to_json(config.record_timings).dump(2) + "\n");
  std::size_t ok = 0;
  for (const ManifestEntry& e : manifest.images) ok += e.status == "ok" ? 1 : 0;
  spdlog::info("processed {} of {} images into {}", ok, inputs.size(), config.output_dir.string());
  return manifest;
}

}  // namespace glassfrac
