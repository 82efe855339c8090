#include <fstream>
#include <set>
#include <stdexcept>

#include "glassfrac/errors.hpp"
#include "glassfrac/pipeline.hpp"

namespace glassfrac {

namespace {

using nlohmann::json;

void reject_unknown(const json& doc, const std::set<std::string>& known, const std::string& where) {
  for (const auto& item : doc.items()) {
    if (!known.contains(item.key())) {
      throw ParseError("unknown config key '" + where + item.key() + "'", {});
    }
  }
}

Vec2 direction_from_json(const json& v) {
  if (!v.is_array() || (v.size() != 2 && v.size() != 3)) {
    throw ParseError("light directions must have 2 or 3 components", {});
  }
  if (v.size() == 3) {
    return project_to_plane({v[0].get<double>(), v[1].get<double>(), v[2].get<double>()});
  }
  const Vec2 d{v[0].get<double>(), v[1].get<double>()};
  if (!(norm(d) > 0.0)) throw ParseError("light direction must be nonzero", {});
  return unit(d);
}

void render_from_json(const json& doc, RenderConfig& render) {
  reject_unknown(doc, {"light", "focus_mode", "blur_sigma", "alpha", "stroke_width", "dilation"},
                 "render.");
  if (doc.contains("light")) {
    const json& light = doc.at("light");
    reject_unknown(light, {"intensity", "azimuth", "zenith"}, "render.light.");
    if (light.contains("intensity")) {
      const json& i = light.at("intensity");
      if (!i.is_array() || i.size() != 3) throw ParseError("light intensity needs 3 channels", {});
      render.light.mean_intensity = {i[0].get<double>(), i[1].get<double>(), i[2].get<double>()};
    }
    if (light.contains("azimuth")) render.light.azimuth_dir = direction_from_json(light.at("azimuth"));
    if (light.contains("zenith")) render.light.zenith_dir = direction_from_json(light.at("zenith"));
  }
  if (doc.contains("focus_mode")) {
    render.focus_mode = focus_mode_from_string(doc.at("focus_mode").get<std::string>());
  }
  if (doc.contains("blur_sigma")) {
    const json& v = doc.at("blur_sigma");
    render.blur_sigma = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
  }
  if (doc.contains("alpha")) render.alpha = doc.at("alpha").get<double>();
  if (doc.contains("stroke_width")) render.stroke_width = doc.at("stroke_width").get<double>();
  if (doc.contains("dilation")) render.dilation = doc.at("dilation").get<int>();
}

}  // namespace

void PipelineConfig::validate() const {
  if (particle_count < 3) throw std::invalid_argument("particle_count must be at least 3");
  if (!(force >= 0.0)) throw std::invalid_argument("force must be non-negative");
  if (!(stop_threshold >= 0.0)) throw std::invalid_argument("stop_threshold must be non-negative");
  if (!(critical_stress > 0.0)) throw std::invalid_argument("critical_stress must be positive");
  if (!(safety_factor > 0.0)) throw std::invalid_argument("safety_factor must be positive");
  if (radius && !(*radius > 0.0)) throw std::invalid_argument("radius must be positive");
  if (branch_k < 1) throw std::invalid_argument("branch_k must be at least 1");
  if (!(decay > 0.0 && decay < 1.0)) throw std::invalid_argument("decay must lie in (0, 1)");
  if (frame_count < 0) throw std::invalid_argument("frame_count must be non-negative");
  if (threads < 0) throw std::invalid_argument("threads must be non-negative");
  if (!(overlap_threshold >= 0.0 && overlap_threshold <= 1.0)) {
    throw std::invalid_argument("overlap_threshold must lie in [0, 1]");
  }
  if (width <= 0 || height <= 0) throw std::invalid_argument("frame size must be positive");
  render.validate();
}

double PipelineConfig::radius_for(Extent extent) const {
  return radius ? *radius : default_neighbor_radius(extent, particle_count);
}

PipelineConfig config_from_json(const json& doc, PipelineConfig base) {
  if (!doc.is_object()) throw ParseError("config must be a JSON object", {});
  reject_unknown(doc,
                 {"particle_count", "force", "stop_threshold", "critical_stress", "safety_factor",
                  "radius", "branch_k", "decay", "render", "seed", "input", "annotation_dir",
                  "output_dir", "frame_count", "threads", "overlap_threshold", "width", "height",
                  "record_timings"},
                 "");
  try {
    PipelineConfig c = std::move(base);
    if (doc.contains("particle_count")) c.particle_count = doc.at("particle_count").get<std::size_t>();
    if (doc.contains("force")) c.force = doc.at("force").get<double>();
    if (doc.contains("stop_threshold")) c.stop_threshold = doc.at("stop_threshold").get<double>();
    if (doc.contains("critical_stress")) c.critical_stress = doc.at("critical_stress").get<double>();
    if (doc.contains("safety_factor")) c.safety_factor = doc.at("safety_factor").get<double>();
    if (doc.contains("radius")) {
      if (doc.at("radius").is_null()) {
        c.radius.reset();
      } else {
        c.radius = doc.at("radius").get<double>();
      }
    }
    if (doc.contains("branch_k")) c.branch_k = doc.at("branch_k").get<int>();
    if (doc.contains("decay")) c.decay = doc.at("decay").get<double>();
    if (doc.contains("render")) render_from_json(doc.at("render"), c.render);
    if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("input")) c.input = doc.at("input").get<std::string>();
    if (doc.contains("annotation_dir")) {
      const json& v = doc.at("annotation_dir");
      c.annotation_dir = v.is_null() ? std::nullopt
                                     : std::optional<std::filesystem::path>(v.get<std::string>());
    }
    if (doc.contains("output_dir")) c.output_dir = doc.at("output_dir").get<std::string>();
    if (doc.contains("frame_count")) c.frame_count = doc.at("frame_count").get<int>();
    if (doc.contains("threads")) c.threads = doc.at("threads").get<int>();
    if (doc.contains("overlap_threshold")) c.overlap_threshold = doc.at("overlap_threshold").get<double>();
    if (doc.contains("width")) c.width = doc.at("width").get<int>();
    if (doc.contains("height")) c.height = doc.at("height").get<int>();
    if (doc.contains("record_timings")) c.record_timings = doc.at("record_timings").get<bool>();
    return c;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad config value: ") + e.what(), {});
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("bad config value: ") + e.what(), {});
  }
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("config file not found: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("config " + path.string() + " is not valid JSON: " + e.what(), {});
  }
  return config_from_json(doc);
}

json config_to_json(const PipelineConfig& c) {
  json render = {
      {"light",
       {{"intensity", {c.render.light.mean_intensity[0], c.render.light.mean_intensity[1],
                       c.render.light.mean_intensity[2]}},
        {"azimuth", {c.render.light.azimuth_dir.x, c.render.light.azimuth_dir.y}},
        {"zenith", {c.render.light.zenith_dir.x, c.render.light.zenith_dir.y}}}},
      {"focus_mode", to_string(c.render.focus_mode)},
      {"blur_sigma", c.render.blur_sigma ? json(*c.render.blur_sigma) : json(nullptr)},
      {"alpha", c.render.alpha},
      {"stroke_width", c.render.stroke_width},
      {"dilation", c.render.dilation}};
  json doc = {{"particle_count", c.particle_count},
              {"force", c.force},
              {"stop_threshold", c.stop_threshold},
              {"critical_stress", c.critical_stress},
              {"safety_factor", c.safety_factor},
              {"radius", c.radius ? json(*c.radius) : json(nullptr)},
              {"branch_k", c.branch_k},
              {"decay", c.decay},
              {"render", std::move(render)},
              {"seed", c.seed},
              {"input", c.input.string()},
              {"annotation_dir", c.annotation_dir ? json(c.annotation_dir->string()) : json(nullptr)},
              {"output_dir", c.output_dir.string()},
              {"frame_count", c.frame_count},
              {"threads", c.threads},
              {"overlap_threshold", c.overlap_threshold},
              {"width", c.width},
              {"height", c.height},
              {"record_timings", c.record_timings}};
  return doc;
}

}  // namespace glassfrac
