#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "glassfrac/errors.hpp"
#include "glassfrac/pipeline.hpp"

namespace glassfrac {

namespace {

constexpr std::size_t kMinKittiFields = 8;

bool parse_number(const std::string& token, double& out) {
  std::size_t used = 0;
  try {
    out = std::stod(token, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == token.size() && std::isfinite(out);
}

}  // namespace

std::vector<BoundingBox> parse_annotations(const std::string& text) {
  std::vector<BoundingBox> boxes;
  std::vector<std::size_t> bad_lines;
  std::string problems;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string t; fields >> t;) tokens.push_back(t);
    if (tokens.empty()) continue;

    auto reject = [&](const std::string& why) {
      bad_lines.push_back(line_no);
      problems += "\n  line " + std::to_string(line_no) + ": " + why;
    };
    if (tokens.size() < kMinKittiFields) {
      reject("expected at least 8 fields, got " + std::to_string(tokens.size()));
      continue;
    }
    BoundingBox box;
    box.class_label = tokens[0];
    if (!parse_number(tokens[4], box.left) || !parse_number(tokens[5], box.top) ||
        !parse_number(tokens[6], box.right) || !parse_number(tokens[7], box.bottom)) {
      reject("non-numeric box field");
      continue;
    }
    if (!(box.left < box.right) || !(box.top < box.bottom)) {
      reject("box has right <= left or bottom <= top");
      continue;
    }
    boxes.push_back(std::move(box));
  }
  if (!bad_lines.empty()) {
    throw ParseError("malformed annotation lines:" + problems, std::move(bad_lines));
  }
  return boxes;
}

std::vector<BoundingBox> load_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("annotation file not found: " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_annotations(text.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.lines());
  }
}

double mask_overlap(const BoundingBox& box, const BinaryMask& mask) {
  // Pixel columns floor(left)..ceil(right)-1, clipped to the frame.
  const auto clip = [](double v, int hi) {
    return static_cast<int>(std::clamp(v, 0.0, static_cast<double>(hi)));
  };
  const int x0 = clip(std::floor(box.left), mask.width);
  const int y0 = clip(std::floor(box.top), mask.height);
  const int x1 = clip(std::ceil(box.right), mask.width);
  const int y1 = clip(std::ceil(box.bottom), mask.height);
  if (x0 >= x1 || y0 >= y1) return 0.0;
  std::size_t set = 0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) set += mask.at(x, y) ? 1 : 0;
  }
  return static_cast<double>(set) / (static_cast<double>(x1 - x0) * (y1 - y0));
}

std::vector<BoundingBox> objects_in_crack(const std::vector<BoundingBox>& boxes,
                                          const BinaryMask& mask, double overlap_threshold) {
  if (!(overlap_threshold >= 0.0 && overlap_threshold <= 1.0)) {
    throw std::invalid_argument("overlap threshold must lie in [0, 1]");
  }
  std::vector<BoundingBox> hits;
  for (const BoundingBox& box : boxes) {
    if (mask_overlap(box, mask) >= overlap_threshold) hits.push_back(box);
  }
  return hits;
}

}  // namespace glassfrac
