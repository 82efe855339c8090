#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace glassfrac {

/// Interleaved 8-bit RGB, row-major.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  RgbImage() = default;
  RgbImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, fill) {}

  std::size_t index(int x, int y) const { return (static_cast<std::size_t>(y) * width + x) * 3; }
  std::uint8_t& at(int x, int y, int c) { return pixels[index(x, y) + c]; }
  std::uint8_t at(int x, int y, int c) const { return pixels[index(x, y) + c]; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

/// ITU-R BT.601 luma, rounded to nearest.
GrayImage to_gray(const RgbImage& image);

/// FNV-1a over dimensions and pixel bytes.
std::uint64_t image_hash(const RgbImage& image);

/// Reads PNG or JPEG (detected from the file signature); gray and alpha inputs
/// are converted to RGB. Throws NotFoundError for a missing file and
/// std::runtime_error for unreadable content.
RgbImage read_image(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const RgbImage& image);
void write_png(const std::filesystem::path& path, const GrayImage& image);

}  // namespace glassfrac
