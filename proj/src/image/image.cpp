#include <cmath>

#include "glassfrac/image.hpp"

namespace glassfrac {

GrayImage to_gray(const RgbImage& image) {
  GrayImage gray(image.width, image.height);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const double luma = 0.299 * image.at(x, y, 0) + 0.587 * image.at(x, y, 1) +
                          0.114 * image.at(x, y, 2);
      gray.at(x, y) = static_cast<std::uint8_t>(std::lround(luma));
    }
  }
  return gray;
}

std::uint64_t image_hash(const RgbImage& image) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint8_t byte) {
    h ^= byte;
    h *= 0x100000001b3ull;
  };
  for (int shift = 0; shift < 32; shift += 8) {
    mix(static_cast<std::uint8_t>(image.width >> shift));
    mix(static_cast<std::uint8_t>(image.height >> shift));
  }
  for (std::uint8_t b : image.pixels) mix(b);
  return h;
}

}  // namespace glassfrac
