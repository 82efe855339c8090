#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "glassfrac/analysis.hpp"
#include "glassfrac/errors.hpp"

namespace glassfrac {

IntensityDistribution distribution_from_counts(std::span<const std::uint64_t> counts,
                                               double epsilon) {
  if (counts.empty()) throw std::invalid_argument("histogram needs at least one bin");
  if (!(epsilon > 0.0)) throw std::invalid_argument("smoothing epsilon must be positive");
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total += c;
  const double denom = static_cast<double>(total) + static_cast<double>(counts.size()) * epsilon;
  IntensityDistribution d;
  d.sample_count = total;
  d.smoothing_epsilon = epsilon;
  d.bins.reserve(counts.size());
  for (std::uint64_t c : counts) d.bins.push_back((static_cast<double>(c) + epsilon) / denom);
  return d;
}

IntensityDistribution intensity_histogram(std::span<const GrayImage> images, double epsilon) {
  if (images.empty()) throw std::invalid_argument("intensity histogram needs at least one image");
  std::vector<std::uint64_t> counts(kHistogramBins, 0);
  for (const GrayImage& img : images) {
    for (std::uint8_t v : img.pixels) ++counts[v];
  }
  return distribution_from_counts(counts, epsilon);
}

double kl_divergence(const IntensityDistribution& p, const IntensityDistribution& q) {
  if (p.bins.size() != q.bins.size()) {
    throw std::invalid_argument("distributions have different bin counts");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < p.bins.size(); ++i) {
    const double pi = p.bins[i];
    const double qi = q.bins[i];
    if (pi == 0.0) continue;
    if (!(qi > 0.0)) throw std::invalid_argument("q has an empty bin where p does not");
    sum += pi * std::log(pi / qi);
  }
  return sum;
}

namespace {

IntensityDistribution folder_distribution(const std::filesystem::path& dir, double epsilon,
                                          std::size_t& used) {
  if (!std::filesystem::is_directory(dir)) throw NotFoundError("not a directory: " + dir.string());
  std::vector<std::uint64_t> counts(kHistogramBins, 0);
  used = 0;
  for (const auto& path : list_images(dir)) {
    GrayImage gray;
    try {
      gray = to_gray(read_image(path));
    } catch (const std::exception& e) {
      spdlog::warn("skipping {}: {}", path.string(), e.what());
      continue;
    }
    for (std::uint8_t v : gray.pixels) ++counts[v];
    ++used;
  }
  if (used == 0) throw std::invalid_argument("no readable images in " + dir.string());
  return distribution_from_counts(counts, epsilon);
}

}  // namespace

KlReport compare_folders(const std::filesystem::path& set_a, const std::filesystem::path& set_b,
                         double epsilon) {
  KlReport r;
  const IntensityDistribution a = folder_distribution(set_a, epsilon, r.images_a);
  const IntensityDistribution b = folder_distribution(set_b, epsilon, r.images_b);
  r.kl_ab = kl_divergence(a, b);
  r.kl_ba = kl_divergence(b, a);
  r.bins = a.bins.size();
  r.epsilon = epsilon;
  return r;
}

nlohmann::json KlReport::to_json() const {
  return {{"kl_ab", kl_ab},   {"kl_ba", kl_ba},       {"bins", bins},
          {"epsilon", epsilon}, {"log_base", "e"},    {"images_a", images_a},
          {"images_b", images_b}};
}

std::string KlReport::to_table() const {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "set   images\n"
                "A     %zu\n"
                "B     %zu\n"
                "KL(A||B)  %.6f nats\n"
                "KL(B||A)  %.6f nats\n"
                "bins %zu, epsilon %g\n",
                images_a, images_b, kl_ab, kl_ba, bins, epsilon);
  return buf;
}

}  // namespace glassfrac
