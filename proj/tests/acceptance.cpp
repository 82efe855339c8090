// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "glassfrac/analysis.hpp"
#include "glassfrac/errors.hpp"
#include "glassfrac/pipeline.hpp"
#include "glassfrac/spanning_tree.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace glassfrac;
namespace fs = std::filesystem;

namespace {

constexpr double kRuntimeBudgetMs = 5000.0;
constexpr double kRuntimeStretchMs = 2000.0;
constexpr int kRuntimeRuns = 20;
constexpr int kSweepRuns = 5;
constexpr double kIncircleTolerance = 1e-9;
constexpr double kTraceTolerance = 1e-9;
constexpr int kValiditySimulations = 200;
constexpr int kLocalityOverlays = 20;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

bool is_tree(const CrackPattern& p) {
  if (p.edges.size() + 1 != p.nodes.size()) return false;
  DisjointSet sets(p.nodes.size());
  for (const CrackEdge& e : p.edges) {
    if (!sets.unite(e.a, e.b)) return false;
  }
  return true;
}

RgbImage noise_rgb(int w, int h, std::uint64_t seed, int lo, int hi) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(lo, hi);
  RgbImage img(w, h);
  for (auto& v : img.pixels) v = static_cast<std::uint8_t>(u(rng));
  return img;
}

Outcome runtime_budget() {
  PipelineConfig cfg;
  const RgbImage frame = synthetic_frame(kDefaultFrameWidth, kDefaultFrameHeight);
  corrupt_image(frame, cfg, 0);
  double sum = 0.0;
  for (int i = 0; i < kRuntimeRuns; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    corrupt_image(frame, cfg, static_cast<std::uint64_t>(i + 1));
    sum += elapsed_ms(t0);
  }
  const double mean = sum / kRuntimeRuns;
  return {mean <= kRuntimeBudgetMs,
          "mean " + fmt("%.1f", mean) + " ms over 20 runs (budget 5000, stretch 2000: " +
              (mean <= kRuntimeStretchMs ? "met" : "missed") + ")"};
}

Outcome scaling_shape() {
  PipelineConfig cfg;
  const std::vector<std::size_t> counts{1000, 5000, 10000, 20000};
  const auto sweep = particle_sweep(cfg, counts, kSweepRuns);
  bool increasing = true;
  std::string detail = "simulate ms:";
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    detail += " " + fmt("%.2f", sweep[i].simulate.mean_ms);
    if (i > 0 && !(sweep[i].simulate.mean_ms > sweep[i - 1].simulate.mean_ms)) increasing = false;
  }
  return {increasing, detail};
}

Outcome mst_oracle() {
  std::mt19937_64 rng(1001);
  int mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 6;
    const ParticleSet ps = sample_particles(std::max<std::size_t>(n, 3), {50, 50}, rng());
    StressField f;
    f.root = 0;
    for (ParticleId i = 0; i < n; ++i) {
      f.visited.push_back(i);
      f.node_stress[i] = 400.0;
      if (i > 0) f.trace.push_back({0, i, 400.0, 1, {1, 0}, false});
    }
    ImpactSpec impact;
    impact.impact_point = ps[0];
    const CrackPattern p = extract_crack_pattern(f, ps, impact);
    std::vector<double> w;
    for (const CrackEdge& e : p.edges) w.push_back(distance(p.nodes[e.a], p.nodes[e.b]));
    const double expect = oracle::min_tree_weight_cayley(
        static_cast<int>(n), [&](int i, int j) { return distance(ps[i], ps[j]); });
    if (!is_tree(p) || oracle::sorted_sum(w) != expect) ++mismatches;
  }
  return {mismatches == 0, "100 graphs, " + std::to_string(mismatches) + " mismatches"};
}

Outcome radius_oracle() {
  std::mt19937_64 rng(1002);
  int mismatches = 0;
  for (int set = 0; set < 50; ++set) {
    const std::size_t n = 1 + rng() % 1000;
    const ParticleSet ps = sample_particles(n, {300, 200}, rng());
    const NeighborIndex index(ps);
    const std::vector<Point2> pts(ps.positions().begin(), ps.positions().end());
    std::uniform_real_distribution<double> ux(-20, 320), uy(-20, 220), ur(0, 60);
    for (int q = 0; q < 100; ++q) {
      const Point2 c = q % 10 == 0 ? pts[rng() % n] : Point2{ux(rng), uy(rng)};
      const double r = q % 25 == 0 ? 0.0 : ur(rng);
      if (index.query_radius(c, r) != oracle::radius_filter(pts, c, r)) ++mismatches;
    }
  }
  return {mismatches == 0, "5000 queries, " + std::to_string(mismatches) + " mismatches"};
}

Outcome delaunay_property() {
  std::mt19937_64 rng(1003);
  double worst = -std::numeric_limits<double>::infinity();
  for (int set = 0; set < 50; ++set) {
    const std::size_t n = 3 + rng() % 198;
    const ParticleSet ps = sample_particles(n, {150, 100}, rng());
    const TriMesh mesh = triangulate(ps);
    for (const auto& t : mesh.triangles()) {
      const Point2 a = ps[t[0]], b = ps[t[1]], c = ps[t[2]];
      for (ParticleId v = 0; v < ps.size(); ++v) {
        if (v == t[0] || v == t[1] || v == t[2]) continue;
        worst = std::max(worst, oracle::incircle(a, b, c, ps[v]));
      }
    }
  }
  return {worst <= kIncircleTolerance, "max in-circle determinant " + fmt("%.3g", worst)};
}

Outcome fixture_trace() {
  const ParticleSet ps = fixture::particles();
  const TriMesh mesh = triangulate(ps);
  const NeighborIndex index(ps);
  const StressField field = propagate(mesh, index, fixture::impact(), fixture::kRadius, 1, 0.97);
  bool ok = field.root == ParticleId{0} && field.trace.size() == fixture::kTrace.size();
  double worst = 0.0;
  for (std::size_t i = 0; ok && i < field.trace.size(); ++i) {
    const TraceStep& got = field.trace[i];
    const fixture::ExpectedStep& want = fixture::kTrace[i];
    ok = got.parent == want.parent && got.child == want.child && got.step == want.step &&
         got.terminal == want.terminal;
    worst = std::max(worst, std::abs(got.stress - want.stress));
  }
  for (ParticleId side : {3u, 4u}) {
    const auto it = field.node_stress.find(side);
    if (it == field.node_stress.end()) {
      ok = false;
    } else {
      worst = std::max(worst, std::abs(it->second - fixture::kSideNodeStress));
    }
  }
  ok = ok && worst <= kTraceTolerance;
  return {ok, "2 hops, max stress error " + fmt("%.3g", worst)};
}

Outcome unit_cases() {
  constexpr double kSin60 = 0.8660254037844387;
  const LightSource white{{255, 255, 255}, {1, 0}, {0, 1}};
  std::vector<std::pair<std::string, bool>> cases = {
      {"cos 0", edge_stress(500, {0, 0}, {3, 0}, {1, 0}) == 500.0},
      {"cos 90", edge_stress(500, {0, 0}, {0, 2}, {1, 0}) == 0.0},
      {"cos 60", edge_stress(500, {0, 0}, {1, 0}, {0.5, kSin60}) == 250.0},
      {"energy 1", mean_incident_energy({1, 0}, LightSource{{255, 255, 255}, {1, 0}, {1, 0}}) == 1.0},
      {"energy 0", mean_incident_energy({1, 0}, LightSource{{255, 255, 255}, {0, 1}, {0, 1}}) == 0.0},
      {"energy 0.5", mean_incident_energy({1, 0}, white) == 0.5},
      {"ratio 1", crack_intensity(white, 0.7, 0.7) == Rgb{255, 255, 255}},
      {"energy 0 black", crack_intensity(LightSource{{30, 60, 90}, {1, 0}, {0, 1}}, 0.0, 2.0) ==
                             Rgb{0, 0, 0}},
      {"ratio 0.5", crack_intensity(LightSource{{200, 100, 50}, {1, 0}, {0, 1}}, 0.5, 1.0) ==
                        Rgb{100, 50, 25}},
  };
  std::string failed;
  for (const auto& [name, ok] : cases) {
    if (!ok) failed += " " + name;
  }
  return {failed.empty(), std::to_string(cases.size()) + " cases" +
                              (failed.empty() ? "" : ", failed:" + failed)};
}

// Nonempty tree and strictly decreasing carried stress along every
// root-to-leaf path of the propagation trace. Root-to-leaf paths of the
// Euclidean MST are counted for information only.
Outcome crack_validity() {
  PipelineConfig cfg;
  const Extent extent{double(kDefaultFrameWidth), double(kDefaultFrameHeight)};
  int bad = 0;
  int mst_non_monotone = 0;
  std::string first_bad;
  for (int run = 0; run < kValiditySimulations; ++run) {
    const Simulation sim = simulate_crack(cfg, extent, 5000 + static_cast<std::uint64_t>(run));
    const CrackPattern& p = sim.pattern;
    std::string why;
    if (p.edges.empty()) why = "empty";
    if (why.empty() && !is_tree(p)) why = "not a tree";

    std::map<ParticleId, double> carried{{*sim.field.root, sim.impact.force}};
    for (const TraceStep& t : sim.field.trace) {
      if (why.empty() && carried.count(t.child)) why = "node revisited";
      if (why.empty() && !(t.stress < carried.at(t.parent))) why = "trace stress not decreasing";
      carried[t.child] = t.stress;
    }
    if (!why.empty()) {
      if (bad++ == 0) first_bad = "seed " + std::to_string(5000 + run) + ": " + why;
      continue;
    }

    std::vector<std::vector<std::size_t>> adj(p.nodes.size());
    for (const CrackEdge& e : p.edges) {
      adj[e.a].push_back(e.b);
      adj[e.b].push_back(e.a);
    }
    std::vector<bool> seen(p.nodes.size(), false);
    std::queue<std::size_t> q;
    q.push(p.impact_node);
    seen[p.impact_node] = true;
    bool monotone = true;
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (std::size_t v : adj[u]) {
        if (seen[v]) continue;
        seen[v] = true;
        if (!(carried.at(p.node_ids[v]) < carried.at(p.node_ids[u]))) monotone = false;
        q.push(v);
      }
    }
    if (!monotone) ++mst_non_monotone;
  }
  return {bad == 0, std::to_string(kValiditySimulations) + " simulations, " + std::to_string(bad) +
                        " invalid" + (first_bad.empty() ? "" : " (" + first_bad + ")") + "; " +
                        std::to_string(mst_non_monotone) + " MSTs with a non-monotone path"};
}

Outcome far_focus_locality() {
  PipelineConfig cfg;
  int bad = 0;
  std::size_t masked = 0;
  for (int i = 0; i < kLocalityOverlays; ++i) {
    const RgbImage source =
        noise_rgb(kDefaultFrameWidth, kDefaultFrameHeight, 7000 + static_cast<std::uint64_t>(i), 0, 255);
    const Corruption c = corrupt_image(source, cfg, 7000 + static_cast<std::uint64_t>(i));
    const BinaryMask& mask = c.overlay.mask;
    masked += mask.count();
    bool ok = mask.count() > 0;
    for (int y = 0; ok && y < source.height; ++y) {
      for (int x = 0; ok && x < source.width; ++x) {
        if (mask.at(x, y)) continue;
        for (int ch = 0; ch < 3; ++ch) ok = ok && c.overlay.image.at(x, y, ch) == source.at(x, y, ch);
      }
    }
    if (!ok) ++bad;
  }
  return {bad == 0, "20 overlays, " + std::to_string(bad) + " with changes outside the mask, " +
                        std::to_string(masked / kLocalityOverlays) + " masked px on average"};
}

Outcome determinism() {
  const fs::path in = oracle::temp_dir("accept_det_in");
  for (int i = 0; i < 3; ++i) {
    write_png(in / ("frame" + std::to_string(i) + ".png"),
              i == 0 ? synthetic_frame(kDefaultFrameWidth, kDefaultFrameHeight)
                     : noise_rgb(640, 240, static_cast<std::uint64_t>(i), 0, 255));
  }
  std::vector<fs::path> outs;
  for (int threads : {1, 1, 4, 4}) {
    PipelineConfig cfg;
    cfg.input = in;
    cfg.seed = 31;
    cfg.threads = threads;
    cfg.record_timings = false;
    cfg.output_dir = oracle::temp_dir("accept_det_out" + std::to_string(outs.size()));
    run_batch(cfg);
    outs.push_back(cfg.output_dir);
  }
  std::size_t files = 0;
  int diffs = 0;
  for (const auto& entry : fs::directory_iterator(outs[0])) {
    ++files;
    const std::string ref = oracle::read_file(entry.path());
    for (std::size_t k = 1; k < outs.size(); ++k) {
      if (oracle::read_file(outs[k] / entry.path().filename()) != ref) ++diffs;
    }
  }
  std::size_t other = 0;
  for (std::size_t k = 1; k < outs.size(); ++k) {
    other += static_cast<std::size_t>(std::distance(fs::directory_iterator(outs[k]), fs::directory_iterator{}));
  }
  const bool ok = diffs == 0 && files == 13 && other == 3 * files;
  return {ok, std::to_string(files) + " files x 4 runs (threads 1, 1, 4, 4), " + std::to_string(diffs) +
                  " differing"};
}

Outcome kl_suite() {
  std::mt19937_64 rng(1011);
  std::uniform_int_distribution<std::uint64_t> c(0, 100);
  double min_kl = std::numeric_limits<double>::infinity();
  bool self_zero = true;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::uint64_t> a(kHistogramBins), b(kHistogramBins);
    for (auto& v : a) v = c(rng);
    for (auto& v : b) v = c(rng);
    const auto p = distribution_from_counts(a);
    const auto q = distribution_from_counts(b);
    min_kl = std::min(min_kl, kl_divergence(p, q));
    self_zero = self_zero && kl_divergence(p, p) == 0.0;
  }
  IntensityDistribution p, q;
  p.bins = {0.9, 0.1};
  q.bins = {0.5, 0.5};
  const bool asymmetric = kl_divergence(p, q) != kl_divergence(q, p);

  const fs::path a = oracle::temp_dir("accept_kl_a");
  const fs::path a2 = oracle::temp_dir("accept_kl_a2");
  const fs::path b = oracle::temp_dir("accept_kl_b");
  const RgbImage road = synthetic_frame(kDefaultFrameWidth, kDefaultFrameHeight);
  for (int i = 0; i < 3; ++i) {
    write_png(a / ("road" + std::to_string(i) + ".png"), road);
    write_png(a2 / ("road" + std::to_string(i) + ".png"), road);
    write_png(b / ("cracked" + std::to_string(i) + ".png"),
              noise_rgb(kDefaultFrameWidth, kDefaultFrameHeight, 40 + static_cast<std::uint64_t>(i), 0, 255));
  }
  const KlReport same = compare_folders(a, a2);
  const KlReport diff = compare_folders(a, b);
  const bool sanity = same.kl_ab < diff.kl_ab;
  const bool ok = min_kl >= 0.0 && self_zero && asymmetric && sanity;
  return {ok, "min KL " + fmt("%.3g", min_kl) + ", KL(A,A) " + fmt("%.3g", same.kl_ab) +
                  " < KL(A,B) " + fmt("%.3g", diff.kl_ab)};
}

Outcome object_thresholds(bool locality_passed) {
  const BinaryMask full(100, 50, true);
  BinaryMask half(100, 50);
  for (int y = 0; y < 50; ++y) {
    for (int x = 0; x < 50; ++x) half.set(x, y, true);
  }
  const BoundingBox inside{"Car", 10, 10, 30, 30};
  const BoundingBox straddle{"Van", 40, 10, 60, 30};
  const BoundingBox away{"Cyclist", 70, 10, 90, 30};
  bool ok = objects_in_crack({inside}, full, 0.5).size() == 1 &&
            objects_in_crack({away}, half, 0.01).empty() &&
            objects_in_crack({straddle}, half, 0.4).size() == 1 &&
            objects_in_crack({straddle}, half, 0.6).empty();
  std::vector<BoundingBox> boxes;
  for (int i = 0; i < 20; ++i) boxes.push_back({"Car", 5.0 * i, 5, 5.0 * i + 17, 40});
  std::size_t prev = boxes.size();
  for (int k = 0; k <= 20; ++k) {
    const std::size_t n = objects_in_crack(boxes, half, k / 20.0).size();
    ok = ok && n <= prev;
    prev = n;
  }
  return {ok && locality_passed,
          std::string("threshold cases ") + (ok ? "ok" : "failed") + ", locality " +
              (locality_passed ? "ok" : "failed")};
}

Outcome guarded(const std::function<Outcome()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"runtime budget", runtime_budget},
      {"scaling shape", scaling_shape},
      {"MST oracle", mst_oracle},
      {"radius query oracle", radius_oracle},
      {"Delaunay property", delaunay_property},
      {"propagation fixture", fixture_trace},
      {"stress and shading unit cases", unit_cases},
      {"crack validity", crack_validity},
      {"far-focus locality", far_focus_locality},
      {"determinism", determinism},
      {"K-L suite", kl_suite},
  };
  int failures = 0;
  bool locality = false;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Outcome o = guarded(criteria[i].second);
    if (i == 8) locality = o.pass;
    failures += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  const Outcome o = guarded([&] { return object_thresholds(locality); });
  failures += o.pass ? 0 : 1;
  std::printf("%s 12 masked object selection: %s\n", o.pass ? "PASS" : "FAIL", o.detail.c_str());
  return failures == 0 ? 0 : 1;
}
