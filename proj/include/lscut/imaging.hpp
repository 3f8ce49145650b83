#pragma once

// Image front end: synthetic ellipse scenes, noise, seeded Gaussian data
// terms, grid segmentation through the s-t pipeline, and Dice scoring.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "lscut/analysis.hpp"
#include "lscut/errors.hpp"
#include "lscut/mrf_model.hpp"
#include "lscut/pgm.hpp"
#include "lscut/solver.hpp"

namespace lscut {

struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> intensities;  // row-major, [0, 1]

  std::size_t size() const { return intensities.size(); }
};

struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<int> labels;
};

// ---------------------------------------------------------------------------
// PGM conversion

inline Image to_image(const Greymap& g) {
  Image img{g.width, g.height, std::vector<double>(g.pixels.size())};
  for (std::size_t i = 0; i < g.pixels.size(); ++i) img.intensities[i] = static_cast<double>(g.pixels[i]) / g.maxval;
  return img;
}

inline Greymap to_greymap(const Image& img) {
  Greymap g{img.width, img.height, 255, std::vector<int>(img.size())};
  for (std::size_t i = 0; i < img.size(); ++i)
    g.pixels[i] = static_cast<int>(std::lround(std::clamp(img.intensities[i], 0.0, 1.0) * 255.0));
  return g;
}

inline LabelMap to_label_map(const Greymap& g) { return {g.width, g.height, g.pixels}; }

/// Label maps are stored with maxval k-1 so the raw sample is the label.
inline Greymap to_greymap(const LabelMap& m, int k) {
  if (k < 2) throw InvalidArgument("label map needs k >= 2");
  for (int l : m.labels)
    if (l < 0 || l >= k) throw RangeError("label map entry outside [0, k)");
  return {m.width, m.height, k - 1, m.labels};
}

// ---------------------------------------------------------------------------
// Synthetic scenes

struct Scene {
  Image image;
  LabelMap truth;
  std::vector<double> label_intensity;  // intensity of each label
};

inline constexpr int kEllipseRetries = 2000;

/// Background (label 0) plus k-1 filled ellipses drawn in label order; later
/// ellipses overwrite earlier ones. Every label keeps a visible region.
/// Label intensities are pairwise at least 1/k apart.
inline Scene synth_ellipses(int k, int width, int height, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("synth_ellipses: k must be >= 2");
  if (width < 4 || height < 4) throw InvalidArgument("synth_ellipses: image too small");
  std::mt19937_64 rng = derived_rng(seed, 11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // Sorted offsets in [0, 1/k] plus i/k keep consecutive levels >= 1/k apart.
  std::vector<double> offsets(static_cast<std::size_t>(k));
  for (auto& o : offsets) o = unif(rng) / k;
  std::sort(offsets.begin(), offsets.end());
  std::vector<double> levels(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) levels[i] = std::min(1.0, offsets[i] + static_cast<double>(i) / k);
  std::shuffle(levels.begin(), levels.end(), rng);

  const std::size_t n = static_cast<std::size_t>(width) * height;
  Scene scene;
  scene.truth = {width, height, std::vector<int>(n, 0)};
  scene.label_intensity = levels;

  const double ref = std::min(width, height);
  const double min_axis = ref / 10.0, max_axis = ref / 3.0;
  const std::size_t min_visible =
      std::max<std::size_t>(4, static_cast<std::size_t>(std::numbers::pi * (min_axis / 2) * (min_axis / 2) / 2));

  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  counts[0] = n;
  std::vector<int> candidate;
  for (int label = 1; label < k; ++label) {
    bool placed = false;
    for (int attempt = 0; attempt < kEllipseRetries && !placed; ++attempt) {
      const double cx = unif(rng) * width, cy = unif(rng) * height;
      const double a = (min_axis + unif(rng) * (max_axis - min_axis)) / 2;
      const double c = (min_axis + unif(rng) * (max_axis - min_axis)) / 2;
      const double theta = unif(rng) * std::numbers::pi;
      const double ct = std::cos(theta), st = std::sin(theta);
      candidate = scene.truth.labels;
      std::vector<std::size_t> next = counts;
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
          const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
          const double u = dx * ct + dy * st, v = -dx * st + dy * ct;
          if ((u * u) / (a * a) + (v * v) / (c * c) > 1.0) continue;
          auto& cell = candidate[static_cast<std::size_t>(y) * width + x];
          --next[cell];
          ++next[label];
          cell = label;
        }
      placed = std::all_of(next.begin(), next.begin() + label + 1, [&](std::size_t cnt) { return cnt >= min_visible; });
      if (placed) {
        scene.truth.labels.swap(candidate);
        counts = next;
      }
    }
    if (!placed) throw Error("synth_ellipses: could not place ellipse " + std::to_string(label));
  }
  scene.image = {width, height, std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) scene.image.intensities[i] = levels[scene.truth.labels[i]];
  return scene;
}

/// Adds N(0, sigma^2) per pixel and clips to [0, 1].
inline Image add_awgn(const Image& img, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw InvalidArgument("add_awgn: sigma must be >= 0");
  if (sigma == 0.0) return img;
  std::mt19937_64 rng = derived_rng(seed, 12);
  std::normal_distribution<double> noise(0.0, sigma);
  Image out = img;
  for (auto& v : out.intensities) v = std::clamp(v + noise(rng), 0.0, 1.0);
  return out;
}

// ---------------------------------------------------------------------------
// Seeded data terms

inline constexpr double kSigmaFloor = 1e-3;

struct RegionModel {
  std::vector<double> mean;
  std::vector<double> stddev;
};

/// Fits N(mu_l, sigma_l) to ceil(fraction * |region|) pixels sampled without
/// replacement from each ground-truth region.
inline RegionModel fit_region_model(const Image& noisy, const LabelMap& gt, int k, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidArgument("fraction must be in (0, 1]");
  if (gt.width != noisy.width || gt.height != noisy.height) throw InvalidArgument("image and label map sizes differ");
  std::vector<std::vector<std::size_t>> regions(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < gt.labels.size(); ++i) {
    const int l = gt.labels[i];
    if (l < 0 || l >= k) throw RangeError("ground-truth label outside [0, k)");
    regions[l].push_back(i);
  }
  std::mt19937_64 rng = derived_rng(seed, 13);
  RegionModel model;
  for (int l = 0; l < k; ++l) {
    auto& idx = regions[l];
    if (idx.empty()) throw InvalidArgument("label " + std::to_string(l) + " is absent from the ground truth");
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto take = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(idx.size())));
    std::vector<double> xs;
    xs.reserve(take);
    for (std::size_t t = 0; t < take; ++t) xs.push_back(noisy.intensities[idx[t]]);
    const MeanStd ms = mean_std(xs);
    model.mean.push_back(ms.mean);
    model.stddev.push_back(std::max(kSigmaFloor, ms.std));
  }
  return model;
}

inline constexpr double kBelowOne = 1.0 - std::numeric_limits<double>::epsilon() / 2;

/// D_i(l) = (p_l(mu_l) - p_l(x_i)) / p_l(mu_l), row-major |V| x k. Far tails
/// stay just under 1 instead of rounding up to it.
inline std::vector<double> data_terms_from_model(const Image& img, const RegionModel& model) {
  const std::size_t k = model.mean.size();
  std::vector<double> d(img.size() * k);
  for (std::size_t i = 0; i < img.size(); ++i)
    for (std::size_t l = 0; l < k; ++l) {
      const double z = (img.intensities[i] - model.mean[l]) / model.stddev[l];
      d[i * k + l] = std::min(-std::expm1(-0.5 * z * z), kBelowOne);
    }
  return d;
}

inline std::vector<double> learn_data_terms(const Image& noisy, const LabelMap& gt, int k, double fraction,
                                            std::uint64_t seed) {
  return data_terms_from_model(noisy, fit_region_model(noisy, gt, k, fraction, seed));
}

// ---------------------------------------------------------------------------
// Segmentation and scoring

struct SegmentResult {
  LabelMap labels;
  SolveResult solve;
};

inline MrfProblem grid_problem(const Image& img, std::vector<double> data_terms, const PriorSpec& prior, double lambda,
                               int k) {
  if (data_terms.size() != img.size() * static_cast<std::size_t>(k))
    throw InvalidArgument("data-term table does not match image size and k");
  return MrfProblem(img.width * img.height, k, grid_edges(img.width, img.height), img.intensities, std::move(data_terms),
                    prior, lambda);
}

inline SegmentResult segment(const Image& img, std::vector<double> data_terms, const PriorSpec& prior, double lambda, int k,
                             SystemCache& cache = SystemCache::global()) {
  const MrfProblem problem = grid_problem(img, std::move(data_terms), prior, lambda, k);
  SegmentResult out;
  out.solve = solve(problem, cache);
  out.labels = {img.width, img.height, out.solve.labeling};
  return out;
}

/// Mean over ground-truth labels of 2|P_l ∩ G_l| / (|P_l| + |G_l|).
inline double dice(const LabelMap& pred, const LabelMap& gt) {
  if (pred.width != gt.width || pred.height != gt.height || pred.labels.size() != gt.labels.size())
    throw InvalidArgument("dice: label maps have different dimensions");
  int max_label = 0;
  for (int l : gt.labels) max_label = std::max(max_label, l);
  for (int l : pred.labels) max_label = std::max(max_label, l);
  std::vector<std::size_t> p(static_cast<std::size_t>(max_label) + 1), g(p.size()), both(p.size());
  for (std::size_t i = 0; i < gt.labels.size(); ++i) {
    ++p[pred.labels[i]];
    ++g[gt.labels[i]];
    if (pred.labels[i] == gt.labels[i]) ++both[gt.labels[i]];
  }
  double sum = 0.0;
  int present = 0;
  for (std::size_t l = 0; l < g.size(); ++l) {
    if (g[l] == 0) continue;
    sum += 2.0 * static_cast<double>(both[l]) / static_cast<double>(p[l] + g[l]);
    ++present;
  }
  return present ? sum / present : 0.0;
}

// ---------------------------------------------------------------------------
// Parameter sweep

struct SweepConfig {
  std::vector<double> sigmas{0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40};
  std::vector<int> ks{2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
  std::vector<double> lambdas{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  int realizations = 10;
  int width = 64;
  int height = 64;
  double fraction = 0.5;
  double beta = 1.0;
  std::uint64_t seed = 1;
  bool timing = false;  // runtime_ms is written as 0 unless set
};

inline SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  SweepConfig c;
  try {
    if (j.contains("sigmas")) c.sigmas = j.at("sigmas").get<std::vector<double>>();
    if (j.contains("ks")) c.ks = j.at("ks").get<std::vector<int>>();
    if (j.contains("lambdas")) c.lambdas = j.at("lambdas").get<std::vector<double>>();
    c.realizations = j.value("realizations", c.realizations);
    if (j.contains("size")) c.width = c.height = j.at("size").get<int>();
    c.width = j.value("width", c.width);
    c.height = j.value("height", c.height);
    c.fraction = j.value("fraction", c.fraction);
    c.beta = j.value("beta", c.beta);
    c.seed = j.value("seed", c.seed);
    c.timing = j.value("timing", c.timing);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed sweep config: ") + e.what());
  }
  if (c.realizations < 1) throw InvalidArgument("sweep: realizations must be >= 1");
  return c;
}

struct SweepRow {
  double sigma;
  int k;
  double lambda;
  int realization;
  double dsc;
  double energy;
  double cut_cost;
  double clamp_ratio;
  double runtime_ms;
};

inline std::uint64_t sigma_key(double sigma) { return static_cast<std::uint64_t>(std::llround(sigma * 1e6)); }

/// Scene for (k, realization) shared by every sigma and lambda.
inline Scene sweep_scene(const SweepConfig& c, int k, int r) {
  return synth_ellipses(k, c.width, c.height, derived_rng(c.seed, 21, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(r))());
}

/// Rows in (sigma, k, lambda, realization) order.
inline std::vector<SweepRow> run_sweep(const SweepConfig& c, SystemCache& cache = SystemCache::global()) {
  std::vector<SweepRow> rows;
  PriorSpec prior;
  prior.label_kind = LabelKind::potts;
  prior.data_kind = DataKind::gaussian;
  prior.beta = c.beta;
  for (double sigma : c.sigmas) {
    for (int k : c.ks) {
      std::vector<Scene> scenes;
      std::vector<Image> noisy;
      std::vector<std::vector<double>> terms;
      for (int r = 0; r < c.realizations; ++r) {
        scenes.push_back(sweep_scene(c, k, r));
        const std::uint64_t ns = derived_rng(c.seed, 22, sigma_key(sigma), (static_cast<std::uint64_t>(k) << 32) | r)();
        noisy.push_back(add_awgn(scenes.back().image, sigma, ns));
        terms.push_back(learn_data_terms(noisy.back(), scenes.back().truth, k, c.fraction, ns + 1));
      }
      for (double lambda : c.lambdas) {
        for (int r = 0; r < c.realizations; ++r) {
          const auto t0 = std::chrono::steady_clock::now();
          const SegmentResult seg = segment(noisy[r], terms[r], prior, lambda, k, cache);
          const auto t1 = std::chrono::steady_clock::now();
          SweepRow row{sigma, k, lambda, r, dice(seg.labels, scenes[r].truth), seg.solve.energy, seg.solve.cut_cost,
                       seg.solve.clamp.ratio(), 0.0};
          if (c.timing) row.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "sigma,k,lambda,realization,dsc,energy,cut_cost,clamp_ratio,runtime_ms\n";
  for (const auto& r : rows)
    out << format_number(r.sigma) << ',' << r.k << ',' << format_number(r.lambda) << ',' << r.realization << ','
        << format_number(r.dsc) << ',' << format_number(r.energy) << ',' << format_number(r.cut_cost) << ','
        << format_number(r.clamp_ratio) << ',' << format_number(r.runtime_ms) << '\n';
}

}  // namespace lscut
