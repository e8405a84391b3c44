#include "pidq/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pidq/errors.hpp"
#include "pidq/rng.hpp"

namespace pidq {

void SampleTable::validate() {
  const int n = rows();
  if (n < 1) throw ValidationError("sample table is empty");
  if (d1 < 1 || d2 < 1) throw ValidationError("feature dimensions must be >= 1");
  if (static_cast<int>(x1.size()) != n * d1) {
    throw ValidationError("x1 has " + std::to_string(x1.size()) + " values, expected " +
                          std::to_string(static_cast<size_t>(n) * d1));
  }
  if (static_cast<int>(x2.size()) != n * d2) {
    throw ValidationError("x2 has " + std::to_string(x2.size()) + " values, expected " +
                          std::to_string(static_cast<size_t>(n) * d2));
  }
  for (size_t i = 0; i < x1.size(); ++i) {
    if (!std::isfinite(x1[i])) {
      throw ValidationError("x1 value at row " + std::to_string(i / d1) + " is not finite");
    }
  }
  for (size_t i = 0; i < x2.size(); ++i) {
    if (!std::isfinite(x2[i])) {
      throw ValidationError("x2 value at row " + std::to_string(i / d2) + " is not finite");
    }
  }
  int max_y = 0;
  for (int i = 0; i < n; ++i) {
    if (y[i] < 0) throw ValidationError("label at row " + std::to_string(i) + " is negative");
    max_y = std::max(max_y, y[i]);
  }
  if (ny == 0) ny = max_y + 1;
  for (int i = 0; i < n; ++i) {
    if (y[i] >= ny) {
      throw ValidationError("label " + std::to_string(y[i]) + " at row " + std::to_string(i) +
                            " is outside [0, " + std::to_string(ny) + ")");
    }
  }
}

void DiscretizeConfig::validate() const {
  if (bins_or_k != 0 && bins_or_k < 2) {
    throw ArgumentError("bins_or_k must be 0 (auto) or an integer >= 2, got " +
                        std::to_string(bins_or_k));
  }
  if (kmeans_max_iters < 1 || kmeans_restarts < 1) {
    throw ArgumentError("kmeans iteration and restart counts must be >= 1");
  }
}

int auto_bin_count(int n) {
  const int b = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(n)) - 1e-9));
  return std::clamp(b, 2, 100);
}

BinnedColumn bin_scalar_features(std::span<const double> values, const DiscretizeConfig& config) {
  config.validate();
  const int n = static_cast<int>(values.size());
  if (n < 1) throw ArgumentError("bin_scalar_features: empty input");
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(values[i])) {
      throw ValidationError("value at row " + std::to_string(i) + " is not finite");
    }
  }

  double lo = values[0], hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  BinnedColumn out;
  if (lo == hi) {
    // degenerate modality: one bin, caller should surface a warning
    out.bins = 1;
    out.degenerate = true;
    out.codes.assign(n, 0);
    return out;
  }

  const int bins = config.bins_or_k > 0 ? config.bins_or_k : auto_bin_count(n);
  out.bins = bins;

  const double width = (hi - lo) / bins;
  out.edges.reserve(static_cast<size_t>(bins) - 1);
  for (int e = 1; e < bins; ++e) out.edges.push_back(lo + width * e);

  out.codes.resize(n);
  for (int i = 0; i < n; ++i) {
    int b = static_cast<int>(std::floor((values[i] - lo) / width));
    out.codes[i] = std::clamp(b, 0, bins - 1);  // edge bins absorb everything outside [lo, hi)
  }
  return out;
}

namespace {

double sq_dist(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

struct LloydRun {
  std::vector<int> assign;
  std::vector<double> centroids;
  double wcss = 0.0;
  std::vector<double> wcss_per_iter;
};

LloydRun lloyd_once(std::span<const double> rows, int n, int d, int k, std::mt19937_64& rng,
                    int max_iters) {
  std::vector<double> centroids(static_cast<size_t>(k) * d);

  // k-means++ seeding
  {
    const int first = static_cast<int>(rng_below(rng, n));
    std::copy_n(rows.data() + static_cast<size_t>(first) * d, d, centroids.begin());
    std::vector<double> dist2(n, std::numeric_limits<double>::max());
    for (int c = 1; c < k; ++c) {
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d2 = sq_dist(rows.data() + static_cast<size_t>(i) * d,
                                  centroids.data() + static_cast<size_t>(c - 1) * d, d);
        dist2[i] = std::min(dist2[i], d2);
        total += dist2[i];
      }
      int pick = 0;
      if (total > 0.0) {
        double target = rng_unit(rng) * total;
        for (int i = 0; i < n; ++i) {
          target -= dist2[i];
          if (target <= 0.0) {
            pick = i;
            break;
          }
          pick = i;
        }
      } else {
        pick = static_cast<int>(rng_below(rng, n));
      }
      std::copy_n(rows.data() + static_cast<size_t>(pick) * d, d,
                  centroids.begin() + static_cast<size_t>(c) * d);
    }
  }

  std::vector<int> assign(n, -1);
  std::vector<int> count(k, 0);
  std::vector<double> sums(static_cast<size_t>(k) * d, 0.0);
  std::vector<double> wcss_per_iter;

  double wcss = 0.0;
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    wcss = 0.0;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_dist(rows.data() + static_cast<size_t>(i) * d, centroids.data(), d);
      for (int c = 1; c < k; ++c) {
        const double d2 = sq_dist(rows.data() + static_cast<size_t>(i) * d,
                                  centroids.data() + static_cast<size_t>(c) * d, d);
        if (d2 < best_d) {
          best_d = d2;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
      wcss += best_d;
    }
    wcss_per_iter.push_back(wcss);

    std::fill(count.begin(), count.end(), 0);
    std::fill(sums.begin(), sums.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      count[assign[i]]++;
      for (int j = 0; j < d; ++j) sums[static_cast<size_t>(assign[i]) * d + j] += rows[static_cast<size_t>(i) * d + j];
    }

    for (int c = 0; c < k; ++c) {
      if (count[c] == 0) {
        // re-seed an emptied cluster from the point farthest from its centroid
        int far = 0;
        double far_d = -1.0;
        for (int i = 0; i < n; ++i) {
          const double d2 = sq_dist(rows.data() + static_cast<size_t>(i) * d,
                                    centroids.data() + static_cast<size_t>(assign[i]) * d, d);
          if (d2 > far_d) {
            far_d = d2;
            far = i;
          }
        }
        std::copy_n(rows.data() + static_cast<size_t>(far) * d, d,
                    centroids.begin() + static_cast<size_t>(c) * d);
        changed = true;
        continue;
      }
      for (int j = 0; j < d; ++j) {
        centroids[static_cast<size_t>(c) * d + j] = sums[static_cast<size_t>(c) * d + j] / count[c];
      }
    }
    if (!changed) break;
  }

  // final assignment pass so wcss matches the returned centroids
  wcss = 0.0;
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double best_d = sq_dist(rows.data() + static_cast<size_t>(i) * d, centroids.data(), d);
    for (int c = 1; c < k; ++c) {
      const double d2 = sq_dist(rows.data() + static_cast<size_t>(i) * d,
                                centroids.data() + static_cast<size_t>(c) * d, d);
      if (d2 < best_d) {
        best_d = d2;
        best = c;
      }
    }
    assign[i] = best;
    wcss += best_d;
  }
  return {std::move(assign), std::move(centroids), wcss, std::move(wcss_per_iter)};
}

}  // namespace

KMeansResult kmeans_discretize(std::span<const double> rows, int n, int d, int k, uint64_t seed,
                               const DiscretizeConfig& config) {
  if (n < 1 || d < 1) throw ArgumentError("kmeans_discretize: empty input");
  if (static_cast<int>(rows.size()) != n * d) {
    throw ArgumentError("kmeans_discretize: rows size does not match n*d");
  }
  if (k < 1) throw ArgumentError("kmeans_discretize: k must be >= 1");
  if (k > n) {
    throw ArgumentError("kmeans_discretize: k=" + std::to_string(k) + " exceeds n=" +
                        std::to_string(n));
  }
  for (int i = 0; i < n * d; ++i) {
    if (!std::isfinite(rows[i])) {
      throw ValidationError("feature at row " + std::to_string(i / d) + " is not finite");
    }
  }

  LloydRun best;
  best.wcss = std::numeric_limits<double>::max();
  const int restarts = std::max(1, config.kmeans_restarts);
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(r + 1));
    LloydRun run = lloyd_once(rows, n, d, k, rng, config.kmeans_max_iters);
    if (run.wcss < best.wcss) best = std::move(run);
  }
  return {std::move(best.assign), std::move(best.centroids), best.wcss,
          std::move(best.wcss_per_iter)};
}

JointDist empirical_joint(std::span<const int> x1_codes, std::span<const int> x2_codes,
                          std::span<const int> y, Cardinalities card) {
  const size_t n = y.size();
  if (n == 0) throw ValidationError("empirical_joint: no samples");
  if (x1_codes.size() != n || x2_codes.size() != n) {
    throw ValidationError("empirical_joint: column lengths differ");
  }
  card.validate();

  JointDist d(card);
  const double w = 1.0 / static_cast<double>(n);
  for (size_t i = 0; i < n; ++i) {
    if (x1_codes[i] < 0 || x1_codes[i] >= card.n1) {
      throw ValidationError("x1 code " + std::to_string(x1_codes[i]) + " at row " +
                            std::to_string(i) + " is outside [0, " + std::to_string(card.n1) + ")");
    }
    if (x2_codes[i] < 0 || x2_codes[i] >= card.n2) {
      throw ValidationError("x2 code " + std::to_string(x2_codes[i]) + " at row " +
                            std::to_string(i) + " is outside [0, " + std::to_string(card.n2) + ")");
    }
    if (y[i] < 0 || y[i] >= card.ny) {
      throw ValidationError("label " + std::to_string(y[i]) + " at row " + std::to_string(i) +
                            " is outside [0, " + std::to_string(card.ny) + ")");
    }
    d.at(x1_codes[i], x2_codes[i], y[i]) += w;
  }
  return d;
}

ModalityCoding discretize_modality(std::span<const double> rows, int n, int d,
                                   const DiscretizeConfig& config) {
  config.validate();
  ModalityCoding out;
  out.dim = d;
  if (config.method == DiscretizeConfig::Method::histogram) {
    if (d != 1) {
      throw ArgumentError("histogram binning needs scalar features; use kmeans for " +
                          std::to_string(d) + "-dimensional modalities");
    }
    BinnedColumn b = bin_scalar_features(rows, config);
    out.codes = std::move(b.codes);
    out.cardinality = b.bins;
    out.edges = std::move(b.edges);
    out.degenerate = b.degenerate;
    out.method = "histogram";
    return out;
  }

  int k = config.bins_or_k > 0 ? config.bins_or_k : auto_bin_count(n);
  k = std::min(k, n);
  KMeansResult km = kmeans_discretize(rows, n, d, k, config.seed, config);
  out.codes = std::move(km.codes);
  out.cardinality = k;
  out.centroids = std::move(km.centroids);
  out.method = "kmeans";
  return out;
}

DiscretizedTable discretize_table(SampleTable table, const DiscretizeConfig& config) {
  table.validate();
  const int n = table.rows();

  DiscretizeConfig c1 = config;
  DiscretizeConfig c2 = config;
  // vector-valued modalities can only be clustered
  if (table.d1 > 1) c1.method = DiscretizeConfig::Method::kmeans;
  if (table.d2 > 1) c2.method = DiscretizeConfig::Method::kmeans;
  c2.seed = config.seed + 0x517cc1b727220a95ULL;  // decorrelate the two modalities

  DiscretizedTable out;
  out.x1 = discretize_modality(table.x1, n, table.d1, c1);
  out.x2 = discretize_modality(table.x2, n, table.d2, c2);
  Cardinalities card{out.x1.cardinality, out.x2.cardinality, table.ny};
  out.joint = empirical_joint(out.x1.codes, out.x2.codes, table.y, card);
  return out;
}

}  // namespace pidq
