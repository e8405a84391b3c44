#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pidq/dist.hpp"

namespace pidq {

// Raw sample table: n rows of features per modality plus a discrete label.
// Features are stored row-major (row i spans [i*dim, (i+1)*dim)).
struct SampleTable {
  std::vector<double> x1;
  int d1 = 1;
  std::vector<double> x2;
  int d2 = 1;
  std::vector<int> y;
  int ny = 0;  // 0 means infer max(y)+1 at validation

  int rows() const { return static_cast<int>(y.size()); }
  void validate();  // infers ny when 0; throws on shape/range problems
};

struct DiscretizeConfig {
  enum class Method { histogram, kmeans };
  Method method = Method::histogram;
  int bins_or_k = 0;  // 0 = auto (cube root of n, clamped to [2, 100]); else >= 2
  uint64_t seed = 0;
  int kmeans_max_iters = 100;
  int kmeans_restarts = 5;

  void validate() const;
};

// Result of binning one scalar feature column.
struct BinnedColumn {
  std::vector<int> codes;
  std::vector<double> edges;  // interior edges only; first/last bins unbounded
  int bins = 0;
  bool degenerate = false;  // all inputs identical -> single bin
};

// Number of bins under the auto rule: ceil(n^(1/3)) clamped to [2, 100].
int auto_bin_count(int n);

// Fixed-width bins between the empirical min and max, with the first and
// last bin extended to +-infinity. Monotone: v <= w implies bin(v) <= bin(w).
BinnedColumn bin_scalar_features(std::span<const double> values, const DiscretizeConfig& config);

// Lloyd iterations with k-means++ seeding; deterministic given seed; best of
// config.kmeans_restarts restarts by within-cluster sum of squares. An
// emptied cluster is re-seeded from the point farthest from its centroid.
struct KMeansResult {
  std::vector<int> codes;
  std::vector<double> centroids;  // k rows of d, row-major
  double wcss = 0.0;
  std::vector<double> wcss_per_iter;  // of the winning restart; non-increasing
};
KMeansResult kmeans_discretize(std::span<const double> rows, int n, int d, int k, uint64_t seed,
                               const DiscretizeConfig& config);

// Empirical joint: probs[i1][i2][iy] = count(i1,i2,iy) / n.
JointDist empirical_joint(std::span<const int> x1_codes, std::span<const int> x2_codes,
                          std::span<const int> y, Cardinalities card);

// One discretized modality plus the metadata the CLI writes to a sidecar.
struct ModalityCoding {
  std::vector<int> codes;
  int cardinality = 0;
  std::string method;             // "histogram" | "kmeans"
  std::vector<double> edges;      // histogram only
  std::vector<double> centroids;  // kmeans only, k x d row-major
  int dim = 1;
  bool degenerate = false;
};
ModalityCoding discretize_modality(std::span<const double> rows, int n, int d,
                                   const DiscretizeConfig& config);

// Full preprocessing of a sample table into a joint distribution.
struct DiscretizedTable {
  ModalityCoding x1;
  ModalityCoding x2;
  JointDist joint;
};
DiscretizedTable discretize_table(SampleTable table, const DiscretizeConfig& config);

}  // namespace pidq
