#pragma once

#include <string>
#include <vector>

#include "pidq/discretize.hpp"
#include "pidq/dist.hpp"
#include "pidq/solver.hpp"

namespace pidq {

// Interaction profile rescaled to a point on the simplex. Degenerate when
// the four raw values carry no mass (total MI ~ 0).
struct NormalizedPID {
  double r_hat = 0.0;
  double u1_hat = 0.0;
  double u2_hat = 0.0;
  double s_hat = 0.0;
  bool degenerate = false;
};

struct AgreementScore {
  double r = 0.0, u1 = 0.0, u2 = 0.0, s = 0.0;
  double total = 0.0;
};

struct RankedModel {
  std::string id;
  double score = 0.0;
};

struct LibraryEntry {
  std::string dataset_id;
  NormalizedPID profile;
  std::vector<RankedModel> models;  // strictly descending by score
};

struct ModelLibrary {
  std::vector<LibraryEntry> entries;
  void validate() const;
};

struct ModelSelection {
  std::string dataset_id;
  double similarity = 0.0;
  std::vector<std::string> models;
};

// Interactions captured by a trained model: same pipeline as
// pid_from_samples with the label column holding the model's predictions.
PIDResult model_pid(const SampleTable& predictions, const DiscretizeConfig& dconfig,
                    const SolverConfig& sconfig);

// Divide each interaction by the sum of the four; small negatives (numerical
// noise) are floored at zero first so the result stays on the simplex.
NormalizedPID normalize_pid(const PIDResult& pid);

// Per-interaction agreement: normalized dataset weight times the model's raw
// value in bits. Note the asymmetry: only the dataset side is normalized.
AgreementScore agreement(const PIDResult& dataset_pid, const PIDResult& model_pid);

// L1 distance between normalized profiles; a metric with range [0, 2].
double dataset_similarity(const NormalizedPID& a, const NormalizedPID& b);

// Nearest library entry by profile distance (ties to the lowest dataset_id),
// returning its top_k models in stored order.
ModelSelection select_models(const NormalizedPID& target, const ModelLibrary& library,
                             int top_k = 3);

// Ten synthetic reference profiles (four specialized interactions plus six
// mixtures), computed from small closed-form joints at call time.
ModelLibrary builtin_library(const SolverConfig& sconfig = {});

}  // namespace pidq
