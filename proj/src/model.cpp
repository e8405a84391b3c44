#include "pidq/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "pidq/errors.hpp"

namespace pidq {

namespace {

constexpr double kDegenerateFloor = 1e-9;

}  // namespace

void ModelLibrary::validate() const {
  std::set<std::string> dataset_ids;
  for (const LibraryEntry& e : entries) {
    if (!dataset_ids.insert(e.dataset_id).second) {
      throw ValidationError("duplicate dataset id '" + e.dataset_id + "' in library");
    }
    if (e.profile.degenerate) {
      throw ValidationError("library entry '" + e.dataset_id + "' has a degenerate profile");
    }
    std::set<std::string> model_ids;
    double prev = std::numeric_limits<double>::max();
    for (const RankedModel& m : e.models) {
      if (!model_ids.insert(m.id).second) {
        throw ValidationError("duplicate model id '" + m.id + "' in entry '" + e.dataset_id + "'");
      }
      if (m.score >= prev) {
        throw ValidationError("models of entry '" + e.dataset_id +
                              "' are not strictly ordered by score");
      }
      prev = m.score;
    }
  }
}

PIDResult model_pid(const SampleTable& predictions, const DiscretizeConfig& dconfig,
                    const SolverConfig& sconfig) {
  return pid_from_samples(predictions, dconfig, sconfig);
}

NormalizedPID normalize_pid(const PIDResult& pid) {
  const double r = std::max(pid.r, 0.0);
  const double u1 = std::max(pid.u1, 0.0);
  const double u2 = std::max(pid.u2, 0.0);
  const double s = std::max(pid.s.value_or(0.0), 0.0);
  const double total = r + u1 + u2 + s;

  NormalizedPID out;
  if (total <= kDegenerateFloor) {
    out.degenerate = true;
    return out;
  }
  out.r_hat = r / total;
  out.u1_hat = u1 / total;
  out.u2_hat = u2 / total;
  out.s_hat = s / total;
  return out;
}

AgreementScore agreement(const PIDResult& dataset_pid, const PIDResult& model_pid) {
  const NormalizedPID w = normalize_pid(dataset_pid);
  if (w.degenerate) {
    throw ArgumentError("agreement: dataset PID is degenerate (no interaction mass)");
  }
  AgreementScore a;
  a.r = w.r_hat * model_pid.r;
  a.u1 = w.u1_hat * model_pid.u1;
  a.u2 = w.u2_hat * model_pid.u2;
  a.s = w.s_hat * model_pid.s.value_or(0.0);
  a.total = a.r + a.u1 + a.u2 + a.s;
  return a;
}

double dataset_similarity(const NormalizedPID& a, const NormalizedPID& b) {
  if (a.degenerate || b.degenerate) {
    throw ArgumentError("dataset_similarity: degenerate profile");
  }
  return std::fabs(a.r_hat - b.r_hat) + std::fabs(a.u1_hat - b.u1_hat) +
         std::fabs(a.u2_hat - b.u2_hat) + std::fabs(a.s_hat - b.s_hat);
}

ModelSelection select_models(const NormalizedPID& target, const ModelLibrary& library,
                             int top_k) {
  if (library.entries.empty()) throw ArgumentError("select_models: empty library");
  if (top_k < 1) throw ArgumentError("select_models: top_k must be >= 1");
  library.validate();

  const LibraryEntry* best = nullptr;
  double best_sim = 0.0;
  for (const LibraryEntry& e : library.entries) {
    const double sim = dataset_similarity(target, e.profile);
    if (!best || sim < best_sim || (sim == best_sim && e.dataset_id < best->dataset_id)) {
      best = &e;
      best_sim = sim;
    }
  }

  ModelSelection out;
  out.dataset_id = best->dataset_id;
  out.similarity = best_sim;
  const int k = std::min<int>(top_k, static_cast<int>(best->models.size()));
  for (int i = 0; i < k; ++i) out.models.push_back(best->models[i].id);
  return out;
}

namespace {

// Binary joint with the label produced by `fn` and then flipped with
// probability `noise`; inputs uniform and independent.
JointDist noisy_gate(double noise, int (*fn)(int, int)) {
  JointDist d(Cardinalities{2, 2, 2});
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const int y = fn(a, b);
      d.at(a, b, y) += 0.25 * (1.0 - noise);
      d.at(a, b, 1 - y) += 0.25 * noise;
    }
  return d;
}

JointDist redundant_joint(double noise) {
  // x1 = x2 exactly, y a noisy copy of both
  JointDist d(Cardinalities{2, 2, 2});
  for (int a = 0; a < 2; ++a) {
    d.at(a, a, a) += 0.5 * (1.0 - noise);
    d.at(a, a, 1 - a) += 0.5 * noise;
  }
  return d;
}

JointDist unique_joint(double noise, bool first) {
  // y follows one modality; the other is an independent coin
  JointDist d(Cardinalities{2, 2, 2});
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const int y = first ? a : b;
      d.at(a, b, y) += 0.25 * (1.0 - noise);
      d.at(a, b, 1 - y) += 0.25 * noise;
    }
  return d;
}

JointDist blend(const JointDist& a, const JointDist& b, double wa) {
  JointDist out = a;
  for (size_t i = 0; i < out.probs.size(); ++i) {
    out.probs[i] = wa * a.probs[i] + (1.0 - wa) * b.probs[i];
  }
  return out;
}

NormalizedPID profile_of(const JointDist& p, const SolverConfig& cfg) {
  const PairwiseMarginals m = pairwise_marginals(p, false);
  return normalize_pid(compute_pid(p, solve_q_star(m, cfg), cfg));
}

}  // namespace

ModelLibrary builtin_library(const SolverConfig& sconfig) {
  const double noise = 0.1;
  const JointDist d_r = redundant_joint(noise);
  const JointDist d_u1 = unique_joint(noise, true);
  const JointDist d_u2 = unique_joint(noise, false);
  const JointDist d_s = noisy_gate(noise, [](int a, int b) { return a ^ b; });

  struct Spec {
    const char* id;
    JointDist joint;
    std::vector<RankedModel> models;
  };
  std::vector<Spec> specs;
  specs.push_back({"synthetic_r", d_r,
                   {{"agree", 0.92}, {"align", 0.90}, {"additive", 0.88}}});
  specs.push_back({"synthetic_u1", d_u1,
                   {{"lower", 0.91}, {"recon", 0.89}, {"additive", 0.85}}});
  specs.push_back({"synthetic_u2", d_u2,
                   {{"recon", 0.90}, {"lower", 0.88}, {"elem", 0.84}}});
  specs.push_back({"synthetic_s", d_s,
                   {{"tensor", 0.87}, {"mult", 0.86}, {"mult_transformer", 0.85}}});
  specs.push_back({"synthetic_rs", blend(d_r, d_s, 0.5),
                   {{"tensor", 0.86}, {"agree", 0.84}, {"mult", 0.83}}});
  specs.push_back({"synthetic_ru1", blend(d_r, d_u1, 0.5),
                   {{"agree", 0.88}, {"lower", 0.87}, {"additive", 0.85}}});
  specs.push_back({"synthetic_ru2", blend(d_r, d_u2, 0.5),
                   {{"align", 0.88}, {"recon", 0.86}, {"additive", 0.84}}});
  specs.push_back({"synthetic_u1u2", blend(d_u1, d_u2, 0.5),
                   {{"lower", 0.89}, {"recon", 0.88}, {"elem", 0.83}}});
  specs.push_back({"synthetic_u1s", blend(d_u1, d_s, 0.5),
                   {{"mult", 0.85}, {"lower", 0.84}, {"tensor", 0.83}}});
  specs.push_back({"synthetic_mix", blend(blend(d_r, d_u1, 0.5), blend(d_u2, d_s, 0.5), 0.5),
                   {{"mult_transformer", 0.84}, {"tensor", 0.83}, {"recon", 0.82}}});

  ModelLibrary lib;
  for (Spec& s : specs) {
    LibraryEntry e;
    e.dataset_id = s.id;
    e.profile = profile_of(s.joint, sconfig);
    e.models = std::move(s.models);
    lib.entries.push_back(std::move(e));
  }
  lib.validate();
  return lib;
}

}  // namespace pidq
