#pragma once

#include <span>
#include <vector>

#include "pidq/dist.hpp"
#include "pidq/matrix.hpp"
#include "pidq/solver.hpp"

namespace pidq {

struct DisagreementConfig {
  enum class Distance { zero_one };
  Distance distance = Distance::zero_one;
  double c = 1.0;  // scale constant in the uniqueness bound; task-dependent
  enum class TieBreak { lowest_index };
  TieBreak tie_break = TieBreak::lowest_index;

  void validate() const;
};

// A joint distribution over two prescribed marginals.
struct Coupling {
  Matrix joint;          // |mu| x |nu| masses
  double entropy = 0.0;  // bits
};

struct PerfBounds {
  double p_lower = 0.0;
  double p_upper = 0.0;
  double p_hat = 0.0;  // (p_lower + p_upper) / 2
};

struct SynergyBounds {
  double s_r_lower = 0.0;  // R - I(X1;X2) + min_r I_r(X1;X2|Y)
  double s_u_lower = 0.0;  // alpha * c - max(U1, U2)
  double s_upper = 0.0;    // H(X1,X2) + H(Y) - H_coupling - R - U1 - U2
  double min_cmi = 0.0;    // minimized I_r(X1;X2|Y)
  double alpha = 0.0;      // modality disagreement in [0,1]
  double coupling_entropy = 0.0;
  // audit components
  double r = 0.0, u1 = 0.0, u2 = 0.0;
  double mi_x1x2 = 0.0;  // I_p(X1;X2) from the modality marginal
  // The greedy coupling can overshoot the true entropy minimum; when that
  // pushes s_upper below a lower bound the report is flagged rather than
  // silently reordered.
  bool upper_slack = false;
};

struct MinCmiResult {
  JointDist r_star;
  double value = 0.0;  // I_{r*}(X1;X2|Y), bits
  int cycles = 0;
  bool converged = false;
  std::vector<double> entropy_per_cycle;  // H_r(X1,X2,Y) after each IPF cycle
  double max_violation = 0.0;
};

// Minimize I_r(X1;X2|Y) over joints matching all three pairwise marginals.
// On that set H(X1,Y), H(X2,Y) and H(Y) are fixed, so the minimum is the
// maximum of H_r(X1,X2,Y); cyclic iterative proportional fitting from the
// uniform-over-support start converges to it. Requires m12.
MinCmiResult min_conditional_mi(const PairwiseMarginals& marginals,
                                const SolverConfig& config = {});

// S_R = R - I(X1;X2) + min_cmi. R must come from the same marginals.
// May be negative (valid but vacuous).
double synergy_lower_redundancy(const PairwiseMarginals& marginals, double r,
                                const SolverConfig& config = {});

// f(x) = argmax_y p(y|x), ties to the lowest label, zero-mass rows to 0.
std::vector<int> bayes_classifier(
    const Matrix& m_iy,
    DisagreementConfig::TieBreak tie_break = DisagreementConfig::TieBreak::lowest_index);

// alpha = sum_{x1,x2} p(x1,x2) * 1[f1(x1) != f2(x2)]
double disagreement(const Matrix& m12, std::span<const int> f1, std::span<const int> f2,
                    const DisagreementConfig& config = {});

// S_U = alpha * c - max(U1, U2). May be negative.
double synergy_lower_uniqueness(double alpha, double u1, double u2,
                                const DisagreementConfig& config = {});

// Largest-mass pairing: repeatedly match the biggest remaining atoms of mu
// and nu and assign the smaller of the two masses. Exact marginals by
// construction; O(k log k); entropy within a small additive gap of the
// NP-hard minimum.
Coupling min_entropy_coupling_greedy(std::span<const double> mu, std::span<const double> nu);

struct SynergyUpperResult {
  double value = 0.0;
  double coupling_entropy = 0.0;
};

// S_upper over the relaxed set matching only p(x1,x2) and p(y): flatten
// (X1,X2) into one variable and couple it with Y at (approximately) minimum
// entropy. Requires m12.
SynergyUpperResult synergy_upper(const PairwiseMarginals& marginals, double r, double u1,
                                 double u2);

// Accuracy of the best multimodal predictor from total information:
//   2^(I - H(Y)) <= P_acc <= (I + 1) / log2 |Y|,
// clamped into [0,1] with p_lower additionally capped at p_upper (the raw
// formulas can cross only for inputs with I > H(Y), which no distribution
// produces). ny = 1 is degenerate and returns (1,1,1).
PerfBounds performance_bounds(double total_mi, double h_y, int ny);

// Range mode: total information bracketed by R+U1+U2+max(s_lower,0) and
// R+U1+U2+s_upper.
PerfBounds performance_bounds_range(double r, double u1, double u2, double s_lower,
                                    double s_upper, double h_y, int ny);

// Error ceiling for purely contrastive representations:
// 1 - 2^(co_info - H(Y)), clamped to [0,1]. Base 2 keeps the units
// consistent with the rest of the library.
double cl_suboptimality_bound(double co_info, double h_y);

// All bounds from one marginal set; (r, u1, u2) must come from the solver on
// the same marginals. Requires m12.
SynergyBounds compute_synergy_bounds(const PairwiseMarginals& marginals, double r, double u1,
                                     double u2, const SolverConfig& scfg = {},
                                     const DisagreementConfig& dcfg = {});

// Analytic gradient of the joint-entropy objective H(r) = -sum r log2 r that
// the conditional-MI minimizer maximizes: dH/dr_i = -(log2 r_i + 1/ln 2).
// Zero cells stay zero (off the support).
std::vector<double> joint_entropy_gradient(std::span<const double> r,
                                           double floor_eps = 1e-15);

}  // namespace pidq
