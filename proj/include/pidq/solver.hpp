#pragma once

#include <cstdint>
#include <vector>

#include "pidq/discretize.hpp"
#include "pidq/dist.hpp"

namespace pidq {

struct SolverConfig {
  double step_size = 0.25;     // exponentiated-gradient step, halved on objective decrease
  int max_iters = 50'000;      // sweep budget
  double tol_obj = 1e-10;      // bits of objective change per sweep
  double tol_marginal = 1e-9;  // mass; marginal-matching tolerance
  double floor_eps = 1e-15;    // clamp before logs
  uint64_t seed = 0;

  void validate() const;
};

struct SolveTrace {
  std::vector<double> objective_per_sweep;  // H_q(Y|X1,X2) after each accepted sweep, bits
  double max_marginal_violation = 0.0;
  int sweeps = 0;
  bool converged = false;
};

struct SolveResult {
  JointDist q_star;
  SolveTrace trace;
};

// Conditional-independence coupling q0(x1,x2,y) = p(x1,y) p(x2,y) / p(y);
// lies in the marginal polytope exactly. Throws InfeasibleError when the two
// label marginals disagree.
JointDist feasible_init(const PairwiseMarginals& marginals);

// Maximize H_q(Y|X1,X2) over all q matching the two label marginals.
// Exponentiated-gradient ascent with analytic gradient
//   g(x1,x2,y) = log2 q(x1,x2) - log2 q(x1,x2,y),
// followed after each step by a KL projection back onto the constraint set:
// per y-slice iterative proportional fitting of rows to p(x1,y) and columns
// to p(x2,y). The objective is concave and the accepted trace is monotone;
// the optimum value equals the minimum of I_q({X1,X2};Y) over the polytope
// because q(y) is fixed by the constraints.
SolveResult solve_q_star(const PairwiseMarginals& marginals, const SolverConfig& config = {});

// Same, from a caller-supplied start (projected onto the polytope first).
SolveResult solve_q_star_from(JointDist q0, const PairwiseMarginals& marginals,
                              const SolverConfig& config);

// Objective H_q(Y|X1,X2) in bits, restricted to the support where both label
// marginals are positive. Exposed for gradient checks and oracles.
double conditional_entropy_objective(const JointDist& q, double floor_eps = 1e-15);

// Analytic gradient of the objective above, bits per unit mass, zero off
// support. Same layout as JointDist::probs.
std::vector<double> conditional_entropy_gradient(const JointDist& q, double floor_eps = 1e-15);

// Largest absolute deviation of q's pairwise marginals from the targets.
double marginal_violation(const JointDist& q, const PairwiseMarginals& marginals);

// Interaction values at the solved coupling.
//   R  = I_q*(X1;X2;Y)        U1 = I_q*(X1;Y|X2)       U2 = I_q*(X2;Y|X1)
//   S  = I_p({X1,X2};Y) - I_q*({X1,X2};Y)   (needs the full joint)
// The marginals-only overload leaves s and total_mi unset. Throws
// StaleSolutionError when q_star violates the given marginals by more than
// 10x tol_marginal.
PIDResult compute_pid(const JointDist& p, const SolveResult& solved,
                      const SolverConfig& config = {});
PIDResult compute_pid(const PairwiseMarginals& marginals, const SolveResult& solved,
                      const SolverConfig& config = {});

// discretize -> empirical joint -> solve -> extract, in one call.
PIDResult pid_from_samples(const SampleTable& table, const DiscretizeConfig& dconfig,
                           const SolverConfig& sconfig);

}  // namespace pidq
