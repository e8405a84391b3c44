#include "pidq/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pidq/errors.hpp"

namespace pidq {

namespace {

constexpr double kInvLn2 = 1.4426950408889634;
constexpr int kIpfPassesPerSweep = 400;
constexpr int kIpfPassesPolish = 5'000;
constexpr int kMaxHalvings = 60;

// One slice of the constraint polytope: for fixed y, q(.,.,y) is a
// transportation matrix with row sums p(x1,y) and column sums p(x2,y).
// Alternating row/column rescaling is the exact KL projection onto it.
void ipf_project_slice(JointDist& q, const PairwiseMarginals& m, int iy, double tol,
                       int max_passes) {
  const int n1 = q.card.n1, n2 = q.card.n2;

  for (int pass = 0; pass < max_passes; ++pass) {
    // rows -> p(x1, y)
    for (int i1 = 0; i1 < n1; ++i1) {
      const double target = m.m1y.at(i1, iy);
      double row = 0.0;
      for (int i2 = 0; i2 < n2; ++i2) row += q.at(i1, i2, iy);
      if (target <= 0.0 || row <= 0.0) {
        for (int i2 = 0; i2 < n2; ++i2) q.at(i1, i2, iy) = 0.0;
        continue;
      }
      const double scale = target / row;
      for (int i2 = 0; i2 < n2; ++i2) q.at(i1, i2, iy) *= scale;
    }
    // columns -> p(x2, y), tracking how far rows drifted
    double viol = 0.0;
    for (int i2 = 0; i2 < n2; ++i2) {
      const double target = m.m2y.at(i2, iy);
      double col = 0.0;
      for (int i1 = 0; i1 < n1; ++i1) col += q.at(i1, i2, iy);
      if (target <= 0.0 || col <= 0.0) {
        for (int i1 = 0; i1 < n1; ++i1) q.at(i1, i2, iy) = 0.0;
        continue;
      }
      const double scale = target / col;
      for (int i1 = 0; i1 < n1; ++i1) q.at(i1, i2, iy) *= scale;
    }
    for (int i1 = 0; i1 < n1; ++i1) {
      double row = 0.0;
      for (int i2 = 0; i2 < n2; ++i2) row += q.at(i1, i2, iy);
      viol = std::max(viol, std::fabs(row - m.m1y.at(i1, iy)));
    }
    if (viol < tol) return;
  }
}

void ipf_project(JointDist& q, const PairwiseMarginals& m, double tol,
                 int max_passes = kIpfPassesPerSweep) {
  for (int iy = 0; iy < q.card.ny; ++iy) ipf_project_slice(q, m, iy, tol, max_passes);
}

// When the optimum sits on the polytope boundary, plain scaling approaches
// the vanishing cells only at a 1/k rate and the residual stalls. Cells that
// are negligible within both their row and their column are the stuck mass:
// zero them and refit on the reduced support, where scaling converges
// geometrically again.
void polish_feasibility(JointDist& q, const PairwiseMarginals& m, double tol) {
  const int n1 = q.card.n1, n2 = q.card.n2, ny = q.card.ny;
  for (int round = 0; round < 50; ++round) {
    ipf_project(q, m, tol, kIpfPassesPolish);
    const double viol = marginal_violation(q, m);
    if (viol <= tol) return;

    const double threshold = 10.0 * viol;
    bool pruned = false;
    for (int iy = 0; iy < ny; ++iy) {
      for (int i1 = 0; i1 < n1; ++i1) {
        for (int i2 = 0; i2 < n2; ++i2) {
          const double cell = q.at(i1, i2, iy);
          if (cell <= 0.0 || cell > threshold) continue;
          double row_max = 0.0, col_max = 0.0;
          for (int j = 0; j < n2; ++j) row_max = std::max(row_max, q.at(i1, j, iy));
          for (int i = 0; i < n1; ++i) col_max = std::max(col_max, q.at(i, i2, iy));
          if (cell <= 1e-3 * row_max && cell <= 1e-3 * col_max) {
            q.at(i1, i2, iy) = 0.0;
            pruned = true;
          }
        }
      }
    }
    if (!pruned) return;  // nothing left to unblock; report the residual as-is
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (step_size <= 0.0 || step_size > 1.0) throw ArgumentError("step_size must be in (0, 1]");
  if (max_iters < 1) throw ArgumentError("max_iters must be >= 1");
  if (tol_obj <= 0.0 || tol_marginal <= 0.0 || floor_eps <= 0.0) {
    throw ArgumentError("solver tolerances must be positive");
  }
}

JointDist feasible_init(const PairwiseMarginals& m) {
  // label-marginal agreement decides feasibility, so check it before the
  // generic shape/normalization validation
  if (m.m1y.cols == m.m2y.cols) {
    const auto py1 = m.m1y.col_sums();
    const auto py2 = m.m2y.col_sums();
    for (int y = 0; y < m.ny(); ++y) {
      if (std::fabs(py1[y] - py2[y]) > kCrossMarginalTol) {
        std::ostringstream os;
        os << "label marginals disagree at y=" << y << ": " << py1[y] << " vs " << py2[y];
        throw InfeasibleError(os.str());
      }
    }
  }
  m.validate();
  const auto py1 = m.m1y.col_sums();
  const auto py2 = m.m2y.col_sums();

  JointDist q(Cardinalities{m.n1(), m.n2(), m.ny()});
  for (int iy = 0; iy < m.ny(); ++iy) {
    const double py = 0.5 * (py1[iy] + py2[iy]);
    if (py <= 0.0) continue;  // zero-mass label slice stays zero
    for (int i1 = 0; i1 < m.n1(); ++i1) {
      const double a = m.m1y.at(i1, iy);
      if (a <= 0.0) continue;
      for (int i2 = 0; i2 < m.n2(); ++i2) {
        const double b = m.m2y.at(i2, iy);
        if (b <= 0.0) continue;
        q.at(i1, i2, iy) = a * b / py;
      }
    }
  }
  return q;
}

double conditional_entropy_objective(const JointDist& q, double floor_eps) {
  // H(Y|X1,X2) = H(X1,X2,Y) - H(X1,X2), with 0 cells skipped and a floor
  // before each log so boundary iterates stay finite.
  const int n1 = q.card.n1, n2 = q.card.n2, ny = q.card.ny;
  double h_joint = 0.0, h_pair = 0.0;
  for (int i1 = 0; i1 < n1; ++i1) {
    for (int i2 = 0; i2 < n2; ++i2) {
      double q12 = 0.0;
      for (int iy = 0; iy < ny; ++iy) {
        const double p = q.at(i1, i2, iy);
        if (p > 0.0) {
          h_joint -= p * std::log(std::max(p, floor_eps));
          q12 += p;
        }
      }
      if (q12 > 0.0) h_pair -= q12 * std::log(std::max(q12, floor_eps));
    }
  }
  return (h_joint - h_pair) * kInvLn2;
}

std::vector<double> conditional_entropy_gradient(const JointDist& q, double floor_eps) {
  const int n1 = q.card.n1, n2 = q.card.n2, ny = q.card.ny;
  std::vector<double> g(q.probs.size(), 0.0);
  for (int i1 = 0; i1 < n1; ++i1) {
    for (int i2 = 0; i2 < n2; ++i2) {
      double q12 = 0.0;
      for (int iy = 0; iy < ny; ++iy) q12 += q.at(i1, i2, iy);
      if (q12 <= 0.0) continue;
      const double log_q12 = std::log(std::max(q12, floor_eps));
      for (int iy = 0; iy < ny; ++iy) {
        const double p = q.at(i1, i2, iy);
        if (p <= 0.0) continue;
        g[q.idx(i1, i2, iy)] = (log_q12 - std::log(std::max(p, floor_eps))) * kInvLn2;
      }
    }
  }
  return g;
}

double marginal_violation(const JointDist& q, const PairwiseMarginals& m) {
  double viol = 0.0;
  for (int i1 = 0; i1 < q.card.n1; ++i1) {
    for (int iy = 0; iy < q.card.ny; ++iy) {
      double s = 0.0;
      for (int i2 = 0; i2 < q.card.n2; ++i2) s += q.at(i1, i2, iy);
      viol = std::max(viol, std::fabs(s - m.m1y.at(i1, iy)));
    }
  }
  for (int i2 = 0; i2 < q.card.n2; ++i2) {
    for (int iy = 0; iy < q.card.ny; ++iy) {
      double s = 0.0;
      for (int i1 = 0; i1 < q.card.n1; ++i1) s += q.at(i1, i2, iy);
      viol = std::max(viol, std::fabs(s - m.m2y.at(i2, iy)));
    }
  }
  return viol;
}

SolveResult solve_q_star(const PairwiseMarginals& marginals, const SolverConfig& config) {
  return solve_q_star_from(feasible_init(marginals), marginals, config);
}

SolveResult solve_q_star_from(JointDist q, const PairwiseMarginals& marginals,
                              const SolverConfig& config) {
  config.validate();
  marginals.validate();
  if (q.card.n1 != marginals.n1() || q.card.n2 != marginals.n2() ||
      q.card.ny != marginals.ny()) {
    throw ArgumentError("initial point shape does not match the marginals");
  }

  const int n1 = q.card.n1, n2 = q.card.n2, ny = q.card.ny;

  // Cells with a zero label marginal on either side are forced to zero by
  // the constraints; freeze them and keep the rest strictly positive.
  for (int i1 = 0; i1 < n1; ++i1) {
    for (int i2 = 0; i2 < n2; ++i2) {
      for (int iy = 0; iy < ny; ++iy) {
        if (marginals.m1y.at(i1, iy) <= 0.0 || marginals.m2y.at(i2, iy) <= 0.0) {
          q.at(i1, i2, iy) = 0.0;
        } else if (q.at(i1, i2, iy) <= 0.0) {
          q.at(i1, i2, iy) = config.floor_eps;
        }
      }
    }
  }
  ipf_project(q, marginals, config.tol_marginal);

  SolveResult out;
  out.trace.objective_per_sweep.reserve(64);

  double obj = conditional_entropy_objective(q, config.floor_eps);
  out.trace.objective_per_sweep.push_back(obj);

  // A one-label task has H(Y|X1,X2) identically zero: any feasible point is
  // optimal, so the projected start is returned as-is.
  if (ny == 1) {
    out.trace.converged = true;
    out.trace.max_marginal_violation = marginal_violation(q, marginals);
    out.q_star = std::move(q);
    return out;
  }

  JointDist candidate = q;
  for (int sweep = 0; sweep < config.max_iters; ++sweep) {
    double eta = config.step_size;  // reset each sweep
    bool accepted = false;
    double cand_obj = obj;

    for (int halving = 0; halving < kMaxHalvings; ++halving) {
      candidate.probs = q.probs;
      // multiplicative ascent along the analytic gradient (in nats)
      for (int i1 = 0; i1 < n1; ++i1) {
        for (int i2 = 0; i2 < n2; ++i2) {
          double q12 = 0.0;
          for (int iy = 0; iy < ny; ++iy) q12 += candidate.at(i1, i2, iy);
          if (q12 <= 0.0) continue;
          const double log_q12 = std::log(std::max(q12, config.floor_eps));
          for (int iy = 0; iy < ny; ++iy) {
            double& cell = candidate.at(i1, i2, iy);
            if (cell <= 0.0) continue;
            const double g = log_q12 - std::log(std::max(cell, config.floor_eps));
            cell *= std::exp(eta * g);
          }
        }
      }
      ipf_project(candidate, marginals, config.tol_marginal);
      cand_obj = conditional_entropy_objective(candidate, config.floor_eps);
      if (cand_obj >= obj - 1e-12) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }

    if (!accepted) {
      // no ascent step exists at any tried scale: treat as converged
      out.trace.converged = true;
      break;
    }

    std::swap(q.probs, candidate.probs);
    out.trace.objective_per_sweep.push_back(cand_obj);
    out.trace.sweeps = sweep + 1;
    const double delta = cand_obj - obj;
    obj = cand_obj;
    if (std::fabs(delta) < config.tol_obj) {
      out.trace.converged = true;
      break;
    }
  }

  polish_feasibility(q, marginals, config.tol_marginal);
  out.trace.max_marginal_violation = marginal_violation(q, marginals);
  out.q_star = std::move(q);
  return out;
}

namespace {

PIDResult pid_at(const JointDist& q_star, const SolveTrace& trace) {
  PIDResult r;
  r.r = co_information(q_star);
  r.u1 = cond_mutual_info(q_star, {Var::X1}, {Var::Y}, {Var::X2});
  r.u2 = cond_mutual_info(q_star, {Var::X2}, {Var::Y}, {Var::X1});
  r.converged = trace.converged;
  r.iterations = trace.sweeps;
  return r;
}

void check_fresh(const JointDist& q_star, const PairwiseMarginals& m, const SolverConfig& cfg) {
  const double viol = marginal_violation(q_star, m);
  if (viol > 10.0 * cfg.tol_marginal) {
    std::ostringstream os;
    os << "q* violates the pairwise marginals by " << viol << " (limit "
       << 10.0 * cfg.tol_marginal << "); re-solve against these marginals";
    throw StaleSolutionError(os.str());
  }
}

}  // namespace

PIDResult compute_pid(const JointDist& p, const SolveResult& solved, const SolverConfig& config) {
  p.validate();
  const PairwiseMarginals m = pairwise_marginals(p, false);
  check_fresh(solved.q_star, m, config);

  PIDResult r = pid_at(solved.q_star, solved.trace);
  const double total = mutual_info(p, {Var::X1, Var::X2}, {Var::Y});
  const double captured = mutual_info(solved.q_star, {Var::X1, Var::X2}, {Var::Y});
  r.total_mi = total;
  r.s = total - captured;
  return r;
}

PIDResult compute_pid(const PairwiseMarginals& marginals, const SolveResult& solved,
                      const SolverConfig& config) {
  marginals.validate();
  check_fresh(solved.q_star, marginals, config);
  return pid_at(solved.q_star, solved.trace);
}

PIDResult pid_from_samples(const SampleTable& table, const DiscretizeConfig& dconfig,
                           const SolverConfig& sconfig) {
  DiscretizedTable dt = discretize_table(table, dconfig);
  const PairwiseMarginals m = pairwise_marginals(dt.joint, false);
  SolveResult solved = solve_q_star(m, sconfig);
  return compute_pid(dt.joint, solved, sconfig);
}

}  // namespace pidq
