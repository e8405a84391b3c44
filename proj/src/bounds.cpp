#include "pidq/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "pidq/errors.hpp"

namespace pidq {

namespace {

constexpr int kMaxIpfCycles = 50'000;

void require_m12(const PairwiseMarginals& m, const char* op) {
  if (!m.m12) {
    throw ArgumentError(std::string(op) +
                        " requires unlabeled multimodal data: the p(x1,x2) marginal is missing");
  }
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

void DisagreementConfig::validate() const {
  if (c <= 0.0) throw ArgumentError("disagreement constant c must be positive");
}

MinCmiResult min_conditional_mi(const PairwiseMarginals& m, const SolverConfig& config) {
  config.validate();
  m.validate();
  require_m12(m, "min_conditional_mi");

  const int n1 = m.n1(), n2 = m.n2(), ny = m.ny();
  JointDist r(Cardinalities{n1, n2, ny});

  // Uniform over the support the three marginals allow. Starting from a
  // constant tensor makes cyclic IPF converge to the maximum-entropy
  // feasible point, which is exactly the conditional-MI minimizer here.
  int support = 0;
  for (int i1 = 0; i1 < n1; ++i1)
    for (int i2 = 0; i2 < n2; ++i2)
      for (int iy = 0; iy < ny; ++iy)
        if (m.m1y.at(i1, iy) > 0.0 && m.m2y.at(i2, iy) > 0.0 && m.m12->at(i1, i2) > 0.0) ++support;
  if (support == 0) throw InfeasibleError("the three pairwise marginals share no support");
  const double u = 1.0 / support;
  for (int i1 = 0; i1 < n1; ++i1)
    for (int i2 = 0; i2 < n2; ++i2)
      for (int iy = 0; iy < ny; ++iy)
        if (m.m1y.at(i1, iy) > 0.0 && m.m2y.at(i2, iy) > 0.0 && m.m12->at(i1, i2) > 0.0)
          r.at(i1, i2, iy) = u;

  MinCmiResult out;
  auto scale_m1y = [&] {
    for (int i1 = 0; i1 < n1; ++i1)
      for (int iy = 0; iy < ny; ++iy) {
        double s = 0.0;
        for (int i2 = 0; i2 < n2; ++i2) s += r.at(i1, i2, iy);
        const double target = m.m1y.at(i1, iy);
        if (target <= 0.0 || s <= 0.0) {
          for (int i2 = 0; i2 < n2; ++i2) r.at(i1, i2, iy) = 0.0;
          continue;
        }
        const double f = target / s;
        for (int i2 = 0; i2 < n2; ++i2) r.at(i1, i2, iy) *= f;
      }
  };
  auto scale_m2y = [&] {
    for (int i2 = 0; i2 < n2; ++i2)
      for (int iy = 0; iy < ny; ++iy) {
        double s = 0.0;
        for (int i1 = 0; i1 < n1; ++i1) s += r.at(i1, i2, iy);
        const double target = m.m2y.at(i2, iy);
        if (target <= 0.0 || s <= 0.0) {
          for (int i1 = 0; i1 < n1; ++i1) r.at(i1, i2, iy) = 0.0;
          continue;
        }
        const double f = target / s;
        for (int i1 = 0; i1 < n1; ++i1) r.at(i1, i2, iy) *= f;
      }
  };
  auto scale_m12 = [&] {
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i2 = 0; i2 < n2; ++i2) {
        double s = 0.0;
        for (int iy = 0; iy < ny; ++iy) s += r.at(i1, i2, iy);
        const double target = m.m12->at(i1, i2);
        if (target <= 0.0 || s <= 0.0) {
          for (int iy = 0; iy < ny; ++iy) r.at(i1, i2, iy) = 0.0;
          continue;
        }
        const double f = target / s;
        for (int iy = 0; iy < ny; ++iy) r.at(i1, i2, iy) *= f;
      }
  };

  auto violation = [&] {
    double v = 0.0;
    for (int i1 = 0; i1 < n1; ++i1)
      for (int iy = 0; iy < ny; ++iy) {
        double s = 0.0;
        for (int i2 = 0; i2 < n2; ++i2) s += r.at(i1, i2, iy);
        v = std::max(v, std::fabs(s - m.m1y.at(i1, iy)));
      }
    for (int i2 = 0; i2 < n2; ++i2)
      for (int iy = 0; iy < ny; ++iy) {
        double s = 0.0;
        for (int i1 = 0; i1 < n1; ++i1) s += r.at(i1, i2, iy);
        v = std::max(v, std::fabs(s - m.m2y.at(i2, iy)));
      }
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i2 = 0; i2 < n2; ++i2) {
        double s = 0.0;
        for (int iy = 0; iy < ny; ++iy) s += r.at(i1, i2, iy);
        v = std::max(v, std::fabs(s - m.m12->at(i1, i2)));
      }
    return v;
  };

  // Constraint interplay can force support cells to zero even though no
  // single marginal does; plain cyclic fitting then crawls toward the
  // boundary at a 1/k rate. When progress stalls at a small residual, zero
  // the cells that are negligible along all three of their fibers and refit
  // on the reduced support. A stall at a large residual means the three
  // tables admit no joint distribution.
  auto prune_stuck_cells = [&](double viol) {
    const double threshold = 10.0 * viol;
    bool pruned = false;
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i2 = 0; i2 < n2; ++i2)
        for (int iy = 0; iy < ny; ++iy) {
          const double cell = r.at(i1, i2, iy);
          if (cell <= 0.0 || cell > threshold) continue;
          double row_max = 0.0, col_max = 0.0, tube_max = 0.0;
          for (int j = 0; j < n2; ++j) row_max = std::max(row_max, r.at(i1, j, iy));
          for (int i = 0; i < n1; ++i) col_max = std::max(col_max, r.at(i, i2, iy));
          for (int y = 0; y < ny; ++y) tube_max = std::max(tube_max, r.at(i1, i2, y));
          if (cell <= 1e-3 * row_max && cell <= 1e-3 * col_max && cell <= 1e-3 * tube_max) {
            r.at(i1, i2, iy) = 0.0;
            pruned = true;
          }
        }
    return pruned;
  };

  double prev_viol = std::numeric_limits<double>::max();
  for (int cycle = 0; cycle < kMaxIpfCycles; ++cycle) {
    scale_m1y();
    scale_m2y();
    scale_m12();
    out.cycles = cycle + 1;
    out.entropy_per_cycle.push_back(detail::entropy_nocheck(r.probs));
    out.max_violation = violation();
    if (out.max_violation < config.tol_marginal) {
      out.converged = true;
      break;
    }
    if (cycle % 256 == 255) {
      const bool stalled = out.max_violation > 0.9 * prev_viol;
      prev_viol = out.max_violation;
      if (stalled) {
        if (out.max_violation > 1e-4 || !prune_stuck_cells(out.max_violation)) break;
      }
    }
  }
  if (!out.converged) {
    std::ostringstream os;
    os << "cyclic fitting did not reach the three pairwise marginals (residual "
       << out.max_violation << "); they admit no joint distribution";
    throw InfeasibleError(os.str());
  }

  out.value = cond_mutual_info(r, {Var::X1}, {Var::X2}, {Var::Y});
  out.r_star = std::move(r);
  return out;
}

double synergy_lower_redundancy(const PairwiseMarginals& m, double r, const SolverConfig& config) {
  require_m12(m, "synergy_lower_redundancy");
  const MinCmiResult mc = min_conditional_mi(m, config);
  // I(X1;X2) = H(X1) + H(X2) - H(X1,X2) from the modality marginal
  const double h1 = detail::entropy_nocheck(m.m12->row_sums());
  const double h2 = detail::entropy_nocheck(m.m12->col_sums());
  const double h12 = detail::entropy_nocheck(m.m12->v);
  return r - (h1 + h2 - h12) + mc.value;
}

std::vector<int> bayes_classifier(const Matrix& m_iy, DisagreementConfig::TieBreak) {
  std::vector<int> f(m_iy.rows, 0);
  for (int i = 0; i < m_iy.rows; ++i) {
    double best = -1.0;
    int arg = 0;
    double mass = 0.0;
    for (int y = 0; y < m_iy.cols; ++y) {
      mass += m_iy.at(i, y);
      if (m_iy.at(i, y) > best) {  // strict: ties stay at the lowest label
        best = m_iy.at(i, y);
        arg = y;
      }
    }
    f[i] = mass > 0.0 ? arg : 0;
  }
  return f;
}

double disagreement(const Matrix& m12, std::span<const int> f1, std::span<const int> f2,
                    const DisagreementConfig& config) {
  config.validate();
  if (static_cast<int>(f1.size()) != m12.rows || static_cast<int>(f2.size()) != m12.cols) {
    throw ArgumentError("classifier supports do not match p(x1,x2)");
  }
  double alpha = 0.0;
  for (int i = 0; i < m12.rows; ++i)
    for (int j = 0; j < m12.cols; ++j)
      if (f1[i] != f2[j]) alpha += m12.at(i, j);
  return alpha;
}

double synergy_lower_uniqueness(double alpha, double u1, double u2,
                                const DisagreementConfig& config) {
  config.validate();
  return alpha * config.c - std::max(u1, u2);
}

Coupling min_entropy_coupling_greedy(std::span<const double> mu, std::span<const double> nu) {
  auto check = [](std::span<const double> p, const char* name) {
    double s = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
      if (!(p[i] >= 0.0)) {
        throw ValidationError(std::string(name) + "[" + std::to_string(i) + "] is negative");
      }
      s += p[i];
    }
    if (std::fabs(s - 1.0) > kNormTol) {
      throw ValidationError(std::string(name) + " sums to " + std::to_string(s) +
                            ", expected 1");
    }
  };
  check(mu, "mu");
  check(nu, "nu");

  // max-heaps keyed by (mass desc, index asc) for determinism
  using Atom = std::pair<double, int>;
  auto cmp = [](const Atom& a, const Atom& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  };
  std::priority_queue<Atom, std::vector<Atom>, decltype(cmp)> hm(cmp), hn(cmp);
  for (size_t i = 0; i < mu.size(); ++i)
    if (mu[i] > 0.0) hm.emplace(mu[i], static_cast<int>(i));
  for (size_t j = 0; j < nu.size(); ++j)
    if (nu[j] > 0.0) hn.emplace(nu[j], static_cast<int>(j));

  Coupling out;
  out.joint = Matrix(static_cast<int>(mu.size()), static_cast<int>(nu.size()));
  while (!hm.empty() && !hn.empty()) {
    auto [ma, i] = hm.top();
    hm.pop();
    auto [nb, j] = hn.top();
    hn.pop();
    const double mass = std::min(ma, nb);
    out.joint.at(i, j) += mass;
    if (ma - mass > 1e-15) hm.emplace(ma - mass, i);
    if (nb - mass > 1e-15) hn.emplace(nb - mass, j);
  }
  out.entropy = detail::entropy_nocheck(out.joint.v);
  return out;
}

SynergyUpperResult synergy_upper(const PairwiseMarginals& m, double r, double u1, double u2) {
  m.validate();
  require_m12(m, "synergy_upper");

  // Flatten (X1,X2) into one variable Z and couple it with Y.
  const std::vector<double>& z = m.m12->v;
  const std::vector<double> py = m.p_y();
  const Coupling coupling = min_entropy_coupling_greedy(z, py);

  SynergyUpperResult out;
  out.coupling_entropy = coupling.entropy;
  out.value = detail::entropy_nocheck(z) + detail::entropy_nocheck(py) - coupling.entropy - r -
              u1 - u2;
  return out;
}

PerfBounds performance_bounds(double total_mi, double h_y, int ny) {
  if (ny < 1) throw ArgumentError("ny must be >= 1");
  if (ny == 1) return {1.0, 1.0, 1.0};
  if (total_mi < -kNormTol) throw ArgumentError("total_mi must be non-negative");
  if (h_y < -kNormTol || h_y > std::log2(static_cast<double>(ny)) + kNormTol) {
    throw ArgumentError("h_y must lie in [0, log2(ny)]");
  }
  total_mi = std::max(total_mi, 0.0);

  PerfBounds out;
  out.p_upper = clamp01((total_mi + 1.0) / std::log2(static_cast<double>(ny)));
  out.p_lower = std::min(clamp01(std::exp2(total_mi - h_y)), out.p_upper);
  out.p_hat = 0.5 * (out.p_lower + out.p_upper);
  return out;
}

PerfBounds performance_bounds_range(double r, double u1, double u2, double s_lower,
                                    double s_upper, double h_y, int ny) {
  const double base = r + u1 + u2;
  const double lo = std::max(0.0, base + std::max(s_lower, 0.0));
  const double hi = std::max(lo, base + s_upper);
  if (ny == 1) return {1.0, 1.0, 1.0};
  const PerfBounds lo_b = performance_bounds(lo, h_y, ny);
  const PerfBounds hi_b = performance_bounds(hi, h_y, ny);
  PerfBounds out;
  out.p_lower = lo_b.p_lower;
  out.p_upper = hi_b.p_upper;
  out.p_lower = std::min(out.p_lower, out.p_upper);
  out.p_hat = 0.5 * (out.p_lower + out.p_upper);
  return out;
}

double cl_suboptimality_bound(double co_info, double h_y) {
  if (h_y < 0.0) throw ArgumentError("h_y must be non-negative");
  return clamp01(1.0 - std::exp2(co_info - h_y));
}

std::vector<double> joint_entropy_gradient(std::span<const double> r, double floor_eps) {
  constexpr double kInvLn2 = 1.4426950408889634;
  std::vector<double> g(r.size(), 0.0);
  for (size_t i = 0; i < r.size(); ++i) {
    if (r[i] <= 0.0) continue;
    g[i] = -(std::log2(std::max(r[i], floor_eps)) + kInvLn2);
  }
  return g;
}

SynergyBounds compute_synergy_bounds(const PairwiseMarginals& m, double r, double u1, double u2,
                                     const SolverConfig& scfg, const DisagreementConfig& dcfg) {
  m.validate();
  require_m12(m, "compute_synergy_bounds");
  dcfg.validate();

  SynergyBounds out;
  out.r = r;
  out.u1 = u1;
  out.u2 = u2;

  const MinCmiResult mc = min_conditional_mi(m, scfg);
  out.min_cmi = mc.value;
  const double h1 = detail::entropy_nocheck(m.m12->row_sums());
  const double h2 = detail::entropy_nocheck(m.m12->col_sums());
  const double h12 = detail::entropy_nocheck(m.m12->v);
  out.mi_x1x2 = h1 + h2 - h12;
  out.s_r_lower = r - out.mi_x1x2 + mc.value;

  const std::vector<int> f1 = bayes_classifier(m.m1y, dcfg.tie_break);
  const std::vector<int> f2 = bayes_classifier(m.m2y, dcfg.tie_break);
  out.alpha = disagreement(*m.m12, f1, f2, dcfg);
  out.s_u_lower = synergy_lower_uniqueness(out.alpha, u1, u2, dcfg);

  const SynergyUpperResult up = synergy_upper(m, r, u1, u2);
  out.s_upper = up.value;
  out.coupling_entropy = up.coupling_entropy;
  out.upper_slack = out.s_upper < std::max(out.s_r_lower, out.s_u_lower) - 1e-9;
  return out;
}

}  // namespace pidq
