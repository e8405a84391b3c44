#pragma once

// Independent oracles the unit and acceptance suites check the library
// against. Everything here recomputes from first principles (exhaustive or
// grid search) and never calls into the solver paths under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "pidq/dist.hpp"

namespace oracles {

inline double ent_bits(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

struct BrutePid {
  double r = 0.0, u1 = 0.0, u2 = 0.0, s = 0.0;
  double objective = 0.0;  // max H(Y|X1,X2) over the marginal polytope
  double total_mi = 0.0;
};

// Exhaustive grid search over the marginal polytope for 2x2xNY joints.
// Each y-slice is a 2x2 transportation matrix with one free parameter
// t_y = q(0,0,y); the grid scans all slices jointly and then refines
// locally. Only ny = 2 is needed by the suites.
inline BrutePid brute_pid_2x2x2(const pidq::JointDist& p, int steps = 2000) {
  using pidq::Var;
  const auto m = pidq::pairwise_marginals(p, false);
  const int ny = p.card.ny;

  std::vector<double> lo(ny), hi(ny);
  for (int y = 0; y < ny; ++y) {
    const double r0 = m.m1y.at(0, y), c0 = m.m2y.at(0, y);
    const double sy = m.m1y.at(0, y) + m.m1y.at(1, y);
    lo[y] = std::max(0.0, r0 + c0 - sy);
    hi[y] = std::min(r0, c0);
  }

  auto build = [&](const std::vector<double>& t) {
    pidq::JointDist q(p.card);
    for (int y = 0; y < ny; ++y) {
      const double r0 = m.m1y.at(0, y), c0 = m.m2y.at(0, y);
      const double sy = m.m1y.at(0, y) + m.m1y.at(1, y);
      q.at(0, 0, y) = t[y];
      q.at(0, 1, y) = r0 - t[y];
      q.at(1, 0, y) = c0 - t[y];
      q.at(1, 1, y) = sy - r0 - c0 + t[y];
    }
    return q;
  };
  auto objective = [&](const pidq::JointDist& q) {
    double h_joint = 0.0, h_pair = 0.0;
    for (int i1 = 0; i1 < 2; ++i1)
      for (int i2 = 0; i2 < 2; ++i2) {
        double q12 = 0.0;
        for (int y = 0; y < ny; ++y) {
          const double v = q.at(i1, i2, y);
          if (v > 0.0) h_joint -= v * std::log2(v);
          q12 += v;
        }
        if (q12 > 0.0) h_pair -= q12 * std::log2(q12);
      }
    return h_joint - h_pair;
  };

  // full grid scan (ny = 2)
  std::vector<double> best_t(ny, 0.0);
  double best = -1.0;
  std::vector<double> t(ny);
  const int s0 = hi[0] > lo[0] ? steps : 0;
  const int s1 = ny > 1 && hi[1] > lo[1] ? steps : 0;
  for (int i = 0; i <= s0; ++i) {
    t[0] = s0 ? lo[0] + (hi[0] - lo[0]) * i / s0 : lo[0];
    for (int j = 0; j <= s1; ++j) {
      if (ny > 1) t[1] = s1 ? lo[1] + (hi[1] - lo[1]) * j / s1 : lo[1];
      const double val = objective(build(t));
      if (val > best) {
        best = val;
        best_t = t;
      }
    }
  }
  // local refinement
  double w0 = s0 ? (hi[0] - lo[0]) / s0 : 0.0;
  double w1 = s1 ? (hi[1] - lo[1]) / s1 : 0.0;
  for (int round = 0; round < 4; ++round) {
    const std::vector<double> center = best_t;
    for (int i = -20; i <= 20; ++i) {
      t[0] = std::clamp(center[0] + w0 * i / 20.0, lo[0], hi[0]);
      for (int j = -20; j <= 20; ++j) {
        if (ny > 1) t[1] = std::clamp(center[1] + w1 * j / 20.0, lo[1], hi[1]);
        const double val = objective(build(t));
        if (val > best) {
          best = val;
          best_t = t;
        }
      }
    }
    w0 /= 10.0;
    w1 /= 10.0;
  }

  const pidq::JointDist q = build(best_t);
  BrutePid out;
  out.objective = best;
  out.r = pidq::co_information(q);
  out.u1 = pidq::cond_mutual_info(q, {Var::X1}, {Var::Y}, {Var::X2});
  out.u2 = pidq::cond_mutual_info(q, {Var::X2}, {Var::Y}, {Var::X1});
  out.total_mi = pidq::mutual_info(p, {Var::X1, Var::X2}, {Var::Y});
  out.s = out.total_mi - pidq::mutual_info(q, {Var::X1, Var::X2}, {Var::Y});
  return out;
}

// Exhaustive scan of the 2x2x2 three-marginal polytope. Fixing all three
// pairwise tables of a binary joint leaves exactly one degree of freedom,
// the parity direction chi(x1,x2,y) = (-1)^(x1+x2+y); the feasible set is
// the segment of p + t*chi with every cell non-negative. Returns the
// minimum of I_r(X1;X2|Y) over a fine grid of t.
inline double brute_min_cmi_2x2x2(const pidq::JointDist& p, int steps = 200'000) {
  using pidq::Var;
  double t_lo = -1.0, t_hi = 1.0;
  for (int i1 = 0; i1 < 2; ++i1)
    for (int i2 = 0; i2 < 2; ++i2)
      for (int iy = 0; iy < 2; ++iy) {
        const double sign = ((i1 + i2 + iy) % 2 == 0) ? 1.0 : -1.0;
        const double cell = p.at(i1, i2, iy);
        if (sign > 0) {
          t_lo = std::max(t_lo, -cell);  // cell + t >= 0
        } else {
          t_hi = std::min(t_hi, cell);  // cell - t >= 0
        }
      }
  // p itself is feasible, so the segment is non-empty
  double best = std::numeric_limits<double>::max();
  for (int i = 0; i <= steps; ++i) {
    const double t = t_lo + (t_hi - t_lo) * i / steps;
    pidq::JointDist r = p;
    for (int i1 = 0; i1 < 2; ++i1)
      for (int i2 = 0; i2 < 2; ++i2)
        for (int iy = 0; iy < 2; ++iy) {
          const double sign = ((i1 + i2 + iy) % 2 == 0) ? 1.0 : -1.0;
          r.at(i1, i2, iy) = std::max(0.0, p.at(i1, i2, iy) + sign * t);
        }
    best = std::min(best, pidq::cond_mutual_info(r, {Var::X1}, {Var::X2}, {Var::Y}));
  }
  return best;
}

// Exact minimum-entropy coupling for |nu| = 2 by vertex enumeration: at a
// vertex of the transportation polytope at most one mu-atom splits across
// the two columns, so every vertex is (subset fully in column 0, one split
// atom). Entropy is concave, hence minimized at a vertex.
inline double min_coupling_entropy_nu2(const std::vector<double>& mu,
                                       const std::vector<double>& nu) {
  const int k = static_cast<int>(mu.size());
  double best = std::numeric_limits<double>::max();
  for (int mask = 0; mask < (1 << k); ++mask) {
    double s = 0.0;
    for (int i = 0; i < k; ++i)
      if (mask >> i & 1) s += mu[i];
    const double rem = nu[0] - s;
    if (rem < -1e-12) continue;

    auto entropy_with_split = [&](int split) {
      std::vector<double> masses;
      for (int i = 0; i < k; ++i) {
        if (mask >> i & 1) {
          if (mu[i] > 0.0) masses.push_back(mu[i]);
        } else if (i == split) {
          if (rem > 1e-15) masses.push_back(rem);
          if (mu[i] - rem > 1e-15) masses.push_back(mu[i] - rem);
        } else {
          if (mu[i] > 0.0) masses.push_back(mu[i]);
        }
      }
      return ent_bits(masses);
    };

    if (rem <= 1e-12) {
      best = std::min(best, entropy_with_split(-1));
      continue;
    }
    for (int j = 0; j < k; ++j) {
      if (mask >> j & 1) continue;
      if (rem > mu[j] + 1e-12) continue;
      best = std::min(best, entropy_with_split(j));
    }
  }
  return best;
}

// Exhaustive k-means: scan every assignment of n points into k groups and
// return the partition minimizing within-cluster sum of squares. Canonical
// labels (first occurrence order) so partitions compare as sets.
struct BruteKMeans {
  std::vector<int> assign;
  double wcss = std::numeric_limits<double>::max();
};
inline BruteKMeans brute_kmeans(const std::vector<double>& rows, int n, int d, int k) {
  std::vector<int> assign(n, 0);
  BruteKMeans best;
  std::vector<double> mean(static_cast<size_t>(k) * d);
  std::vector<int> count(k);

  const auto total = static_cast<long long>(std::pow(static_cast<double>(k), n) + 0.5);
  for (long long code = 0; code < total; ++code) {
    long long c = code;
    bool used_all = true;
    std::fill(count.begin(), count.end(), 0);
    for (int i = 0; i < n; ++i) {
      assign[i] = static_cast<int>(c % k);
      count[assign[i]]++;
      c /= k;
    }
    for (int g = 0; g < k; ++g)
      if (count[g] == 0) used_all = false;
    if (!used_all) continue;

    std::fill(mean.begin(), mean.end(), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j)
        mean[static_cast<size_t>(assign[i]) * d + j] += rows[static_cast<size_t>(i) * d + j];
    for (int g = 0; g < k; ++g)
      for (int j = 0; j < d; ++j) mean[static_cast<size_t>(g) * d + j] /= count[g];

    double wcss = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) {
        const double diff =
            rows[static_cast<size_t>(i) * d + j] - mean[static_cast<size_t>(assign[i]) * d + j];
        wcss += diff * diff;
      }
    if (wcss < best.wcss) {
      best.wcss = wcss;
      best.assign = assign;
    }
  }
  return best;
}

inline std::vector<int> canonical_partition(const std::vector<int>& assign) {
  std::vector<int> relabel(assign.size(), -1);
  std::vector<int> out(assign.size());
  int next = 0;
  for (size_t i = 0; i < assign.size(); ++i) {
    if (relabel[assign[i]] < 0) relabel[assign[i]] = next++;
    out[i] = relabel[assign[i]];
  }
  return out;
}

// Central finite differences of a scalar function of a flat vector.
inline std::vector<double> finite_diff(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x, double h = 1e-6) {
  std::vector<double> g(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + h;
    const double fp = f(x);
    x[i] = orig - h;
    const double fm = f(x);
    x[i] = orig;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace oracles
