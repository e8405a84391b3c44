#pragma once

// Shared distributions for the test suites: the three uniform-input logic
// gates, the four worked interaction examples, and seeded random joints.

#include <random>
#include <vector>

#include "pidq/dist.hpp"
#include "pidq/rng.hpp"

namespace fixtures {

inline pidq::JointDist gate(int (*fn)(int, int)) {
  pidq::JointDist d(pidq::Cardinalities{2, 2, 2});
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) d.at(a, b, fn(a, b)) += 0.25;
  return d;
}

inline pidq::JointDist and_gate() { return gate([](int a, int b) { return a & b; }); }
inline pidq::JointDist or_gate() { return gate([](int a, int b) { return a | b; }); }
inline pidq::JointDist xor_gate() { return gate([](int a, int b) { return a ^ b; }); }

// Agreement XOR: y = x1 ^ x2 with independent uniform inputs. Identical to
// xor_gate(); the alias marks intent in the bounds tests.
inline pidq::JointDist agreement_xor() { return xor_gate(); }

// y = x1 with an independent uniform second modality.
inline pidq::JointDist y_equals_x1() {
  pidq::JointDist d(pidq::Cardinalities{2, 2, 2});
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) d.at(a, b, a) += 0.25;
  return d;
}

// All mass on y = x1 = x2.
inline pidq::JointDist y_equals_x1_equals_x2() {
  pidq::JointDist d(pidq::Cardinalities{2, 2, 2});
  d.at(0, 0, 0) = 0.5;
  d.at(1, 1, 1) = 0.5;
  return d;
}

// Disagreement XOR: the two unimodal posteriors point in opposite
// directions (f1 flips the bit, f2 keeps it) and the label behaves like a
// noisy XOR of the disagreeing votes. Cell masses on the 0.01 grid;
// disagreement = 0.15, p(y) = (0.57, 0.43).
inline pidq::JointDist disagreement_xor() {
  pidq::JointDist d(pidq::Cardinalities{2, 2, 2});
  d.at(0, 0, 0) = 0.01;
  d.at(0, 0, 1) = 0.06;
  d.at(0, 1, 0) = 0.03;
  d.at(0, 1, 1) = 0.27;
  d.at(1, 0, 0) = 0.52;
  d.at(1, 0, 1) = 0.03;
  d.at(1, 1, 0) = 0.01;
  d.at(1, 1, 1) = 0.07;
  return d;
}

// Reference interaction values for disagreement_xor(), frozen from two
// independent solvers (convex programming and exhaustive grid search).
struct DisagreementXorStats {
  static constexpr double r = 0.405259;
  static constexpr double u1 = 0.0;
  static constexpr double u2 = 0.025570;
  static constexpr double s = 0.161402;
  static constexpr double total_mi = 0.592244;
  static constexpr double alpha = 0.15;
  static constexpr double min_cmi = 0.052387;
  static constexpr double mi_x1x2 = 0.353188;
};

// Dense random joint with Exp(1) cell masses, normalized.
inline pidq::JointDist random_joint(std::mt19937_64& rng, int n1, int n2, int ny) {
  pidq::JointDist d(pidq::Cardinalities{n1, n2, ny});
  double sum = 0.0;
  for (double& p : d.probs) {
    p = -std::log(1.0 - pidq::rng_unit(rng));
    sum += p;
  }
  for (double& p : d.probs) p /= sum;
  return d;
}

// n i.i.d. rows drawn from the joint, as (x1, x2, y) integer triples.
struct DrawnSamples {
  std::vector<int> x1, x2, y;
};
inline DrawnSamples sample_rows(const pidq::JointDist& d, int n, std::mt19937_64& rng) {
  std::vector<double> cdf(d.probs.size());
  double acc = 0.0;
  for (size_t i = 0; i < d.probs.size(); ++i) {
    acc += d.probs[i];
    cdf[i] = acc;
  }
  DrawnSamples out;
  out.x1.reserve(n);
  out.x2.reserve(n);
  out.y.reserve(n);
  for (int s = 0; s < n; ++s) {
    const double u = pidq::rng_unit(rng);
    size_t cell = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
    if (cell >= cdf.size()) cell = cdf.size() - 1;
    const int iy = static_cast<int>(cell) % d.card.ny;
    const int i2 = static_cast<int>(cell / d.card.ny) % d.card.n2;
    const int i1 = static_cast<int>(cell / d.card.ny / d.card.n2);
    out.x1.push_back(i1);
    out.x2.push_back(i2);
    out.y.push_back(iy);
  }
  return out;
}

}  // namespace fixtures
