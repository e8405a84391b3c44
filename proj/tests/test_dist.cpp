#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "pidq/dist.hpp"
#include "pidq/errors.hpp"

using namespace pidq;

TEST_CASE("entropy basics") {
  const std::vector<double> uniform2{0.5, 0.5};
  CHECK(entropy(std::span<const double>(uniform2)) == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<double> point{1.0, 0.0, 0.0};
  CHECK(entropy(std::span<const double>(point)) == doctest::Approx(0.0));

  const std::vector<double> skew{0.25, 0.75};
  CHECK(entropy(std::span<const double>(skew)) == doctest::Approx(0.811278).epsilon(1e-6));
}

TEST_CASE("entropy validation names the offending index") {
  const std::vector<double> neg{0.5, -0.1, 0.6};
  CHECK_THROWS_WITH_AS(entropy(std::span<const double>(neg)),
                       doctest::Contains("probs[1]"), ValidationError);

  const std::vector<double> unnorm{0.5, 0.4};
  CHECK_THROWS_AS(entropy(std::span<const double>(unnorm)), ValidationError);
}

TEST_CASE("joint validation") {
  JointDist d(Cardinalities{2, 2, 2});
  d.probs = {0.25, 0.25, 0.25, 0.25, 0.0, 0.0, 0.0, 0.0};
  CHECK_NOTHROW(d.validate());

  d.probs[3] = -0.25;
  CHECK_THROWS_WITH_AS(d.validate(), doctest::Contains("probs[3]"), ValidationError);

  Cardinalities too_big{1000, 1000, 1000};
  CHECK_THROWS_AS(too_big.validate(), ValidationError);
  CHECK_NOTHROW(too_big.validate(2'000'000'000));
}

TEST_CASE("mutual information on gates") {
  const JointDist prod = [] {
    JointDist d(Cardinalities{2, 2, 2});
    for (auto& p : d.probs) p = 0.125;
    return d;
  }();
  CHECK(mutual_info(prod, {Var::X1}, {Var::X2}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mutual_info(prod, {Var::X1, Var::X2}, {Var::Y}) == doctest::Approx(0.0).epsilon(1e-12));

  // x1 = x2 uniform, y independent coin
  JointDist same(Cardinalities{2, 2, 2});
  same.at(0, 0, 0) = same.at(0, 0, 1) = same.at(1, 1, 0) = same.at(1, 1, 1) = 0.25;
  CHECK(mutual_info(same, {Var::X1}, {Var::X2}) == doctest::Approx(1.0));

  const JointDist and_d = fixtures::and_gate();
  CHECK(mutual_info(and_d, {Var::X1, Var::X2}, {Var::Y}) ==
        doctest::Approx(0.811278).epsilon(1e-6));

  CHECK_THROWS_AS(mutual_info(and_d, {Var::X1}, {Var::X1, Var::Y}), ArgumentError);
  CHECK_THROWS_AS(mutual_info(and_d, {}, {Var::Y}), ArgumentError);
}

TEST_CASE("conditional mutual information and co-information") {
  const JointDist prod = [] {
    JointDist d(Cardinalities{2, 2, 2});
    for (auto& p : d.probs) p = 0.125;
    return d;
  }();
  CHECK(conditional_mutual_info(prod) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(co_information(prod) == doctest::Approx(0.0).epsilon(1e-12));

  const JointDist xor_d = fixtures::xor_gate();
  CHECK(conditional_mutual_info(xor_d) == doctest::Approx(1.0));
  CHECK(co_information(xor_d) == doctest::Approx(-1.0));

  const JointDist red = fixtures::y_equals_x1_equals_x2();
  CHECK(conditional_mutual_info(red) == doctest::Approx(0.0));
  CHECK(co_information(red) == doctest::Approx(1.0));
}

TEST_CASE("zero-mass label slices contribute nothing") {
  // same distribution padded with an unused third label
  const JointDist base = fixtures::xor_gate();
  JointDist padded(Cardinalities{2, 2, 3});
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int y = 0; y < 2; ++y) padded.at(a, b, y) = base.at(a, b, y);

  CHECK(conditional_mutual_info(padded) ==
        doctest::Approx(conditional_mutual_info(base)).epsilon(1e-12));
  CHECK(mutual_info(padded, {Var::X1, Var::X2}, {Var::Y}) ==
        doctest::Approx(mutual_info(base, {Var::X1, Var::X2}, {Var::Y})).epsilon(1e-12));
}

TEST_CASE("marginalize") {
  const JointDist and_d = fixtures::and_gate();
  const MarginalTable x1 = marginalize(and_d, {Var::X1});
  REQUIRE(x1.values.size() == 2);
  CHECK(x1.values[0] == doctest::Approx(0.5));
  CHECK(x1.values[1] == doctest::Approx(0.5));

  const MarginalTable full = marginalize(and_d, {Var::X1, Var::X2, Var::Y});
  CHECK(full.values == and_d.probs);

  const MarginalTable py = marginalize(fixtures::disagreement_xor(), {Var::Y});
  CHECK(py.values[0] == doctest::Approx(0.57).epsilon(1e-12));
  CHECK(py.values[1] == doctest::Approx(0.43).epsilon(1e-12));

  CHECK_THROWS_AS(marginalize(and_d, {}), ArgumentError);
}

TEST_CASE("pairwise marginal projections") {
  // product distribution: every pairwise table is the product of its factors
  JointDist prod(Cardinalities{2, 3, 2});
  const double px1[] = {0.3, 0.7};
  const double px2[] = {0.2, 0.5, 0.3};
  const double py[] = {0.6, 0.4};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j)
      for (int y = 0; y < 2; ++y) prod.at(i, j, y) = px1[i] * px2[j] * py[y];

  const PairwiseMarginals m = pairwise_marginals(prod, true);
  CHECK_NOTHROW(m.validate());
  for (int i = 0; i < 2; ++i)
    for (int y = 0; y < 2; ++y) CHECK(m.m1y.at(i, y) == doctest::Approx(px1[i] * py[y]));
  for (int j = 0; j < 3; ++j)
    for (int y = 0; y < 2; ++y) CHECK(m.m2y.at(j, y) == doctest::Approx(px2[j] * py[y]));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) CHECK(m.m12->at(i, j) == doctest::Approx(px1[i] * px2[j]));

  const PairwiseMarginals xm = pairwise_marginals(fixtures::xor_gate(), false);
  for (double v : xm.m1y.v) CHECK(v == doctest::Approx(0.25));
  for (double v : xm.m2y.v) CHECK(v == doctest::Approx(0.25));
  CHECK_FALSE(xm.m12.has_value());
}

TEST_CASE("marginal consistency validation") {
  PairwiseMarginals m;
  m.m1y = Matrix(2, 2);
  m.m1y.at(0, 0) = 0.5;
  m.m1y.at(1, 1) = 0.5;
  m.m2y = Matrix(2, 2);
  m.m2y.at(0, 0) = 0.2;  // p(y=0) now disagrees: 0.5 vs 0.2
  m.m2y.at(0, 1) = 0.3;
  m.m2y.at(1, 1) = 0.5;
  CHECK_THROWS_AS(m.validate(), ValidationError);
}

TEST_CASE("chain rule identity over random joints") {
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 500; ++trial) {
    const int n1 = 2 + static_cast<int>(rng_below(rng, 3));
    const int n2 = 2 + static_cast<int>(rng_below(rng, 3));
    const int ny = 2 + static_cast<int>(rng_below(rng, 2));
    const JointDist d = fixtures::random_joint(rng, n1, n2, ny);

    const double lhs = cond_mutual_info(d, {Var::X1}, {Var::Y}, {Var::X2}) +
                       mutual_info(d, {Var::X2}, {Var::Y});
    const double rhs = mutual_info(d, {Var::X1, Var::X2}, {Var::Y});
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));

    CHECK(co_information(d) ==
          doctest::Approx(mutual_info(d, {Var::X1}, {Var::X2}) - conditional_mutual_info(d))
              .epsilon(1e-9));
  }
}

TEST_CASE("permutation invariance of information measures") {
  std::mt19937_64 rng(7);
  const JointDist d = fixtures::random_joint(rng, 3, 4, 3);

  // relabel the X2 support with a fixed permutation
  const int perm[] = {2, 0, 3, 1};
  JointDist shuffled(d.card);
  for (int i1 = 0; i1 < 3; ++i1)
    for (int i2 = 0; i2 < 4; ++i2)
      for (int iy = 0; iy < 3; ++iy) shuffled.at(i1, perm[i2], iy) = d.at(i1, i2, iy);

  CHECK(entropy(shuffled) == doctest::Approx(entropy(d)).epsilon(1e-12));
  CHECK(mutual_info(shuffled, {Var::X1}, {Var::X2}) ==
        doctest::Approx(mutual_info(d, {Var::X1}, {Var::X2})).epsilon(1e-12));
  CHECK(conditional_mutual_info(shuffled) ==
        doctest::Approx(conditional_mutual_info(d)).epsilon(1e-12));
  CHECK(co_information(shuffled) == doctest::Approx(co_information(d)).epsilon(1e-12));
}

TEST_CASE("swap symmetry between the modalities") {
  std::mt19937_64 rng(99);
  const JointDist d = fixtures::random_joint(rng, 3, 3, 2);
  JointDist swapped(d.card);
  for (int i1 = 0; i1 < 3; ++i1)
    for (int i2 = 0; i2 < 3; ++i2)
      for (int iy = 0; iy < 2; ++iy) swapped.at(i2, i1, iy) = d.at(i1, i2, iy);

  CHECK(cond_mutual_info(swapped, {Var::X2}, {Var::Y}, {Var::X1}) ==
        doctest::Approx(cond_mutual_info(d, {Var::X1}, {Var::Y}, {Var::X2})).epsilon(1e-12));
  CHECK(cond_mutual_info(swapped, {Var::X1}, {Var::Y}, {Var::X2}) ==
        doctest::Approx(cond_mutual_info(d, {Var::X2}, {Var::Y}, {Var::X1})).epsilon(1e-12));
  CHECK(co_information(swapped) == doctest::Approx(co_information(d)).epsilon(1e-12));
}
