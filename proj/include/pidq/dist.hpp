#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pidq/matrix.hpp"

namespace pidq {

inline constexpr double kNormTol = 1e-9;       // representation error budget
inline constexpr double kCrossMarginalTol = 1e-6;  // estimation error budget
inline constexpr int64_t kDefaultCellCap = 10'000'000;

// The three coordinates of a joint distribution over (X1, X2, Y).
enum class Var : unsigned { X1 = 0, X2 = 1, Y = 2 };

// Small bitmask set over {X1, X2, Y}.
struct VarSet {
  unsigned bits = 0;

  VarSet() = default;
  VarSet(std::initializer_list<Var> vs) {
    for (Var v : vs) bits |= 1u << static_cast<unsigned>(v);
  }

  bool contains(Var v) const { return bits & (1u << static_cast<unsigned>(v)); }
  bool empty() const { return bits == 0; }
  bool intersects(VarSet o) const { return (bits & o.bits) != 0; }
  VarSet operator|(VarSet o) const {
    VarSet r;
    r.bits = bits | o.bits;
    return r;
  }
};

struct Cardinalities {
  int n1 = 0;  // |X1|
  int n2 = 0;  // |X2|
  int ny = 0;  // |Y|

  int64_t cells() const { return static_cast<int64_t>(n1) * n2 * ny; }
  void validate(int64_t cell_cap = kDefaultCellCap) const;
};

// Dense probability tensor over (X1, X2, Y), i1-major then i2 then iy.
// Immutable by convention once built; every operation below is a pure
// function, so concurrent reads are safe.
struct JointDist {
  Cardinalities card;
  std::vector<double> probs;

  JointDist() = default;
  JointDist(Cardinalities c, double fill = 0.0)
      : card(c), probs(static_cast<size_t>(c.cells()), fill) {}

  size_t idx(int i1, int i2, int iy) const {
    return (static_cast<size_t>(i1) * card.n2 + i2) * card.ny + iy;
  }
  double at(int i1, int i2, int iy) const { return probs[idx(i1, i2, iy)]; }
  double& at(int i1, int i2, int iy) { return probs[idx(i1, i2, iy)]; }

  // Throws ValidationError naming the offending flat index.
  void validate(int64_t cell_cap = kDefaultCellCap) const;
};

// The observable pairwise projections p(x1,y), p(x2,y) and optionally
// p(x1,x2). These three tables are the entire input of the semi-supervised
// estimators.
struct PairwiseMarginals {
  Matrix m1y;                  // n1 x ny
  Matrix m2y;                  // n2 x ny
  std::optional<Matrix> m12;   // n1 x n2

  int n1() const { return m1y.rows; }
  int n2() const { return m2y.rows; }
  int ny() const { return m1y.cols; }

  std::vector<double> p_y() const { return m1y.col_sums(); }
  std::vector<double> p_x1() const { return m1y.row_sums(); }
  std::vector<double> p_x2() const { return m2y.row_sums(); }

  void validate() const;
};

struct PIDResult {
  double r = 0.0;   // redundancy, bits
  double u1 = 0.0;  // unique to X1, bits
  double u2 = 0.0;  // unique to X2, bits
  // Synergy needs the full joint; absent when only pairwise marginals were
  // available.
  std::optional<double> s;
  std::optional<double> total_mi;  // I_p({X1,X2};Y), bits
  bool converged = false;
  int iterations = 0;
};

// A marginal over any subset of the axes, shape listed in (X1, X2, Y) order.
struct MarginalTable {
  std::vector<int> shape;
  std::vector<double> values;
};

// Shannon entropy in bits of a normalized mass vector; 0*log 0 := 0.
// Throws ValidationError (naming the index) on negative or non-normalized
// input.
double entropy(std::span<const double> probs);
double entropy(const Matrix& m);
double entropy(const JointDist& d);
double entropy(const MarginalTable& t);

double entropy_of(const JointDist& d, VarSet keep);

// I(A;B) = H(A) + H(B) - H(A,B), bits. Groups must be disjoint, non-empty.
double mutual_info(const JointDist& d, VarSet group_a, VarSet group_b);

// I(A;B|C) = H(A,C) + H(B,C) - H(C) - H(A,B,C), bits.
double cond_mutual_info(const JointDist& d, VarSet group_a, VarSet group_b, VarSet given);

// I(X1;X2|Y): the form used throughout the interaction measures.
double conditional_mutual_info(const JointDist& d);

// I(X1;X2;Y) = I(X1;X2) - I(X1;X2|Y); signed.
double co_information(const JointDist& d);

// Sum over the dropped axes; keep must be non-empty.
MarginalTable marginalize(const JointDist& d, VarSet keep);

PairwiseMarginals pairwise_marginals(const JointDist& d, bool include_m12);

namespace detail {
// Entropy without input validation, for hot paths that own their data.
double entropy_nocheck(std::span<const double> probs);
}  // namespace detail

}  // namespace pidq
