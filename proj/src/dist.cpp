#include "pidq/dist.hpp"

#include <cmath>
#include <sstream>

#include "pidq/errors.hpp"

namespace pidq {

namespace {

constexpr double kInvLn2 = 1.4426950408889634;

}  // namespace

void Cardinalities::validate(int64_t cell_cap) const {
  if (n1 < 1 || n2 < 1 || ny < 1) {
    std::ostringstream os;
    os << "cardinalities must be >= 1, got (" << n1 << ", " << n2 << ", " << ny << ")";
    throw ValidationError(os.str());
  }
  if (cells() > cell_cap) {
    std::ostringstream os;
    os << "tensor of " << cells() << " cells exceeds the cap of " << cell_cap;
    throw ValidationError(os.str());
  }
}

void JointDist::validate(int64_t cell_cap) const {
  card.validate(cell_cap);
  if (static_cast<int64_t>(probs.size()) != card.cells()) {
    std::ostringstream os;
    os << "tensor has " << probs.size() << " entries, expected " << card.cells();
    throw ValidationError(os.str());
  }
  double sum = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (!std::isfinite(p)) {
      throw ValidationError("probs[" + std::to_string(i) + "] is not finite");
    }
    if (p < 0.0) {
      throw ValidationError("probs[" + std::to_string(i) + "] is negative");
    }
    sum += p;
  }
  if (std::fabs(sum - 1.0) > kNormTol) {
    std::ostringstream os;
    os << "probabilities sum to " << sum << ", expected 1 within " << kNormTol;
    throw ValidationError(os.str());
  }
}

void PairwiseMarginals::validate() const {
  auto check_table = [](const Matrix& m, const char* name) {
    double sum = 0.0;
    for (size_t i = 0; i < m.v.size(); ++i) {
      if (!std::isfinite(m.v[i])) {
        throw ValidationError(std::string(name) + "[" + std::to_string(i) + "] is not finite");
      }
      if (m.v[i] < 0.0) {
        throw ValidationError(std::string(name) + "[" + std::to_string(i) + "] is negative");
      }
      sum += m.v[i];
    }
    if (std::fabs(sum - 1.0) > kNormTol) {
      std::ostringstream os;
      os << name << " sums to " << sum << ", expected 1 within " << kNormTol;
      throw ValidationError(os.str());
    }
  };
  if (m1y.rows < 1 || m1y.cols < 1 || m2y.rows < 1 || m2y.cols < 1) {
    throw ValidationError("pairwise marginal tables must be non-empty");
  }
  if (m1y.cols != m2y.cols) {
    throw ValidationError("m1y and m2y disagree on |Y|");
  }
  check_table(m1y, "m1y");
  check_table(m2y, "m2y");

  const auto py1 = m1y.col_sums();
  const auto py2 = m2y.col_sums();
  for (int y = 0; y < ny(); ++y) {
    if (std::fabs(py1[y] - py2[y]) > kCrossMarginalTol) {
      std::ostringstream os;
      os << "p(y=" << y << ") disagrees between m1y (" << py1[y] << ") and m2y (" << py2[y] << ")";
      throw ValidationError(os.str());
    }
  }

  if (m12) {
    if (m12->rows != n1() || m12->cols != n2()) {
      throw ValidationError("m12 shape does not match m1y/m2y supports");
    }
    check_table(*m12, "m12");
    const auto px1_a = m1y.row_sums();
    const auto px1_b = m12->row_sums();
    for (int i = 0; i < n1(); ++i) {
      if (std::fabs(px1_a[i] - px1_b[i]) > kCrossMarginalTol) {
        std::ostringstream os;
        os << "p(x1=" << i << ") disagrees between m1y (" << px1_a[i] << ") and m12 ("
           << px1_b[i] << ")";
        throw ValidationError(os.str());
      }
    }
    const auto px2_a = m2y.row_sums();
    const auto px2_b = m12->col_sums();
    for (int j = 0; j < n2(); ++j) {
      if (std::fabs(px2_a[j] - px2_b[j]) > kCrossMarginalTol) {
        std::ostringstream os;
        os << "p(x2=" << j << ") disagrees between m2y (" << px2_a[j] << ") and m12 ("
           << px2_b[j] << ")";
        throw ValidationError(os.str());
      }
    }
  }
}

namespace detail {

double entropy_nocheck(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h * kInvLn2;
}

}  // namespace detail

double entropy(std::span<const double> probs) {
  double sum = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    if (!std::isfinite(probs[i])) {
      throw ValidationError("probs[" + std::to_string(i) + "] is not finite");
    }
    if (probs[i] < 0.0) {
      throw ValidationError("probs[" + std::to_string(i) + "] is negative");
    }
    sum += probs[i];
  }
  if (std::fabs(sum - 1.0) > kNormTol) {
    std::ostringstream os;
    os << "mass sums to " << sum << ", expected 1 within " << kNormTol;
    throw ValidationError(os.str());
  }
  return detail::entropy_nocheck(probs);
}

double entropy(const Matrix& m) { return entropy(std::span<const double>(m.v)); }

double entropy(const JointDist& d) { return entropy(std::span<const double>(d.probs)); }

double entropy(const MarginalTable& t) { return entropy(std::span<const double>(t.values)); }

MarginalTable marginalize(const JointDist& d, VarSet keep) {
  if (keep.empty()) throw ArgumentError("marginalize: keep set must be non-empty");

  const bool k1 = keep.contains(Var::X1);
  const bool k2 = keep.contains(Var::X2);
  const bool ky = keep.contains(Var::Y);

  MarginalTable out;
  if (k1) out.shape.push_back(d.card.n1);
  if (k2) out.shape.push_back(d.card.n2);
  if (ky) out.shape.push_back(d.card.ny);

  size_t size = 1;
  for (int s : out.shape) size *= static_cast<size_t>(s);
  out.values.assign(size, 0.0);

  for (int i1 = 0; i1 < d.card.n1; ++i1) {
    for (int i2 = 0; i2 < d.card.n2; ++i2) {
      for (int iy = 0; iy < d.card.ny; ++iy) {
        size_t pos = 0;
        if (k1) pos = pos * d.card.n1 + i1;
        if (k2) pos = pos * d.card.n2 + i2;
        if (ky) pos = pos * d.card.ny + iy;
        out.values[pos] += d.at(i1, i2, iy);
      }
    }
  }
  return out;
}

double entropy_of(const JointDist& d, VarSet keep) {
  return detail::entropy_nocheck(marginalize(d, keep).values);
}

double mutual_info(const JointDist& d, VarSet group_a, VarSet group_b) {
  if (group_a.empty() || group_b.empty()) {
    throw ArgumentError("mutual_info: variable groups must be non-empty");
  }
  if (group_a.intersects(group_b)) {
    throw ArgumentError("mutual_info: variable groups must be disjoint");
  }
  return entropy_of(d, group_a) + entropy_of(d, group_b) - entropy_of(d, group_a | group_b);
}

double cond_mutual_info(const JointDist& d, VarSet group_a, VarSet group_b, VarSet given) {
  if (group_a.empty() || group_b.empty()) {
    throw ArgumentError("cond_mutual_info: variable groups must be non-empty");
  }
  if (group_a.intersects(group_b) || group_a.intersects(given) || group_b.intersects(given)) {
    throw ArgumentError("cond_mutual_info: variable groups must be disjoint");
  }
  return entropy_of(d, group_a | given) + entropy_of(d, group_b | given) - entropy_of(d, given) -
         entropy_of(d, group_a | group_b | given);
}

double conditional_mutual_info(const JointDist& d) {
  return cond_mutual_info(d, {Var::X1}, {Var::X2}, {Var::Y});
}

double co_information(const JointDist& d) {
  return mutual_info(d, {Var::X1}, {Var::X2}) - conditional_mutual_info(d);
}

PairwiseMarginals pairwise_marginals(const JointDist& d, bool include_m12) {
  PairwiseMarginals m;
  m.m1y = Matrix(d.card.n1, d.card.ny);
  m.m2y = Matrix(d.card.n2, d.card.ny);
  if (include_m12) m.m12 = Matrix(d.card.n1, d.card.n2);

  for (int i1 = 0; i1 < d.card.n1; ++i1) {
    for (int i2 = 0; i2 < d.card.n2; ++i2) {
      for (int iy = 0; iy < d.card.ny; ++iy) {
        const double p = d.at(i1, i2, iy);
        m.m1y.at(i1, iy) += p;
        m.m2y.at(i2, iy) += p;
        if (include_m12) m.m12->at(i1, i2) += p;
      }
    }
  }
  return m;
}

}  // namespace pidq
