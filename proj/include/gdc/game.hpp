#pragma once

// Payoff matrices, the replicator vector field and its linearization.

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gdc/error.hpp"

namespace gdc {

inline constexpr int kMaxStrategies = 16;

/// Square payoff matrix of a one-population game. Entry (i, j) is the
/// payoff to strategy i against strategy j.
class PayoffMatrix {
 public:
  explicit PayoffMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
      throw ValidationError("payoff matrix must be square, got " +
                            std::to_string(entries_.rows()) + "x" +
                            std::to_string(entries_.cols()));
    }
    if (entries_.rows() < 2 || entries_.rows() > kMaxStrategies) {
      throw ValidationError("strategy count must be in [2, 16], got " +
                            std::to_string(entries_.rows()));
    }
    if (!entries_.allFinite()) {
      throw ValidationError("payoff matrix has non-finite entries");
    }
  }

  int n() const { return static_cast<int>(entries_.rows()); }
  double operator()(int i, int j) const { return entries_(i, j); }
  const Eigen::MatrixXd& matrix() const { return entries_; }

 private:
  Eigen::MatrixXd entries_;
};

/// A point of the probability simplex.
class SimplexPoint {
 public:
  static constexpr double kSumTolerance = 1e-12;

  explicit SimplexPoint(Eigen::VectorXd x) : x_(std::move(x)) {
    if (x_.size() < 1 || !x_.allFinite()) {
      throw ValidationError("simplex point must be a finite, nonempty vector");
    }
    if ((x_.array() < 0.0).any()) {
      throw ValidationError("simplex point has a negative component");
    }
    if (std::abs(x_.sum() - 1.0) > kSumTolerance) {
      throw ValidationError("simplex point components must sum to 1");
    }
  }

  /// Frequencies counts / total.
  static SimplexPoint FromCounts(const std::vector<long long>& counts) {
    long long total = 0;
    for (long long c : counts) {
      if (c < 0) throw ValidationError("negative strategy count");
      total += c;
    }
    if (total <= 0) throw ValidationError("strategy counts sum to zero");
    Eigen::VectorXd x(static_cast<Eigen::Index>(counts.size()));
    for (std::size_t i = 0; i < counts.size(); ++i) {
      x(static_cast<Eigen::Index>(i)) =
          static_cast<double>(counts[i]) / static_cast<double>(total);
    }
    // Division can leave the sum a few ulps away from 1.
    return SimplexPoint(x / x.sum());
  }

  static SimplexPoint Uniform(int n) {
    return SimplexPoint(Eigen::VectorXd::Constant(n, 1.0 / n));
  }

  int n() const { return static_cast<int>(x_.size()); }
  double operator[](int i) const { return x_(i); }
  const Eigen::VectorXd& vector() const { return x_; }

 private:
  Eigen::VectorXd x_;
};

struct EquilibriumProfile {
  SimplexPoint point;
  double value;  // common payoff of every strategy at the point
};

struct PayoffEvaluation {
  Eigen::VectorXd payoffs;  // U_i = (A x)_i
  double mean;              // x . U
};

namespace internal {
inline void RequireSameSize(const PayoffMatrix& a, Eigen::Index size) {
  if (size != a.n()) {
    throw ValidationError("dimension mismatch: game has " +
                          std::to_string(a.n()) + " strategies, state has " +
                          std::to_string(size));
  }
}
}  // namespace internal

inline PayoffEvaluation payoffs(const PayoffMatrix& a, const SimplexPoint& x) {
  internal::RequireSameSize(a, x.n());
  Eigen::VectorXd u = a.matrix() * x.vector();
  const double mean = x.vector().dot(u);
  return {std::move(u), mean};
}

/// Replicator field x_i (U_i - mean) evaluated at an arbitrary point of R^n.
/// The finite-difference Jacobian oracle needs points off the simplex.
inline Eigen::VectorXd replicator_field(const PayoffMatrix& a,
                                        const Eigen::VectorXd& x) {
  internal::RequireSameSize(a, x.size());
  const Eigen::VectorXd u = a.matrix() * x;
  const double mean = x.dot(u);
  return x.array() * (u.array() - mean);
}

inline Eigen::VectorXd replicator_velocity(const PayoffMatrix& a,
                                           const SimplexPoint& x) {
  return replicator_field(a, x.vector());
}

/// Interior Nash equilibrium from the payoff-equality rows plus the
/// normalization row. Boundary and degenerate games are rejected.
inline EquilibriumProfile solve_interior_equilibrium(const PayoffMatrix& a) {
  const int n = a.n();
  Eigen::MatrixXd system(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int i = 0; i + 1 < n; ++i) {
    system.row(i) = a.matrix().row(i) - a.matrix().row(i + 1);
  }
  system.row(n - 1).setOnes();
  rhs(n - 1) = 1.0;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    throw ValidationError("degenerate game: equilibrium system is singular");
  }
  Eigen::VectorXd x = lu.solve(rhs);
  if (!x.allFinite()) {
    throw NumericalError("equilibrium solve produced non-finite values");
  }
  if ((x.array() <= 0.0).any()) {
    throw ValidationError("no interior equilibrium");
  }
  x /= x.sum();
  SimplexPoint point(x);
  const PayoffEvaluation eval = payoffs(a, point);
  const double spread = eval.payoffs.maxCoeff() - eval.payoffs.minCoeff();
  if (spread > 1e-9 * std::max(1.0, a.matrix().cwiseAbs().maxCoeff())) {
    throw NumericalError("equilibrium payoffs differ by " + std::to_string(spread));
  }
  return {std::move(point), eval.mean};
}

/// Analytic Jacobian of the replicator field:
///   J_ij = d_ij (U_i - mean) + x_i (A_ij - U_j - (A^T x)_j).
inline Eigen::MatrixXd jacobian_at(const PayoffMatrix& a, const Eigen::VectorXd& x) {
  internal::RequireSameSize(a, x.size());
  const Eigen::MatrixXd& m = a.matrix();
  const Eigen::VectorXd u = m * x;
  const Eigen::VectorXd ut = m.transpose() * x;
  const double mean = x.dot(u);
  const int n = a.n();
  Eigen::MatrixXd jac(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      jac(i, j) = x(i) * (m(i, j) - u(j) - ut(j));
    }
    jac(i, i) += u(i) - mean;
  }
  return jac;
}

inline Eigen::MatrixXd jacobian_at(const PayoffMatrix& a, const SimplexPoint& x) {
  return jacobian_at(a, x.vector());
}

}  // namespace gdc
