#pragma once

// Pearson correlation and the slope t-test of a simple linear regression.
// The Student-t distribution is evaluated through the regularized
// incomplete beta function.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "gdc/error.hpp"

namespace gdc {

namespace internal {

// Continued fraction for I_x(a, b), modified Lentz method.
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEpsilon = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEpsilon) return h;
  }
  throw NumericalError("incomplete beta continued fraction did not converge");
}

}  // namespace internal

/// I_x(a, b) for a, b > 0 and x in [0, 1].
inline double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("incomplete beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * internal::beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * internal::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// P(T <= t) for Student's t with `dof` degrees of freedom.
inline double student_t_cdf(double t, double dof) {
  if (!(dof > 0.0)) throw ValidationError("degrees of freedom must be positive");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * regularized_incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
  return t > 0 ? 1.0 - tail : tail;
}

/// Two-sided p-value P(|T| >= |t|).
inline double student_t_two_sided(double t, double dof) {
  if (!(dof > 0.0)) throw ValidationError("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  return regularized_incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
}

inline double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw ValidationError("pearson: lengths differ");
  if (a.size() < 3) throw ValidationError("pearson: need at least 3 observations");
  const Eigen::VectorXd da = a.array() - a.mean();
  const Eigen::VectorXd db = b.array() - b.mean();
  const double saa = da.squaredNorm();
  const double sbb = db.squaredNorm();
  if (saa == 0.0 || sbb == 0.0) {
    throw ValidationError("pearson: zero variance, correlation undefined");
  }
  const double r = da.dot(db) / std::sqrt(saa * sbb);
  return std::clamp(r, -1.0, 1.0);
}

struct StatReport {
  double r = 0.0;
  int n_obs = 0;
  double t_stat = 0.0;
  double p_two_sided = 1.0;
};

/// Significance of the slope in the regression of b on a:
///   t = r sqrt((n - 2) / (1 - r^2)), n - 2 degrees of freedom.
inline StatReport regression_significance(const Eigen::VectorXd& a,
                                          const Eigen::VectorXd& b) {
  if (a.size() < 4) throw ValidationError("regression needs at least 4 observations");
  StatReport rep;
  rep.r = pearson(a, b);
  rep.n_obs = static_cast<int>(a.size());
  const double dof = rep.n_obs - 2.0;
  const double one_minus = 1.0 - rep.r * rep.r;
  // Collinear up to rounding.
  if (one_minus <= 1e-14) {
    rep.r = std::copysign(1.0, rep.r);
    rep.t_stat = std::copysign(std::numeric_limits<double>::infinity(), rep.r);
    rep.p_two_sided = 0.0;
    return rep;
  }
  rep.t_stat = rep.r * std::sqrt(dof / one_minus);
  rep.p_two_sided = student_t_two_sided(rep.t_stat, dof);
  return rep;
}

}  // namespace gdc
