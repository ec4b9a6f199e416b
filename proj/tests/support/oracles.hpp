#pragma once

// Reference computations that share no code path with the library.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "gdc/game.hpp"
#include "support/published.hpp"

namespace gdc::testing {

inline PayoffMatrix y5() {
  Eigen::MatrixXd m(5, 5);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) m(i, j) = published::kY5[i][j];
  }
  return PayoffMatrix(m);
}

inline Eigen::VectorXd y5_equilibrium() {
  Eigen::VectorXd x(5);
  for (int i = 0; i < 5; ++i) {
    x(i) = published::kEquilibriumNumerators[i] / published::kEquilibriumDenominator;
  }
  return x;
}

template <std::size_t R, std::size_t C>
Eigen::MatrixXd to_matrix(const std::array<std::array<double, C>, R>& rows) {
  Eigen::MatrixXd m(R, C);
  for (std::size_t i = 0; i < R; ++i) {
    for (std::size_t j = 0; j < C; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

template <std::size_t N>
Eigen::VectorXd to_vector(const std::array<double, N>& v) {
  Eigen::VectorXd out(N);
  for (std::size_t i = 0; i < N; ++i) out(i) = v[i];
  return out;
}

/// Replicator field written out component by component.
inline Eigen::VectorXd naive_field(const Eigen::MatrixXd& a, const Eigen::VectorXd& x) {
  const auto n = x.size();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) u(i) += a(i, j) * x(j);
  }
  double mean = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) mean += x(i) * u(i);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = x(i) * (u(i) - mean);
  return v;
}

/// Central finite-difference Jacobian of the replicator field.
inline Eigen::MatrixXd fd_jacobian(const Eigen::MatrixXd& a, const Eigen::VectorXd& x,
                                   double h = 1e-6) {
  const auto n = x.size();
  Eigen::MatrixXd jac(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd up = x;
    Eigen::VectorXd down = x;
    up(j) += h;
    down(j) -= h;
    jac.col(j) = (naive_field(a, up) - naive_field(a, down)) / (2 * h);
  }
  return jac;
}

inline Eigen::VectorXd random_simplex(std::mt19937_64& rng, int n) {
  std::exponential_distribution<double> expo(1.0);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = expo(rng);
  return x / x.sum();
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int n, double lo = -5, double hi = 5) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = u(rng);
  }
  return m;
}

inline Eigen::VectorXcd random_complex(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = {g(rng), g(rng)};
  return v;
}

/// Coefficients of prod (s - root), highest degree first.
inline Eigen::VectorXcd poly_from_roots(const Eigen::VectorXcd& roots) {
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(roots.size() + 1);
  c(0) = 1.0;
  for (Eigen::Index k = 0; k < roots.size(); ++k) {
    for (Eigen::Index i = k + 1; i >= 1; --i) c(i) -= roots(k) * c(i - 1);
  }
  return c;
}

/// Characteristic polynomial by Faddeev-LeVerrier, highest degree first.
inline Eigen::VectorXd char_poly(const Eigen::MatrixXd& a) {
  const auto n = a.rows();
  Eigen::VectorXd c(n + 1);
  c(0) = 1.0;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    m = a * m + c(k - 1) * Eigen::MatrixXd::Identity(n, n);
    c(k) = -(a * m).trace() / static_cast<double>(k);
  }
  return c;
}

}  // namespace gdc::testing
