#pragma once

// Observables of strategy time series: the time-averaged distribution and
// the mean angular momentum in every two-strategy subspace.

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gdc/eigen.hpp"
#include "gdc/error.hpp"
#include "gdc/simulation.hpp"

namespace gdc {

struct AngularMomentumSet {
  std::vector<std::pair<int, int>> pairs;  // same order as EigencycleSet
  Eigen::VectorXd values;
};

/// Column means of a state matrix (one row per round).
inline Eigen::VectorXd mean_distribution(const Eigen::MatrixXd& states) {
  if (states.rows() == 0) throw ValidationError("mean_distribution: empty series");
  return states.colwise().mean().transpose();
}

inline Eigen::VectorXd mean_distribution(const TimeSeries& ts) {
  if (ts.rounds.empty()) throw ValidationError("mean_distribution: empty series");
  // Sum integer counts exactly before dividing.
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(ts.n);
  for (const auto& rec : ts.rounds) {
    for (int i = 0; i < ts.n; ++i) sums(i) += static_cast<double>(rec.counts[i]);
  }
  return sums / (static_cast<double>(ts.agents) * static_cast<double>(ts.rounds.size()));
}

/// Mean over consecutive rows of the scalar cross product
/// x_m(t) x_k(t+1) - x_k(t) x_m(t+1), about the origin (no centering).
inline AngularMomentumSet angular_momentum(const Eigen::MatrixXd& states) {
  if (states.rows() < 2) throw ValidationError("angular_momentum: series too short");
  const int n = static_cast<int>(states.cols());
  AngularMomentumSet set;
  set.pairs = subspace_pairs(n);
  set.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(set.pairs.size()));
  const Eigen::Index steps = states.rows() - 1;
  for (std::size_t p = 0; p < set.pairs.size(); ++p) {
    const auto [m, k] = set.pairs[p];
    const auto xm = states.col(m);
    const auto xk = states.col(k);
    double acc = 0.0;
    for (Eigen::Index t = 0; t < steps; ++t) {
      acc += xm(t) * xk(t + 1) - xk(t) * xm(t + 1);
    }
    set.values(static_cast<Eigen::Index>(p)) = acc / static_cast<double>(steps);
  }
  return set;
}

inline AngularMomentumSet angular_momentum(const TimeSeries& ts) {
  if (ts.rounds.size() < 2) throw ValidationError("angular_momentum: series too short");
  return angular_momentum(ts.states());
}

/// Equal-weight average of per-session distributions.
inline Eigen::VectorXd pooled_mean_distribution(const std::vector<TimeSeries>& sessions) {
  if (sessions.empty()) throw ValidationError("no sessions to pool");
  Eigen::VectorXd acc = mean_distribution(sessions.front());
  for (std::size_t s = 1; s < sessions.size(); ++s) acc += mean_distribution(sessions[s]);
  return acc / static_cast<double>(sessions.size());
}

/// Equal-weight average of per-session angular momenta.
inline AngularMomentumSet pooled_angular_momentum(const std::vector<TimeSeries>& sessions) {
  if (sessions.empty()) throw ValidationError("no sessions to pool");
  AngularMomentumSet acc = angular_momentum(sessions.front());
  for (std::size_t s = 1; s < sessions.size(); ++s) {
    acc.values += angular_momentum(sessions[s]).values;
  }
  acc.values /= static_cast<double>(sessions.size());
  return acc;
}

}  // namespace gdc
