#pragma once

// Single-input pole assignment on the replicator Jacobian.
//
// The controller pays every agent a tax -(K.x) and gives agents of the
// channel strategy m an extra reward (K.x)/x_m. Linearizing the controlled
// replicator field at the equilibrium x* gives
//   J^c = J^o + (B - x*) K^T,
// so placement acts through the effective input B - x*.

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "gdc/eigen.hpp"
#include "gdc/error.hpp"
#include "gdc/game.hpp"

namespace gdc {

/// Unit basis vector e_m selecting the rewarded strategy. Zero-based index;
/// files and the CLI use one-based channel numbers.
class ChannelVector {
 public:
  ChannelVector(int index, int n) : index_(index), n_(n) {
    if (n < 2 || index < 0 || index >= n) {
      throw ValidationError("channel " + std::to_string(index + 1) +
                            " out of range for " + std::to_string(n) +
                            " strategies");
    }
  }

  int index() const { return index_; }
  int n() const { return n_; }
  Eigen::VectorXd vector() const { return Eigen::VectorXd::Unit(n_, index_); }

 private:
  int index_;
  int n_;
};

/// Channel plus gain: everything the payoff device needs at run time.
struct FeedbackRule {
  ChannelVector channel;
  Eigen::VectorXd gain;
};

struct ControllerSpec {
  ChannelVector channel;
  double shift = 0.0;  // real-part shift applied to the oscillatory pair
  Eigen::VectorXd gain;
  Eigen::MatrixXd controlled;  // J^c
  Eigen::VectorXcd desired_spectrum;
  double equilibrium_drift = 0.0;  // K . x*

  FeedbackRule rule() const { return {channel, gain}; }
};

struct Controllability {
  Eigen::MatrixXd matrix;  // [b, J b, ..., J^{n-1} b]
  Eigen::VectorXd singular_values;
  int rank = 0;
};

inline Controllability controllability_matrix(const Eigen::MatrixXd& jac,
                                              const Eigen::VectorXd& input) {
  if (jac.rows() != jac.cols() || input.size() != jac.rows()) {
    throw ValidationError("controllability_matrix: dimension mismatch");
  }
  const Eigen::Index n = jac.rows();
  Controllability c;
  c.matrix.resize(n, n);
  c.matrix.col(0) = input;
  for (Eigen::Index k = 1; k < n; ++k) c.matrix.col(k) = jac * c.matrix.col(k - 1);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c.matrix);
  c.singular_values = svd.singularValues();
  const double largest = c.singular_values.size() ? c.singular_values(0) : 0.0;
  for (Eigen::Index k = 0; k < c.singular_values.size(); ++k) {
    if (largest > 0.0 && c.singular_values(k) > 1e-9 * largest) ++c.rank;
  }
  return c;
}

inline Eigen::MatrixXd controlled_jacobian(const Eigen::MatrixXd& jac,
                                           const ChannelVector& channel,
                                           const Eigen::VectorXd& gain,
                                           const SimplexPoint& x_star) {
  const Eigen::Index n = jac.rows();
  if (jac.cols() != n || gain.size() != n || channel.n() != n || x_star.n() != n) {
    throw ValidationError("controlled_jacobian: dimension mismatch");
  }
  return jac + (channel.vector() - x_star.vector()) * gain.transpose();
}

/// Largest distance between paired members of two spectra, pairing each
/// value of `a` greedily with its nearest unused value of `b`.
inline double spectrum_mismatch(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(static_cast<std::size_t>(b.size()), false);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    Eigen::Index pick = -1;
    double best = 0.0;
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(a(i) - b(j));
      if (pick < 0 || d < best) {
        pick = j;
        best = d;
      }
    }
    used[pick] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

/// Spectrum of `es` with the oscillatory conjugate pair moved by `shift`
/// along the real axis.
inline Eigen::VectorXcd shifted_spectrum(const EigenSystem& es, double shift) {
  const OscillatoryMode mode = select_oscillatory_pair(es);
  Eigen::VectorXcd desired = es.values;
  for (Eigen::Index i = 0; i < desired.size(); ++i) {
    if (desired(i) == mode.eigenvalue || desired(i) == std::conj(mode.eigenvalue)) {
      desired(i) += shift;
    }
  }
  return desired;
}

/// Pole placement for J^o + (B - x*) K^T.
///
/// Only the oscillatory pair moves. Every other mode gets zero modal gain,
/// which for the uncontrollable -U mode (left eigenvector 1^T, right
/// eigenvector x*) is exactly K.x* = 0. Uses the modal form of the
/// single-input placement formula: with right/left eigenvectors r_i, l_i
/// (l_i r_j = d_ij), beta_i = l_i b,
///   K^T r_i = -prod_j (lambda_i - mu_j) / (beta_i prod_{j!=i} (lambda_i - lambda_j)).
inline ControllerSpec solve_gain(const Eigen::MatrixXd& jac, const EigenSystem& es,
                                 const ChannelVector& channel, double shift,
                                 const SimplexPoint& x_star) {
  const int n = static_cast<int>(jac.rows());
  if (jac.cols() != n || es.n() != n || channel.n() != n || x_star.n() != n) {
    throw ValidationError("solve_gain: dimension mismatch");
  }
  if (!std::isfinite(shift)) throw ValidationError("solve_gain: shift must be finite");

  const Eigen::VectorXcd& lambda = es.values;
  const Eigen::VectorXcd desired = shifted_spectrum(es, shift);
  const Eigen::VectorXd input = channel.vector() - x_star.vector();
  const Eigen::VectorXcd input_c = input.cast<std::complex<double>>();

  Eigen::FullPivLU<Eigen::MatrixXcd> lu(es.vectors);
  if (!lu.isInvertible()) {
    throw NumericalError("Jacobian is not diagonalizable; placement formula fails");
  }
  const Eigen::MatrixXcd left = lu.inverse();  // rows are left eigenvectors

  Eigen::VectorXcd modal_gain = Eigen::VectorXcd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (desired(i) == lambda(i)) continue;
    const std::complex<double> beta = (left.row(i) * input_c).value();
    const double reach = left.row(i).norm() * input.norm();
    if (std::abs(beta) <= 1e-9 * reach) {
      throw InfeasibleError("placement infeasible on channel " +
                            std::to_string(channel.index() + 1) +
                            ": oscillatory mode is not controllable");
    }
    std::complex<double> ratio = lambda(i) - desired(i);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const std::complex<double> gap = lambda(i) - lambda(j);
      if (std::abs(gap) <= 1e-10 * std::max(1.0, std::abs(lambda(i)))) {
        throw NumericalError("repeated eigenvalues; placement formula fails");
      }
      ratio *= (lambda(i) - desired(j)) / gap;
    }
    modal_gain(i) = -ratio / beta;
  }
  const Eigen::VectorXcd gain_c = left.transpose() * modal_gain;
  if (gain_c.imag().norm() > 1e-8 * std::max(1.0, gain_c.real().norm())) {
    throw NumericalError("placement produced a complex gain");
  }

  ControllerSpec spec{channel, shift, gain_c.real(), {}, desired, 0.0};
  spec.controlled = controlled_jacobian(jac, channel, spec.gain, x_star);
  spec.equilibrium_drift = spec.gain.dot(x_star.vector());

  const EigenSystem closed = eigen_decompose(spec.controlled);
  const double mismatch = spectrum_mismatch(desired, closed.values);
  if (mismatch > 1e-6) {
    throw NumericalError("closed-loop spectrum misses the target by " +
                         std::to_string(mismatch));
  }
  if (std::abs(spec.equilibrium_drift) > 1e-6) {
    throw NumericalError("solved gain moves the equilibrium (K.x* = " +
                         std::to_string(spec.equilibrium_drift) + ")");
  }
  return spec;
}

/// Controller from an explicit gain. The desired spectrum is whatever the
/// gain produces, and `shift` is the observed move of the oscillatory
/// pair's real part.
inline ControllerSpec apply_gain(const Eigen::MatrixXd& jac, const EigenSystem& es,
                                 const ChannelVector& channel,
                                 const Eigen::VectorXd& gain,
                                 const SimplexPoint& x_star) {
  ControllerSpec spec{channel, 0.0, gain, {}, {}, 0.0};
  spec.controlled = controlled_jacobian(jac, channel, gain, x_star);
  spec.equilibrium_drift = gain.dot(x_star.vector());
  const EigenSystem closed = eigen_decompose(spec.controlled);
  spec.desired_spectrum = closed.values;
  const double before = select_oscillatory_pair(es).eigenvalue.real();
  try {
    spec.shift = select_oscillatory_pair(closed).eigenvalue.real() - before;
  } catch (const ValidationError&) {
    spec.shift = std::numeric_limits<double>::quiet_NaN();
  }
  return spec;
}

/// Per-strategy payoff deltas of the budget-balanced payoff device.
struct PayoffAdjustment {
  Eigen::VectorXd delta;     // added to each agent's payoff, by strategy
  double control_signal = 0.0;  // K . x
  double reward_total = 0.0;    // paid to channel agents
  double tax_total = 0.0;       // collected from everyone (<= 0 when signal > 0)
  bool active = false;
};

inline PayoffAdjustment payoff_adjustments(const ChannelVector& channel,
                                           const Eigen::VectorXd& gain,
                                           const std::vector<long long>& counts,
                                           long long agents) {
  const int n = channel.n();
  if (gain.size() != n || static_cast<int>(counts.size()) != n) {
    throw ValidationError("payoff_adjustments: dimension mismatch");
  }
  long long total = 0;
  for (long long c : counts) total += c;
  if (total != agents || agents <= 0) {
    throw ValidationError("payoff_adjustments: counts must sum to the population size");
  }
  PayoffAdjustment adj;
  adj.delta = Eigen::VectorXd::Zero(n);
  const long long on_channel = counts[static_cast<std::size_t>(channel.index())];
  if (on_channel == 0) return adj;

  const double size = static_cast<double>(agents);
  double signal = 0.0;
  for (int i = 0; i < n; ++i) signal += gain(i) * static_cast<double>(counts[i]) / size;
  const double share = static_cast<double>(on_channel) / size;

  adj.active = true;
  adj.control_signal = signal;
  adj.delta.setConstant(-signal);
  adj.delta(channel.index()) += signal / share;
  adj.tax_total = -signal * size;
  // Channel agents collectively receive N * signal, the tax returned.
  adj.reward_total = signal / share * static_cast<double>(on_channel);
  return adj;
}

inline PayoffAdjustment payoff_adjustments(const FeedbackRule& rule,
                                           const std::vector<long long>& counts,
                                           long long agents) {
  return payoff_adjustments(rule.channel, rule.gain, counts, agents);
}

}  // namespace gdc
