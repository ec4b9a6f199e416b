#include <random>

#include <gtest/gtest.h>

#include "gdc/controller.hpp"
#include "support/oracles.hpp"

namespace {

using gdc::testing::to_matrix;
using gdc::testing::to_vector;

struct Y5 {
  gdc::PayoffMatrix game = gdc::testing::y5();
  gdc::EquilibriumProfile eq = gdc::solve_interior_equilibrium(game);
  Eigen::MatrixXd jac = gdc::jacobian_at(game, eq.point);
  gdc::EigenSystem es = gdc::eigen_decompose(jac);
  gdc::ChannelVector e5{4, 5};

  gdc::ControllerSpec design(double b) const { return gdc::solve_gain(jac, es, e5, b, eq.point); }
};

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

TEST(SolveGain, MinusTreatmentReproducesPublishedGainAndJacobian) {
  const Y5 y;
  const auto spec = y.design(-0.2);
  EXPECT_LT(max_abs(spec.gain - to_vector(gdc::published::kKMinus)), 2e-3) << spec.gain.transpose();
  EXPECT_LT(max_abs(spec.controlled - to_matrix(gdc::published::kJMinus)), 2e-3);
  EXPECT_NEAR(spec.controlled(4, 0), 0.675, 2e-3);
  EXPECT_NEAR(spec.controlled(0, 0), -1.966, 2e-3);
}

TEST(SolveGain, PlusTreatmentReproducesPublishedGainAndJacobian) {
  const Y5 y;
  const auto spec = y.design(0.2);
  EXPECT_LT(max_abs(spec.gain - to_vector(gdc::published::kKPlus)), 2e-3) << spec.gain.transpose();
  EXPECT_LT(max_abs(spec.controlled - to_matrix(gdc::published::kJPlus)), 2e-3);
  EXPECT_NEAR(spec.controlled(4, 3), -3.977, 2e-3);
}

TEST(SolveGain, ClosedLoopSpectraMatchPrintedEigenvalues) {
  const Y5 y;
  for (const auto& [b, printed] : {std::pair{-0.2, gdc::published::kLambdaMinus},
                                   std::pair{0.2, gdc::published::kLambdaPlus}}) {
    const auto closed = gdc::eigen_decompose(y.design(b).controlled);
    Eigen::VectorXcd want(5);
    for (int k = 0; k < 5; ++k) want(k) = {printed[k][0], printed[k][1]};
    EXPECT_LT(gdc::spectrum_mismatch(want, closed.values), 1e-3) << "b = " << b;
  }
}

TEST(SolveGain, ClosedLoopCharacteristicPolynomialHasTheDesiredRoots) {
  // Oracle independent of the eigen solver: Faddeev-LeVerrier coefficients.
  const Y5 y;
  for (double b : {-0.2, -0.1, 0.1, 0.2}) {
    const auto spec = y.design(b);
    const Eigen::VectorXcd want = gdc::testing::poly_from_roots(spec.desired_spectrum);
    const Eigen::VectorXd got = gdc::testing::char_poly(spec.controlled);
    EXPECT_LT((want - got.cast<std::complex<double>>()).cwiseAbs().maxCoeff(), 1e-8) << b;
  }
}

TEST(SolveGain, OnlyTheOscillatoryPairMoves) {
  const Y5 y;
  const auto spec = y.design(-0.2);
  EXPECT_NEAR(spec.desired_spectrum(0).real(), y.es.values(0).real(), 0);
  EXPECT_NEAR(spec.desired_spectrum(2).real(), y.es.values(2).real() - 0.2, 1e-15);
  EXPECT_NEAR(spec.desired_spectrum(2).imag(), y.es.values(2).imag(), 0);
  EXPECT_EQ(spec.desired_spectrum(4), y.es.values(4));
}

TEST(SolveGain, PreservesTheEquilibrium) {
  const Y5 y;
  for (double b : {-0.2, 0.2}) {
    const auto spec = y.design(b);
    EXPECT_LT(std::abs(spec.gain.dot(y.eq.point.vector())), 1e-9);
    // Direct velocity check: the payoff device is inactive at x*.
    const Eigen::VectorXd x = y.eq.point.vector();
    const double signal = spec.gain.dot(x);
    Eigen::VectorXd u = y.game.matrix() * x;
    u.array() -= signal;
    u(4) += signal / x(4);
    const Eigen::VectorXd v = x.array() * (u.array() - x.dot(u));
    EXPECT_LT(max_abs(v), 1e-9);
  }
  // The rounded published gains give K.x* near 1.6e-4 only.
  EXPECT_LT(std::abs(to_vector(gdc::published::kKMinus).dot(y.eq.point.vector())), 1e-3);
  EXPECT_LT(std::abs(to_vector(gdc::published::kKPlus).dot(y.eq.point.vector())), 1e-3);
}

TEST(SolveGain, ZeroShiftGivesZeroGainOnEveryChannel) {
  const Y5 y;
  for (int m = 0; m < 5; ++m) {
    const auto spec = gdc::solve_gain(y.jac, y.es, gdc::ChannelVector(m, 5), 0.0, y.eq.point);
    EXPECT_EQ(spec.gain.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LT(max_abs(spec.controlled - y.jac), 1e-15);
  }
}

TEST(SolveGain, StabilityHoldsAcrossTheShiftRange) {
  const Y5 y;
  for (double b = -0.2; b <= 0.2 + 1e-12; b += 0.05) {
    const auto closed = gdc::eigen_decompose(y.design(b).controlled);
    EXPECT_LT(closed.values.real().maxCoeff(), 0.0) << b;
  }
}

TEST(SolveGain, UncontrollableModeIsInfeasible) {
  // Block-diagonal system: the input reaches both real modes but never the
  // rotating block.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(4, 4);
  jac(0, 0) = -1;
  jac(1, 1) = -2;
  jac(2, 2) = -0.5;
  jac(2, 3) = -1;
  jac(3, 2) = 1;
  jac(3, 3) = -0.5;
  const auto es = gdc::eigen_decompose(jac);
  const gdc::SimplexPoint x_star(Eigen::Vector4d(0.5, 0.5, 0, 0));
  EXPECT_EQ(gdc::controllability_matrix(jac, Eigen::Vector4d(0.5, -0.5, 0, 0)).rank, 2);
  EXPECT_THROW(gdc::solve_gain(jac, es, gdc::ChannelVector(0, 4), 0.1, x_star),
               gdc::InfeasibleError);
}

TEST(ControlledJacobian, ZeroGainIsTheOpenLoop) {
  const Y5 y;
  for (int m = 0; m < 5; ++m) {
    EXPECT_EQ(max_abs(gdc::controlled_jacobian(y.jac, gdc::ChannelVector(m, 5),
                                               Eigen::VectorXd::Zero(5), y.eq.point) -
                      y.jac),
              0.0);
  }
}

TEST(ControlledJacobian, MatchesFiniteDifferencesOfTheControlledField) {
  const Y5 y;
  const auto spec = y.design(-0.2);
  const Eigen::MatrixXd a = y.game.matrix();
  const Eigen::VectorXd k = spec.gain;
  auto field = [&](const Eigen::VectorXd& x) {
    // Controlled replicator: tax -K.x for all, reward (K.x)/x_5 to strategy 5.
    Eigen::VectorXd v = gdc::testing::naive_field(a, x);
    const double signal = k.dot(x);
    Eigen::VectorXd bump = -signal * x;
    bump(4) += signal;
    return Eigen::VectorXd(v + bump);
  };
  const Eigen::VectorXd x = y.eq.point.vector();
  Eigen::MatrixXd fd(5, 5);
  for (int j = 0; j < 5; ++j) {
    Eigen::VectorXd up = x, down = x;
    up(j) += 1e-6;
    down(j) -= 1e-6;
    fd.col(j) = (field(up) - field(down)) / 2e-6;
  }
  EXPECT_LT(max_abs(fd - spec.controlled), 1e-6);
}

TEST(Controllability, BareChannelIsFullRankAndEffectiveChannelLosesTheValueMode) {
  const Y5 y;
  EXPECT_EQ(gdc::controllability_matrix(y.jac, y.e5.vector()).rank, 5);
  const Eigen::VectorXd eff = y.e5.vector() - y.eq.point.vector();
  const auto c = gdc::controllability_matrix(y.jac, eff);
  // 1^T is a left eigenvector of J and 1^T (e5 - x*) = 0, so every column
  // of the Krylov matrix sums to zero.
  EXPECT_LT((Eigen::RowVectorXd::Ones(5) * c.matrix).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(c.rank, 4);
}

TEST(Controllability, ZeroMatrixWithUnitInputHasRankOne) {
  EXPECT_EQ(gdc::controllability_matrix(Eigen::MatrixXd::Zero(4, 4), Eigen::VectorXd::Unit(4, 0)).rank,
            1);
}

TEST(PayoffAdjustments, WorkedExampleWithSixAgents) {
  const gdc::ChannelVector e5(4, 5);
  const Eigen::VectorXd k = to_vector(gdc::published::kKMinus);
  const auto adj = gdc::payoff_adjustments(e5, k, {1, 1, 1, 1, 2}, 6);
  const double signal = (1.729 - 1.611 + 0.454 + 1.250 - 0.800) / 6;
  EXPECT_NEAR(adj.control_signal, signal, 1e-12);
  EXPECT_NEAR(adj.control_signal, 0.1703, 5e-5);
  EXPECT_NEAR(adj.delta(4), 0.3407, 5e-5);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(adj.delta(i), -0.1703, 5e-5);
  EXPECT_NEAR(2 * adj.delta(4) + adj.delta.head(4).sum(), 0.0, 1e-12);
}

TEST(PayoffAdjustments, InactiveWhenTheChannelIsEmpty) {
  const auto adj =
      gdc::payoff_adjustments(gdc::ChannelVector(4, 5), Eigen::VectorXd::Ones(5), {2, 1, 1, 2, 0}, 6);
  EXPECT_FALSE(adj.active);
  EXPECT_EQ(adj.delta.cwiseAbs().maxCoeff(), 0.0);
}

TEST(PayoffAdjustments, VanishAtEquilibriumCounts) {
  const Y5 y;
  const auto spec = y.design(-0.2);
  const auto adj = gdc::payoff_adjustments(spec.rule(), {444, 638, 641, 288, 976}, 2987);
  EXPECT_LT(adj.delta.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PayoffAdjustments, BudgetBalancedOnRandomStates) {
  std::mt19937_64 rng(2718);
  std::normal_distribution<double> g(0.0, 2.0);
  std::uniform_int_distribution<int> size(2, 8);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = size(rng);
    std::uniform_int_distribution<long long> count(0, 500);
    std::vector<long long> counts(static_cast<std::size_t>(n));
    long long total = 0;
    for (auto& c : counts) total += (c = count(rng));
    if (total == 0) {
      counts[0] = 1;
      total = 1;
    }
    Eigen::VectorXd k(n);
    for (int i = 0; i < n; ++i) k(i) = g(rng);
    const gdc::ChannelVector ch(trial % n, n);
    const auto adj = gdc::payoff_adjustments(ch, k, counts, total);
    double net = 0.0;
    for (int i = 0; i < n; ++i) net += static_cast<double>(counts[i]) * adj.delta(i);
    EXPECT_NEAR(net, 0.0, 1e-9 * std::max(1.0, std::abs(adj.reward_total)));
    EXPECT_NEAR(adj.reward_total + adj.tax_total, 0.0, 1e-9 * std::max(1.0, std::abs(adj.reward_total)));
  }
}

TEST(PayoffAdjustments, RejectsCountsThatDoNotSumToThePopulation) {
  EXPECT_THROW(gdc::payoff_adjustments(gdc::ChannelVector(0, 2), Eigen::VectorXd::Ones(2), {1, 1}, 3),
               gdc::ValidationError);
  EXPECT_THROW(gdc::ChannelVector(5, 5), gdc::ValidationError);
}

}  // namespace
