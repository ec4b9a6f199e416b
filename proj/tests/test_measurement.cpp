#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gdc/io.hpp"
#include "gdc/measurement.hpp"
#include "gdc/stats.hpp"
#include "support/oracles.hpp"

namespace {

Eigen::VectorXd fixture_column(const std::string& file, const std::string& column) {
  return gdc::io::load_csv(std::filesystem::path(GDC_FIXTURE_DIR) / file)
      .numeric_column(column, file);
}

struct TTableRow {
  double t;
  double dof;
  double p;
};

TEST(StudentT, TwoSidedTailMatchesTabulatedCriticalValues) {
  const TTableRow table[] = {
      {2.306, 8, 0.05},  {3.355, 8, 0.01},   {1.860, 8, 0.10},  {5.041, 8, 0.001},
      {2.228, 10, 0.05}, {3.169, 10, 0.01},  {12.706, 1, 0.05}, {4.303, 2, 0.05},
      {2.776, 4, 0.05},  {2.086, 20, 0.05},
  };
  for (const auto& row : table) {
    EXPECT_NEAR(gdc::student_t_two_sided(row.t, row.dof), row.p, 5e-4)
        << "t=" << row.t << " dof=" << row.dof;
  }
}

TEST(StudentT, CdfIsSymmetricAndMonotone) {
  for (double dof : {1.0, 3.0, 8.0, 30.0}) {
    EXPECT_NEAR(gdc::student_t_cdf(0.0, dof), 0.5, 1e-15);
    double last = 0.0;
    for (double t = -6; t <= 6; t += 0.25) {
      const double c = gdc::student_t_cdf(t, dof);
      EXPECT_NEAR(c + gdc::student_t_cdf(-t, dof), 1.0, 1e-12);
      EXPECT_GE(c, last);
      last = c;
    }
  }
  // One degree of freedom is the Cauchy distribution.
  EXPECT_NEAR(gdc::student_t_cdf(1.0, 1.0), 0.75, 1e-12);
}

TEST(IncompleteBeta, MatchesClosedForms) {
  for (double x = 0.0; x <= 1.0; x += 0.05) {
    EXPECT_NEAR(gdc::regularized_incomplete_beta(1, 1, x), x, 1e-12);
    EXPECT_NEAR(gdc::regularized_incomplete_beta(1, 3.5, x), 1 - std::pow(1 - x, 3.5), 1e-12);
    EXPECT_NEAR(gdc::regularized_incomplete_beta(2.5, 1, x), std::pow(x, 2.5), 1e-12);
    EXPECT_NEAR(gdc::regularized_incomplete_beta(2, 3, x) + gdc::regularized_incomplete_beta(3, 2, 1 - x),
                1.0, 1e-12);
  }
}

TEST(Pearson, PropertiesOnRandomVectors) {
  std::mt19937_64 rng(123);
  std::normal_distribution<double> g(0, 1);
  std::uniform_real_distribution<double> scale(0.1, 10);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd a(10), b(10);
    for (int i = 0; i < 10; ++i) {
      a(i) = g(rng);
      b(i) = g(rng);
    }
    const double r = gdc::pearson(a, b);
    EXPECT_LE(std::abs(r), 1.0);
    EXPECT_DOUBLE_EQ(r, gdc::pearson(b, a));
    const Eigen::VectorXd moved = (a * scale(rng)).array() + g(rng);
    EXPECT_NEAR(gdc::pearson(moved, b), r, 1e-12);
    EXPECT_NEAR(gdc::pearson(-a, b), -r, 1e-12);
    EXPECT_NEAR(gdc::pearson(a, a), 1.0, 1e-12);
    EXPECT_NEAR(gdc::regression_significance(a, b).p_two_sided,
                gdc::regression_significance(b, a).p_two_sided, 1e-12);
  }
}

TEST(Pearson, ZeroVarianceAndShortInputsAreReported) {
  EXPECT_THROW(gdc::pearson(Eigen::VectorXd::Ones(5), Eigen::VectorXd::LinSpaced(5, 0, 1)),
               gdc::ValidationError);
  EXPECT_THROW(gdc::pearson(Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 0)), gdc::ValidationError);
  EXPECT_THROW(gdc::pearson(Eigen::VectorXd::Ones(4), Eigen::VectorXd::Ones(5)), gdc::ValidationError);
}

TEST(Regression, CollinearDataGivesPZero) {
  const Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(10, -1, 1);
  const auto rep = gdc::regression_significance(a, 3 * a);
  EXPECT_NEAR(rep.r, 1.0, 1e-15);
  EXPECT_EQ(rep.p_two_sided, 0.0);
}

TEST(Regression, PublishedTablesFromFixtureColumns) {
  const auto sm = fixture_column("table2_eigencycle.csv", "T_minus");
  const auto sp = fixture_column("table2_eigencycle.csv", "T_plus");
  const auto em = fixture_column("table2_eigencycle.csv", "E_minus");
  const auto ep = fixture_column("table2_eigencycle.csv", "E_plus");
  const auto lm = fixture_column("table2_eigencycle.csv", "S_minus");
  const auto lp = fixture_column("table2_eigencycle.csv", "S_plus");

  const auto r1 = gdc::regression_significance(sm, em);
  EXPECT_NEAR(r1.r, 0.738, 0.02);
  EXPECT_NEAR(r1.t_stat, 3.09, 0.05);
  EXPECT_NEAR(r1.p_two_sided, 0.015, 0.002);
  EXPECT_NEAR(gdc::pearson(sp, ep), 0.773, 0.02);
  EXPECT_NEAR(gdc::pearson(sm, lm), 0.829, 0.02);
  EXPECT_NEAR(gdc::pearson(sp, lp), 0.910, 0.02);
  EXPECT_NEAR(gdc::pearson(sm, sp), 0.300, 0.02);
  EXPECT_GT(gdc::regression_significance(sm, ep).p_two_sided, 0.05);
  EXPECT_GT(gdc::regression_significance(sp, em).p_two_sided, 0.05);
}

TEST(MeanDistribution, ConstantSeries) {
  gdc::TimeSeries ts;
  ts.n = 5;
  ts.agents = 6;
  for (int t = 0; t < 4; ++t) ts.rounds.push_back({t, {1, 1, 1, 1, 2}, 0, 0, 0});
  const Eigen::VectorXd m = gdc::mean_distribution(ts);
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(m(i), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(m(4), 1.0 / 3.0);
  EXPECT_EQ(gdc::angular_momentum(ts).values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(MeanDistribution, SumsToOneOnRandomSeries) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<long long> c(0, 50);
  for (int trial = 0; trial < 20; ++trial) {
    gdc::TimeSeries ts;
    ts.n = 4;
    ts.agents = 0;
    for (int t = 0; t < 30; ++t) {
      std::vector<long long> counts = {c(rng), c(rng), c(rng), 0};
      const long long used = counts[0] + counts[1] + counts[2];
      counts[3] = 200 - used;
      ts.rounds.push_back({t, counts, 0, 0, 0});
    }
    ts.agents = 200;
    EXPECT_NEAR(gdc::mean_distribution(ts).sum(), 1.0, 1e-12);
  }
}

TEST(MeanDistribution, FixtureColumnForTheOpenLoopExperiment) {
  const auto rho = fixture_column("table2_distribution.csv", "E_o");
  const Eigen::VectorXd expected = gdc::testing::to_vector(gdc::published::kRhoEo);
  EXPECT_LT((rho - expected).cwiseAbs().maxCoeff(), 1e-12);
}

Eigen::MatrixXd square_loop(int loops) {
  const double corners[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  Eigen::MatrixXd s(4 * loops + 1, 3);
  for (int t = 0; t <= 4 * loops; ++t) {
    s(t, 0) = corners[t % 4][0];
    s(t, 1) = corners[t % 4][1];
    s(t, 2) = 0.25;
  }
  return s;
}

TEST(AngularMomentum, SquareLoopAveragesOneHalf) {
  const auto set = gdc::angular_momentum(square_loop(25));
  EXPECT_DOUBLE_EQ(set.values(0), 0.5);
}

TEST(AngularMomentum, TimeReversalNegates) {
  std::mt19937_64 rng(5);
  Eigen::MatrixXd s(50, 4);
  for (int t = 0; t < 50; ++t) s.row(t) = gdc::testing::random_simplex(rng, 4).transpose();
  const auto forward = gdc::angular_momentum(s);
  const Eigen::MatrixXd reversed = s.colwise().reverse();
  const auto backward = gdc::angular_momentum(reversed);
  EXPECT_LT((forward.values + backward.values).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(AngularMomentum, SustainedEigenmodeOrbitIsProportionalToEigencycles) {
  const auto a = gdc::testing::y5();
  const auto eq = gdc::solve_interior_equilibrium(a);
  const auto mode =
      gdc::select_oscillatory_pair(gdc::eigen_decompose(gdc::jacobian_at(a, eq.point)));
  const double omega = mode.eigenvalue.imag();
  const int steps = 10000;
  const double horizon = 10 * 2 * std::numbers::pi / omega;
  Eigen::MatrixXd s(steps + 1, 5);
  for (int t = 0; t <= steps; ++t) {
    const std::complex<double> phase = std::polar(1.0, omega * horizon * t / steps);
    s.row(t) = (eq.point.vector() + 0.01 * (mode.eta * phase).real()).transpose();
  }
  const auto ell = gdc::angular_momentum(s);
  const auto sigma = gdc::eigencycles(mode.eta, true);
  EXPECT_GT(gdc::pearson(ell.values, sigma.values), 0.99);
  for (int p = 0; p < 10; ++p) {
    if (std::abs(sigma.values(p)) > 0.05) {
      EXPECT_EQ(std::signbit(ell.values(p)), std::signbit(sigma.values(p))) << p;
    }
  }
}

TEST(AngularMomentum, PoolingAveragesSessions) {
  gdc::TimeSeries a, b;
  a.n = b.n = 2;
  a.agents = b.agents = 4;
  a.rounds = {{0, {4, 0}, 0, 0, 0}, {1, {2, 2}, 0, 0, 0}};
  b.rounds = {{0, {0, 4}, 0, 0, 0}, {1, {0, 4}, 0, 0, 0}};
  const auto pooled = gdc::pooled_angular_momentum({a, b});
  EXPECT_DOUBLE_EQ(pooled.values(0),
                   (gdc::angular_momentum(a).values(0) + gdc::angular_momentum(b).values(0)) / 2);
  EXPECT_DOUBLE_EQ(gdc::pooled_mean_distribution({a, b})(0), (0.75 + 0.0) / 2);
}

}  // namespace
