#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "qpc/error.hpp"
#include "qpc/least_squares.hpp"

using namespace qpc::lsq;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Problem line_problem(Observations data) {
  Problem p;
  p.model = [](double x, const Eigen::VectorXd& q) { return q[0] + q[1] * x; };
  p.data = std::move(data);
  p.lower = Eigen::Vector2d(-kInf, -kInf);
  p.upper = Eigen::Vector2d(kInf, kInf);
  p.scale = Eigen::Vector2d(1.0, 1.0);
  return p;
}

}  // namespace

TEST(NormalEquations, HalvedErrorEqualsFourCopies) {
  // One point at sigma/2 weighs exactly as much as four copies at sigma.
  const Observations half{{0.0, 1.0, 2.0}, {1.0, 2.5, 2.9}, {0.2, 0.2, 0.1}};
  const Observations copies{{0.0, 1.0, 2.0, 2.0, 2.0, 2.0},
                            {1.0, 2.5, 2.9, 2.9, 2.9, 2.9},
                            {0.2, 0.2, 0.2, 0.2, 0.2, 0.2}};
  const Eigen::Vector2d p(0.7, 1.1);
  const auto a = normal_equations(line_problem(half), p);
  const auto b = normal_equations(line_problem(copies), p);
  EXPECT_LT((a.jtwj - b.jtwj).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((a.jtwr - b.jtwr).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(a.chi2, b.chi2, 1e-12);
}

TEST(LevenbergMarquardt, WeightedLineMatchesClosedForm) {
  const Observations d{{0, 1, 2, 3, 4, 5}, {0.9, 3.2, 4.8, 7.1, 9.2, 10.7}, {0.1, 0.2, 0.1, 0.3, 0.2, 0.1}};
  // Weighted linear regression by hand.
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double w = 1.0 / (d.sigma[i] * d.sigma[i]);
    sw += w;
    sx += w * d.x[i];
    sy += w * d.y[i];
    sxx += w * d.x[i] * d.x[i];
    sxy += w * d.x[i] * d.y[i];
  }
  const double det = sw * sxx - sx * sx;
  const double slope = (sw * sxy - sx * sy) / det;
  const double icpt = (sxx * sy - sx * sxy) / det;

  const auto sol = levenberg_marquardt(line_problem(d), Eigen::Vector2d(0.0, 0.0));
  ASSERT_TRUE(sol.converged);
  EXPECT_NEAR(sol.params[0], icpt, 1e-8);
  EXPECT_NEAR(sol.params[1], slope, 1e-8);
  // Parameter covariance = (J^T W J)^-1 scaled by the reduced chi^2.
  const double red = sol.chi2 / 4.0;
  EXPECT_NEAR(sol.sigma[1], std::sqrt(sw / det * red), 1e-8);
  EXPECT_NEAR(sol.sigma[0], std::sqrt(sxx / det * red), 1e-8);
}

TEST(LevenbergMarquardt, RespectsBounds) {
  const Observations d{{0, 1, 2, 3}, {-1.0, -1.1, -0.9, -1.0}, {0.1, 0.1, 0.1, 0.1}};
  Problem p;
  p.model = [](double, const Eigen::VectorXd& q) { return q[0]; };
  p.data = d;
  p.lower = Eigen::VectorXd::Constant(1, 0.0);
  p.upper = Eigen::VectorXd::Constant(1, kInf);
  p.scale = Eigen::VectorXd::Constant(1, 1.0);
  const auto sol = levenberg_marquardt(p, Eigen::VectorXd::Constant(1, 2.0));
  EXPECT_EQ(sol.params[0], 0.0);
  EXPECT_TRUE(sol.converged);
}

TEST(LevenbergMarquardt, NonlinearExponential) {
  Observations d;
  for (int i = 0; i < 20; ++i) {
    const double x = 0.25 * i;
    d.x.push_back(x);
    d.y.push_back(3.0 * std::exp(-0.7 * x));
    d.sigma.push_back(0.01);
  }
  Problem p;
  p.model = [](double x, const Eigen::VectorXd& q) { return q[0] * std::exp(-q[1] * x); };
  p.data = d;
  p.lower = Eigen::Vector2d(-kInf, -kInf);
  p.upper = Eigen::Vector2d(kInf, kInf);
  p.scale = Eigen::Vector2d(1.0, 1.0);
  const auto sol = multi_start(p, {Eigen::Vector2d(1.0, 2.0), Eigen::Vector2d(5.0, 0.1)});
  ASSERT_TRUE(sol.converged);
  EXPECT_NEAR(sol.params[0], 3.0, 1e-7);
  EXPECT_NEAR(sol.params[1], 0.7, 1e-7);
}

TEST(LevenbergMarquardt, UnconstrainedParameterIsFlagged) {
  const Observations d{{0, 1, 2}, {1.0, 1.0, 1.0}, {0.1, 0.1, 0.1}};
  Problem p;
  // The second parameter never enters the model.
  p.model = [](double, const Eigen::VectorXd& q) { return q[0]; };
  p.data = d;
  p.lower = Eigen::Vector2d(-kInf, -kInf);
  p.upper = Eigen::Vector2d(kInf, kInf);
  p.scale = Eigen::Vector2d(1.0, 1.0);
  const auto sol = levenberg_marquardt(p, Eigen::Vector2d(0.0, 0.0));
  EXPECT_TRUE(sol.rank_deficient);
  EXPECT_FALSE(sol.converged);
  EXPECT_TRUE(std::isinf(sol.sigma[1]));
  EXPECT_NEAR(sol.params[0], 1.0, 1e-9);
}

TEST(LevenbergMarquardt, MinimumOnKinkConverges) {
  // V-shaped model with the sample at x = 0 pulled below the vertex: the best
  // vertex position is exactly on that sample, where the gradient is undefined.
  Observations d;
  for (int i = -4; i <= 4; ++i) {
    d.x.push_back(i);
    d.y.push_back(1.0 + 2.0 * std::abs(i) - (i == 0 ? 0.6 : 0.0));
    d.sigma.push_back(0.1);
  }
  Problem p;
  p.model = [](double x, const Eigen::VectorXd& q) { return q[0] + q[1] * std::abs(x - q[2]); };
  p.data = d;
  p.lower = Eigen::Vector3d(-kInf, -kInf, -kInf);
  p.upper = Eigen::Vector3d(kInf, kInf, kInf);
  p.scale = Eigen::Vector3d(1.0, 1.0, 1.0);
  const auto sol = levenberg_marquardt(p, Eigen::Vector3d(0.5, 1.5, 0.37));
  EXPECT_TRUE(sol.converged);
  EXPECT_NEAR(sol.params[2], 0.0, 1e-6);

  // With the vertex at 0 the rest is ordinary linear regression on |x|.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double u = std::abs(d.x[i]);
    sx += u;
    sy += d.y[i];
    sxx += u * u;
    sxy += u * d.y[i];
  }
  const double n = static_cast<double>(d.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  EXPECT_NEAR(sol.params[0], intercept, 1e-5);
  EXPECT_NEAR(sol.params[1], slope, 1e-5);
}

TEST(Observations, Validation) {
  EXPECT_THROW((Observations{{0, 1}, {0}, {1, 1}}).validate(), qpc::RangeError);
  EXPECT_THROW((Observations{{0}, {0}, {0}}).validate(), qpc::RangeError);
  EXPECT_THROW(multi_start(line_problem({{0}, {0}, {1}}), {}), qpc::RangeError);
}
