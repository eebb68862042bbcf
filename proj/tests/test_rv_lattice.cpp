#include <gtest/gtest.h>

#include <cmath>

#include "walklab/errors.hpp"
#include "walklab/rv_lattice.hpp"

using namespace walklab;

TEST(FiniteRV, MomentsOfStandardLaws) {
  const auto s = moments(FiniteRV::symmetric_binomial());
  EXPECT_NEAR(s.mean, 0.0, 1e-15);
  EXPECT_NEAR(s.variance, 1.0, 1e-15);
  EXPECT_NEAR(s.third, 0.0, 1e-15);

  const auto a = moments(FiniteRV::asymmetric_binomial());
  EXPECT_NEAR(a.mean, 0.0, 1e-15);
  EXPECT_NEAR(a.variance, 1.0, 1e-15);
  EXPECT_NEAR(a.third, 1.5, 1e-15);

  const auto t = moments(FiniteRV::trinomial());
  EXPECT_NEAR(t.variance, 1.0, 1e-15);
  EXPECT_NEAR(t.third, 0.0, 1e-15);
}

TEST(FiniteRV, RejectsInvalidLaws) {
  EXPECT_THROW(FiniteRV({{1.0, 1.0}}), ValidationError);
  EXPECT_THROW(FiniteRV({{-1.0, 0.5}, {-1.0, 0.5}}), ValidationError);
  EXPECT_THROW(FiniteRV({{-1.0, 0.4}, {1.0, 0.5}}), ValidationError);
  EXPECT_THROW(FiniteRV({{-1.0, 0.5}, {2.0, 0.5}}), ValidationError);
  EXPECT_THROW(FiniteRV({{-2.0, 0.5}, {2.0, 0.5}}), ValidationError);
  EXPECT_THROW(FiniteRV({{-1.0, 0.0}, {1.0, 1.0}}), ValidationError);
}

TEST(FiniteRV, SortsAtomsAndReportsSupportBound) {
  const FiniteRV rv({{2.0, 0.2}, {-0.5, 0.8}});
  EXPECT_EQ(rv.min_value(), -0.5);
  EXPECT_EQ(rv.max_value(), 2.0);
  EXPECT_EQ(rv.support_bound(), 2.0);
}

TEST(FiniteRV, StandardizeRescales) {
  const auto rv = standardize({{0.0, 0.5}, {10.0, 0.5}});
  EXPECT_NEAR(rv.atoms()[0].value, -1.0, 1e-15);
  EXPECT_NEAR(rv.atoms()[1].value, 1.0, 1e-15);
  EXPECT_THROW(standardize({{3.0, 1.0}}), ValidationError);
}

TEST(Laplace, OracleValues) {
  EXPECT_NEAR(laplace(FiniteRV::symmetric_binomial(), 1.0), 1.5430806348152437, 1e-15);
  EXPECT_DOUBLE_EQ(laplace(FiniteRV::trinomial(), 0.0), 1.0);
  const double asym = 0.2 * std::exp(1.0) + 0.8 * std::exp(-0.25);
  EXPECT_NEAR(laplace(FiniteRV::asymmetric_binomial(), 0.5), asym, 1e-15);
  EXPECT_NEAR(asym, 1.166697, 5e-7);
  EXPECT_NEAR(log_laplace(FiniteRV::asymmetric_binomial(), 0.5), std::log(asym), 1e-15);
  EXPECT_NEAR(log_laplace(FiniteRV::symmetric_binomial(), 800.0), 800.0 - std::log(2.0), 1e-12);
}

TEST(Laplace, GaussianOracle) {
  EXPECT_EQ(gaussian_laplace(0.0), 1.0);
  EXPECT_NEAR(gaussian_laplace(0.5), 1.133148, 5e-7);
  EXPECT_NEAR(gaussian_laplace(1.0), 1.648721, 5e-7);
  EXPECT_EQ(log_gaussian_laplace(2.0), 2.0);
}

TEST(TerminalDistribution, TwoFairCoins) {
  const auto d = terminal_distribution(FiniteRV::symmetric_binomial(), 2);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_NEAR(d.points()[0].w, -std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(d.points()[1].w, 0.0, 1e-15);
  EXPECT_NEAR(d.points()[2].w, std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(d.points()[0].prob, 0.25);
  EXPECT_DOUBLE_EQ(d.points()[1].prob, 0.5);
}

TEST(TerminalDistribution, SingleStepIsTheInnovation) {
  const auto d = terminal_distribution(FiniteRV::asymmetric_binomial(), 1);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.points()[0].w, -0.5);
  EXPECT_EQ(d.points()[0].prob, 0.8);
  EXPECT_EQ(d.points()[1].w, 2.0);
}

TEST(TerminalDistribution, HundredSteps) {
  const auto d = terminal_distribution(FiniteRV::symmetric_binomial(), 100);
  EXPECT_EQ(d.size(), 101u);
  EXPECT_NEAR(d.second_moment(), 1.0, 1e-10);
  EXPECT_LE(d.mass_residual(), 1e-12);
}

TEST(TerminalDistribution, TrinomialRecombines) {
  const auto d = terminal_distribution(FiniteRV::trinomial(), 50);
  EXPECT_EQ(d.size(), 101u);
}

TEST(TerminalDistribution, UnderflowingTailMassStillRecombines) {
  const auto d = terminal_distribution(FiniteRV::asymmetric_binomial(), 1024);
  EXPECT_EQ(d.size(), 1025u);
  for (std::size_t i = 1; i < d.size(); ++i) EXPECT_GT(d.points()[i].w, d.points()[i - 1].w);
}

TEST(TerminalDistribution, CapAndArgumentErrors) {
  EXPECT_THROW(terminal_distribution(FiniteRV::symmetric_binomial(), 0), ValidationError);
  EXPECT_THROW(terminal_distribution(FiniteRV::symmetric_binomial(), 4, -1.0), ValidationError);
  EXPECT_THROW(terminal_distribution(FiniteRV::symmetric_binomial(), 50, 1e-9, 10), NumericError);
}

TEST(LatticeExpect, OracleValues) {
  const auto d1 = terminal_distribution(FiniteRV::symmetric_binomial(), 1);
  EXPECT_DOUBLE_EQ(lattice_expect(d1, [](double) { return 1.0; }), 1.0);
  EXPECT_NEAR(lattice_expect(d1, [](double w) { return std::exp(w); }), 1.5430806, 5e-8);
  const auto d100 = terminal_distribution(FiniteRV::symmetric_binomial(), 100);
  EXPECT_NEAR(lattice_expect(d100, [](double w) { return std::exp(w); }), std::pow(std::cosh(0.1), 100), 1e-12);
  EXPECT_NEAR(lattice_log_expect(d100, [](double w) { return w; }), 100 * std::log(std::cosh(0.1)), 1e-12);
}

TEST(LatticeExpect, NonFiniteIntegrandNamesTheAtom) {
  const auto d = terminal_distribution(FiniteRV::symmetric_binomial(), 1);
  try {
    lattice_expect(d, [](double w) { return w < 0 ? std::nan("") : 1.0; });
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("w=-1"), std::string::npos);
  }
}
