#include <gtest/gtest.h>

#include <cmath>

#include "walklab/bsm.hpp"
#include "walklab/counterexample.hpp"
#include "walklab/errors.hpp"
#include "walklab/esscher.hpp"
#include "walklab/numerics.hpp"

using namespace walklab;

namespace {
const std::vector<double> kGrid = linear_grid(0.1, 1.0, 10);
}

TEST(Lambda0, MarginOracles) {
  const auto rv = FiniteRV::asymmetric_binomial();
  EXPECT_NEAR(laplace_margin(rv, 0.5), std::log(1.166697 / 1.133148), 1e-6);
  EXPECT_NEAR(laplace_margin(rv, 0.5), 0.029176, 1e-6);
  EXPECT_NEAR(laplace_margin(rv, 0.01), 1.5e-6 / 6.0, 2e-8);
  const double l0 = find_lambda0(rv, kGrid);
  EXPECT_LE(l0, 0.5);
  EXPECT_NEAR(l0, 0.1, 1e-15);
}

TEST(Lambda0, SymmetricHasNoMargin) {
  EXPECT_THROW(find_lambda0(FiniteRV::symmetric_binomial(), kGrid), NoMarginError);
  EXPECT_THROW(find_lambda0(FiniteRV::symmetric_binomial(), linear_grid(0.001, 10.0, 500)), NoMarginError);
}

TEST(LogM, UnitKDropsTheLogTerm) {
  const auto rv = FiniteRV::asymmetric_binomial();
  const int n = 64;
  const auto p = solve_esscher(rv, n);
  const double expected = 8.0 * (2 * 0.5 * (p.b - 0.125)) + n * (log_laplace(rv, 2 * p.a * 0.5) - 0.125);
  EXPECT_NEAR(log_M(rv, 1, n, 0.5), expected, 1e-12);
  EXPECT_NEAR(log2_M(rv, 1, n, 0.5), expected / kLn2, 1e-12);
}

TEST(LogM, LatticeCrossCheck) {
  EXPECT_NEAR(log_M_lattice(FiniteRV::asymmetric_binomial(), 2, 16, 0.5),
              log_M(FiniteRV::asymmetric_binomial(), 2, 16, 0.5), 1e-9);
}

TEST(LogM, SymmetricStaysBelowTheRootTerm) {
  const auto rv = FiniteRV::symmetric_binomial();
  for (int n : {4, 64, 1024, 16384}) {
    const auto p = solve_esscher(rv, n);
    const double root_term = std::sqrt(static_cast<double>(n)) * (2 * 0.5 * (p.b - 0.125));
    EXPECT_LE(log_M(rv, 1, n, 0.5), root_term + 1e-12);
  }
}

TEST(FindNk, FixedLambdaCertificate) {
  const auto cert = find_nk(FiniteRV::asymmetric_binomial(), 0.5, 5);
  ASSERT_EQ(cert.records.size(), 5u);
  const std::vector<int> expected_n = {64, 4096, 6144, 16384, 20480};
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& r = cert.records[i];
    EXPECT_EQ(r.n_k, expected_n[i]);
    EXPECT_GE(r.log2_M, 2.0 * r.k);
    EXPECT_NEAR(log_v_bsm_power(r.alpha_k, 1.0, 1.0 / r.k) + r.log_beta_k, -r.k * kLn2, 1e-9);
  }
}

TEST(FindNk, ScheduleExhaustionIsASearchError) {
  EXPECT_THROW(find_nk(FiniteRV::asymmetric_binomial(), 0.1, 5), SearchError);
  try {
    find_nk(FiniteRV::asymmetric_binomial(), 0.1, 5);
  } catch (const SearchError& e) {
    EXPECT_NE(std::string(e.what()).find("best margin"), std::string::npos);
  }
}

TEST(Certificate, EscalatesToFirstValidLambda) {
  const auto cert = build_certificate(FiniteRV::asymmetric_binomial(), kGrid, 5);
  EXPECT_NEAR(cert.lambda0_smallest, 0.1, 1e-15);
  EXPECT_NEAR(cert.lambda0, 0.3, 1e-12);
  EXPECT_TRUE(log_x_strictly_increasing(cert));
  for (std::size_t i = 1; i < cert.records.size(); ++i) {
    EXPECT_GE(static_cast<double>(cert.records[i].n_k) / cert.records[i].k,
              static_cast<double>(cert.records[i - 1].n_k) / cert.records[i - 1].k);
  }
  const double v1 = std::exp(log_series_v_bsm(cert, 1.0));
  // The k = 1 term contributes exactly 1/2 at y = 1; the rest are tiny.
  EXPECT_GE(v1, 0.5 * (1.0 - 1e-14));
  EXPECT_LE(v1, 0.501);
}

TEST(Certificate, SeriesIsAnOrdinaryConjugate) {
  const auto cert = build_certificate(FiniteRV::asymmetric_binomial(), kGrid, 5);
  const auto v = series_V(cert);
  EXPECT_EQ(v.family_name(), "series_conjugate");
  const auto first = cert.records.front();
  EXPECT_NEAR(v.log_V(1e3), first.log_beta_k - first.alpha_k * std::log(1e3), 1e-9);
}

TEST(Growth, ExactRatioAndEscape) {
  const auto rv = FiniteRV::asymmetric_binomial();
  const auto cert = build_certificate(rv, kGrid, 5);
  const auto rows = growth_certificate(rv, cert, 1.0);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_NEAR(rows[0].exact_ratio_at_x_k / rows[0].slope_lower_bound, 1.0, 1e-10);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_GT(rows[i].slope_lower_bound, std::sqrt(static_cast<double>(rows[i].k)));
    EXPECT_NEAR(rows[i].log_x_k, cert.records[i].log_x_k, 1e-9);
    if (i > 0) {
      EXPECT_GT(rows[i].log_x_k, rows[i - 1].log_x_k);
    }
    ASSERT_TRUE(rows[i].probe_covered);
    EXPECT_GT(rows[i].bound_at_probe, std::sqrt(static_cast<double>(rows[i].k)));
  }
}
