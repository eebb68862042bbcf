#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "generators.hpp"
#include "walklab/bsm.hpp"
#include "walklab/conjugate.hpp"
#include "walklab/counterexample.hpp"
#include "walklab/discrete_duals.hpp"
#include "walklab/dp.hpp"
#include "walklab/esscher.hpp"
#include "walklab/numerics.hpp"
#include "walklab/prop1b.hpp"

using namespace walklab;
using testgen::Gen;
using testgen::for_all;

namespace {

bool convex_on(const std::vector<double>& xs, const std::vector<double>& vs, double slack) {
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    const double left = (vs[i] - vs[i - 1]) / (xs[i] - xs[i - 1]);
    const double right = (vs[i + 1] - vs[i]) / (xs[i + 1] - xs[i]);
    if (right - left < -slack) return false;
  }
  return true;
}

}  // namespace

// ---- lattice ---------------------------------------------------------------

TEST(LatticeProperty, MassMeanVarianceInvariants) {
  for_all(40, 11, [](Gen& g, int) {
    const auto rv = g.finite_rv(4);
    const int n = g.integer(1, 30);
    const auto d = terminal_distribution(rv, n);
    EXPECT_LE(d.mass_residual(), 1e-9) << "n=" << n;
    EXPECT_LE(std::abs(d.mean()), 1e-8) << "n=" << n;
    EXPECT_LE(std::abs(d.second_moment() - 1.0), 1e-7) << "n=" << n;
    for (std::size_t i = 1; i < d.size(); ++i) ASSERT_LT(d.points()[i - 1].w, d.points()[i].w);
  });
}

TEST(LatticeProperty, LaplaceConvexWithUnitValueAndZeroSlopeAtOrigin) {
  for_all(30, 12, [](Gen& g, int) {
    const auto rv = g.finite_rv(5);
    EXPECT_DOUBLE_EQ(laplace(rv, 0.0), 1.0);
    const double h = 1e-4;
    EXPECT_NEAR((laplace(rv, h) - laplace(rv, -h)) / (2 * h), 0.0, 1e-6);
    for (double l = -3.0; l <= 3.0; l += 0.25) {
      const double d2 = laplace(rv, l + 0.01) - 2 * laplace(rv, l) + laplace(rv, l - 0.01);
      EXPECT_GT(d2, 0.0) << "lambda=" << l;
    }
  });
}

TEST(LatticeProperty, CoshPowerMatchesLatticeExpectation) {
  const auto rv = FiniteRV::symmetric_binomial();
  for (double gamma : {0.5, 1.0, 2.0}) {
    for (int n : {1, 10, 100}) {
      const auto d = terminal_distribution(rv, n);
      const double lat = lattice_expect(d, [gamma](double w) { return std::exp(gamma * w); });
      const double direct = std::pow(std::cosh(gamma / std::sqrt(static_cast<double>(n))), n);
      EXPECT_NEAR(lat / direct, 1.0, 1e-12) << gamma << " " << n;
    }
  }
}

TEST(LatticeProperty, ZeroMergeToleranceKeepsBinomialRecombination) {
  for (const auto& rv : {FiniteRV::symmetric_binomial(), FiniteRV::asymmetric_binomial()}) {
    for (int n : {1, 2, 7, 33, 100}) EXPECT_EQ(terminal_distribution(rv, n, 0.0).size(), static_cast<std::size_t>(n + 1));
  }
}

// ---- Esscher ---------------------------------------------------------------

TEST(EsscherProperty, NormalizationAndMartingaleIdentities) {
  for_all(40, 21, [](Gen& g, int) {
    const auto rv = g.finite_rv(4);
    const int n = g.integer(1, 40);
    const auto p = solve_esscher(rv, n);
    const auto id = check_esscher(p, terminal_distribution(rv, n));
    EXPECT_NEAR(id.normalization, 1.0, 1e-10) << "n=" << n;
    EXPECT_NEAR(id.martingale, 1.0, 1e-10) << "n=" << n;
  });
}

TEST(EsscherProperty, ResidualDecreasingAndNewtonAgrees) {
  for_all(25, 22, [](Gen& g, int) {
    const auto rv = g.finite_rv(4);
    const int n = g.integer(1, 500);
    double prev = esscher_residual(rv, n, -2.0);
    for (double a = -1.9; a <= 3.0; a += 0.1) {
      const double cur = esscher_residual(rv, n, a);
      EXPECT_LT(cur, prev) << "a=" << a;
      prev = cur;
    }
    const auto p = solve_esscher(rv, n);
    EXPECT_NEAR(refine_esscher_newton(rv, n, p.a), p.a, 1e-12);
  });
}

// ---- conjugate pairs -------------------------------------------------------

TEST(ConjugateProperty, DoubleConjugateRoundtrip) {
  for_all(20, 31, [](Gen& g, int i) {
    const auto u = (i % 2 == 0) ? UtilitySpec::crra(g.uniform(0.1, 0.9))
                                : UtilitySpec::power_conjugate(g.uniform(0.2, 3.0), g.log_uniform(0.1, 10.0));
    for (double x : geometric_grid(1e-2, 1e2, 9)) {
      const auto r = conjugate_U(u, x);
      EXPECT_NEAR(r.value / u.U(x), 1.0, 1e-6) << u.family_name() << " x=" << x;
    }
  });
}

TEST(ConjugateProperty, InverseMarginalAndFenchelInequality) {
  for_all(20, 32, [](Gen& g, int i) {
    const auto u = (i % 2 == 0) ? UtilitySpec::crra(g.uniform(0.1, 0.9))
                                : UtilitySpec::power_conjugate(g.uniform(0.2, 3.0), g.log_uniform(0.1, 10.0));
    const auto grid = geometric_grid(1e-2, 1e2, 11);
    for (double x : grid) {
      EXPECT_NEAR(u.I(u.dU(x)) / x, 1.0, 1e-9);
      for (double y : grid) EXPECT_GE(u.V(y) - (u.U(x) - x * y), -1e-12 * std::max(1.0, std::abs(u.V(y))));
      const double y = u.dU(x);
      EXPECT_NEAR(u.V(y), u.U(x) - x * y, 1e-8 * std::max(1.0, std::abs(u.U(x))));
    }
  });
}

TEST(ConjugateProperty, DualDerivativeIsMinusInverseMarginal) {
  for_all(10, 33, [](Gen& g, int) {
    const auto u = UtilitySpec::power_conjugate(g.uniform(0.2, 3.0), g.log_uniform(0.1, 10.0));
    for (double y : geometric_grid(0.1, 10.0, 15)) {
      const double h = 1e-5 * y;
      const double fd = (u.V(y + h) - u.V(y - h)) / (2 * h);
      EXPECT_NEAR(fd / -u.I(y), 1.0, 1e-6);
    }
  });
}

TEST(ConjugateProperty, PowerUtilityTangencyIdentity) {
  for_all(20, 34, [](Gen& g, int) {
    const double a = g.uniform(0.1, 5.0), b = g.log_uniform(0.01, 100.0), y0 = g.log_uniform(0.1, 10.0);
    const double x0 = a * b * std::pow(y0, -a - 1.0);
    EXPECT_NEAR(power_utility(a, b, x0) / ((1.0 + a) * b * std::pow(y0, -a)), 1.0, 1e-10);
  });
}

TEST(ConjugateProperty, MajorantHoldsAtEveryGridPoint) {
  for_all(15, 35, [](Gen& g, int) {
    const double c1 = g.log_uniform(0.1, 10.0), c2 = g.log_uniform(0.1, 10.0);
    auto V = [&](double y) { return c1 / y + c2 / (y * y); };
    const auto grid = geometric_grid(1.0, 100.0, 200);
    const auto m = fit_majorant(V, grid);
    for (double y : grid) EXPECT_LE(V(y), m.L * std::pow(y, -m.alpha));
  });
}

// ---- continuous-time duals -------------------------------------------------

TEST(BsmProperty, DualValueConvexDecreasing) {
  for_all(10, 41, [](Gen& g, int i) {
    const auto u = (i % 2 == 0) ? UtilitySpec::crra(g.uniform(0.1, 0.8))
                                : UtilitySpec::power_conjugate(g.uniform(0.2, 3.0), g.log_uniform(0.1, 10.0));
    const auto curve = sample_v_bsm(u, geometric_grid(0.1, 10.0, 25));
    EXPECT_TRUE(curve.consistent());
    for (std::size_t k = 1; k < curve.values.size(); ++k) EXPECT_LT(curve.values[k], curve.values[k - 1]);
  });
}

TEST(BsmProperty, PowerDualityRoundtrip) {
  for (double a : {0.5, 1.0, 2.0}) {
    for (double x : {0.5, 1.0, 2.0}) {
      const auto r = conjugate_U([a](double y) { return v_bsm_power(a, 1.0, y); }, x);
      EXPECT_NEAR(r.value / u_bsm_power(a, 1.0, x), 1.0, 1e-6);
      EXPECT_GE(r.value, power_utility(a, 1.0, x));
    }
  }
}

TEST(BsmProperty, QuadratureOrderDoublingIsStable) {
  for (double a : {0.5, 1.0, 2.0}) {
    auto V = [a](double z) { return std::pow(z, -a); };
    for (double y : geometric_grid(0.1, 10.0, 9)) {
      EXPECT_NEAR(v_bsm(V, y, 200, false) / v_bsm(V, y, 400, false), 1.0, 1e-10);
    }
  }
}

// ---- discrete duals --------------------------------------------------------

TEST(DualProperty, TailDecompositionIsExactAndMonotone) {
  for_all(12, 51, [](Gen& g, int) {
    const auto rv = g.finite_rv(3);
    const int n = g.integer(1, 30);
    const double y = g.log_uniform(0.3, 3.0);
    auto V = [](double z) { return 1.0 / (z * z) - 1.0; };
    double prev_pos = 1e300;
    for (double M : {0.5, 1.0, 2.0, 5.0, 1e300}) {
      const auto r = tail_report(rv, n, V, y, M);
      EXPECT_NEAR(r.core_Z + r.tail_pos_Z - r.tail_neg_Z, r.value_vZ, 1e-12 * std::max(1.0, std::abs(r.value_vZ)));
      EXPECT_NEAR(r.core_Zn + r.tail_pos_Zn - r.tail_neg_Zn, r.value_vZn, 1e-12 * std::max(1.0, std::abs(r.value_vZn)));
      EXPECT_LE(r.tail_pos_Z, prev_pos);
      prev_pos = r.tail_pos_Z;
    }
    EXPECT_EQ(prev_pos, 0.0);
  });
}

TEST(DualProperty, DiscreteDualConvexInY) {
  for_all(10, 52, [](Gen& g, int) {
    const auto rv = g.finite_rv(3);
    const int n = g.integer(1, 40);
    const auto u = UtilitySpec::crra(g.uniform(0.1, 0.8));
    const auto ys = geometric_grid(0.2, 5.0, 21);
    std::vector<double> vs;
    for (double y : ys) vs.push_back(v_n_Zn(rv, n, u, y));
    EXPECT_TRUE(convex_on(ys, vs, 1e-12));
  });
}

TEST(DualProperty, RelaxedValueIsHomogeneousForCrra) {
  const auto u = UtilitySpec::crra(1.0 / 3.0);
  for (int n : {1, 4, 16}) {
    const double base = u_n_relaxed(FiniteRV::asymmetric_binomial(), n, u, 1.0).value;
    for (double lam : {0.25, 3.0}) {
      EXPECT_NEAR(u_n_relaxed(FiniteRV::asymmetric_binomial(), n, u, lam).value / (std::cbrt(lam) * base), 1.0, 1e-10);
    }
  }
}

// ---- dynamic programming ---------------------------------------------------

TEST(DpProperty, CompleteMarketEquality) {
  for (double gamma : {0.25, 1.0 / 3.0, 0.5}) {
    const auto u = UtilitySpec::crra(gamma);
    for (const auto& rv : {FiniteRV::symmetric_binomial(), FiniteRV::asymmetric_binomial()}) {
      for (int n : {1, 4, 16}) {
        const double dp = crra_dp(rv, n, gamma).value_at(1.0);
        EXPECT_NEAR(binomial_complete_u(rv, n, u, 1.0) / dp, 1.0, 1e-8) << gamma << " " << n;
      }
    }
  }
}

TEST(DpProperty, CrraPolicyInteriorAndObjectiveConcave) {
  for_all(20, 61, [](Gen& g, int) {
    const auto rv = g.finite_rv(4);
    const int n = g.integer(1, 64);
    const auto r = crra_dp(rv, n, g.uniform(0.1, 0.9));
    const auto box = no_bankruptcy_interval(rv, n);
    EXPECT_GT(r.theta_star, box.lo);
    EXPECT_LT(r.theta_star, box.hi);
    EXPECT_LE(r.max_objective_curvature, 1e-9);
  });
}

TEST(DpProperty, GeneralValueIncreasingAndConcaveInWealth) {
  const auto u = UtilitySpec::power_conjugate(1.0, 1.0);
  const auto r = general_dp(FiniteRV::trinomial(), 4, u);
  const auto xs = geometric_grid(0.05, 20.0, 40);
  std::vector<double> vs;
  for (double x : xs) vs.push_back(-r.value_at(x));
  for (std::size_t i = 1; i < vs.size(); ++i) EXPECT_LT(vs[i], vs[i - 1]);
  EXPECT_TRUE(convex_on(xs, vs, 1e-9));
  EXPECT_LE(r.max_objective_curvature, 1e-9);
}

// ---- counterexample --------------------------------------------------------

TEST(CounterexampleProperty, RatioIndependentOfBeta) {
  const auto rv = FiniteRV::asymmetric_binomial();
  for (int k : {1, 2, 3}) {
    for (int n : {4, 16, 64}) {
      const double base = log_M_lattice(rv, k, n, 0.5, 0.0);
      for (double beta : {1e-3, 1e3}) EXPECT_NEAR(log_M_lattice(rv, k, n, 0.5, std::log(beta)), base, 1e-9);
      EXPECT_NEAR(log_M(rv, k, n, 0.5), base, 1e-9);
    }
  }
}

TEST(CounterexampleProperty, SeriesTermsAreDominatedBySeries) {
  const auto cert = build_certificate(FiniteRV::asymmetric_binomial(), linear_grid(0.1, 1.0, 10), 5);
  const auto v = series_V(cert);
  for (double y : geometric_grid(0.5, 50.0, 40)) {
    const double log_total = v.log_V(y);
    for (const auto& r : cert.records) EXPECT_LE(r.log_beta_k - r.alpha_k * std::log(y), log_total + 1e-12);
  }
}

TEST(CounterexampleProperty, SymmetricObstruction) {
  const auto s = scan_laplace_margin(FiniteRV::symmetric_binomial(), 0.0, 10.0, 1e-3);
  EXPECT_LE(s.max_margin, 0.0);
  EXPECT_EQ(s.argmax, 0.0);
  for (double l = 1e-3; l <= 10.0; l += 0.37) EXPECT_LT(laplace_margin(FiniteRV::symmetric_binomial(), l), 0.0);
}

// ---- density-reciprocal constructions ---------------------------------------

TEST(Prop1bProperty, ReciprocalIdentityOnGrids) {
  for (double y : geometric_grid(1e-4, 1e4, 200)) EXPECT_NEAR(V0(y) * z_density(y), 1.0, 1e-12);
}

TEST(Prop1bProperty, SeriesConvexDecreasingWithMatchingDerivative) {
  const auto ys = geometric_grid(1.0, 10.0, 60);
  std::vector<double> vs;
  for (double y : ys) vs.push_back(biii_v(y));
  for (std::size_t i = 1; i < vs.size(); ++i) EXPECT_LT(vs[i], vs[i - 1]);
  EXPECT_TRUE(convex_on(ys, vs, 0.0));
  for (double y : linear_grid(1.05, 10.0, 30)) {
    const double h = 1e-5;
    const double fd = (biii_v(y + h) - biii_v(y - h)) / (2 * h);
    EXPECT_NEAR(fd, biii_vprime(y), 1e-8);
  }
}

TEST(Prop1bProperty, ShiftCompositionRestoresValues) {
  for_all(20, 71, [](Gen& g, int) {
    const double y0 = g.log_uniform(0.2, 5.0);
    const auto once = shift_V(LogDualFn(log_V0), y0);
    const auto back = shift_V(once, std::exp(-0.5) / y0);
    const double y = g.log_uniform(0.05, 5.0);
    EXPECT_NEAR(back(y), log_V0(y), 1e-12 * std::max(1.0, std::abs(log_V0(y))));
  });
}

TEST(Prop1bProperty, ScanSplitsAtThreshold) {
  const double z0 = default_z0();
  const auto eps = default_epsilons();
  int inconclusive = 0;
  for (double y : linear_grid(0.74, 0.81, 8)) {
    const auto s = divergence_scan(y, z0, eps);
    if (y < 0.77) {
      EXPECT_EQ(s.classification, Divergence::kDiverges) << y;
    } else if (y > 0.79) {
      EXPECT_EQ(s.classification, Divergence::kConverges) << y;
    }
    if (s.classification == Divergence::kInconclusive) ++inconclusive;
    for (std::size_t i = 1; i < s.truncated_integrals.size(); ++i) {
      EXPECT_GE(s.truncated_integrals[i], s.truncated_integrals[i - 1]);
    }
  }
  EXPECT_LE(inconclusive, 2);
}
