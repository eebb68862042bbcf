#pragma once

#include <functional>
#include <string>
#include <vector>

#include "walklab/conjugate.hpp"
#include "walklab/numerics.hpp"
#include "walklab/rv_lattice.hpp"

namespace walklab {

// Fraction theta of wealth held in the stock over one step keeps wealth
// positive iff 1 + theta (e^{v / sqrt n} - 1) > 0 for every atom v.
Interval no_bankruptcy_interval(const FiniteRV& rv, int n);

struct WealthGridSpec {
  // Grid spans [x * 10^-decades, x * 10^decades] around the anchor x.
  double anchor = 1.0;
  double decades = 4.0;
  // Odd so the anchor is a node.
  std::size_t points = 2049;
};

struct DPResult {
  int n;
  std::string family;
  // Value u_n(x); for the factorized CRRA solution this is exact for every x.
  std::function<double(double)> value_at;
  // CRRA: a single fraction used at every step and wealth level.
  double theta_star;
  // General U: theta per step (outer) and wealth node (inner).
  std::vector<std::vector<double>> theta_policy;
  std::vector<double> wealth_grid;
  // Diagnostics: max second difference of the per-step objective at the
  // optimizer (should be <= 0), and probability mass that left the wealth grid
  // along the optimal policy started at the anchor.
  double max_objective_curvature;
  double mass_outside_grid;
  bool boundary_warning;
};

// Factorized CRRA solution: u_n(x) = (x^gamma / gamma) (m*)^n with
// m* = max_theta E[(1 + theta (e^{zeta / sqrt n} - 1))^gamma].
DPResult crra_dp(const FiniteRV& rv, int n, double gamma);

// Per-step CRRA objective E[(1 + theta R)^gamma], exposed for checks.
double crra_step_objective(const FiniteRV& rv, int n, double gamma, double theta);

// Backward induction on a logarithmic wealth grid. Throws NumericError if more
// than 0.1% of the probability mass leaves the grid.
DPResult general_dp(const FiniteRV& rv, int n, const UtilitySpec& u,
                    const WealthGridSpec& grid = {});

// Complete-market value by duality for 2-atom innovations: finds the
// multiplier y with E[Z_n I(y Z_n)] = x and returns E[U(I(y Z_n))].
// Throws ValidationError for 3 or more atoms.
double binomial_complete_u(const FiniteRV& rv, int n, const UtilitySpec& u, double x);

struct RelaxationCheck {
  double u_dp;
  double u_relaxed;
  double theta_star;
  bool ok;
};

// u_n(x) <= u_n^{Z_n}(x): the synthesizable optimum never beats the relaxed
// complete-market optimum.
RelaxationCheck verify_relaxation(const FiniteRV& rv, int n, const UtilitySpec& u, double x);

}  // namespace walklab
