#pragma once

#include <vector>

#include "walklab/rv_lattice.hpp"

namespace walklab {

// Esscher pricing kernel of the n-step economy: Z_n(w) = exp(-a_n w - b_n).
struct EsscherParams {
  int n;
  double a;
  double b;
};

// a_n is the root of g(a) = log L((1 - a)/sqrt n) - log L(-a/sqrt n) (the
// one-step martingale condition, which the i.i.d. structure reduces the
// full-horizon equation to); b_n = n log L(-a_n / sqrt n). Bisection to
// |da| <= 1e-13 after expanding the bracket from [-1, 2].
EsscherParams solve_esscher(const FiniteRV& rv, int n);

// The martingale-equation residual g(a) for step size 1/sqrt(n).
double esscher_residual(const FiniteRV& rv, int n, double a);

// Newton refinement of a_n from the bisection root, for cross-checks.
double refine_esscher_newton(const FiniteRV& rv, int n, double a0, int steps = 5);

// Two-term expansion 1/2 + E[zeta^3] / (24 sqrt n).
double asymptotic_a(const FiniteRV& rv, int n);

double Z_n_of(const EsscherParams& p, double w);
double log_Z_n_of(const EsscherParams& p, double w);

// E_{P_n}[Z_n] and E_{P_n}[Z_n e^w] on the lattice (both should be 1).
struct EsscherIdentities {
  double normalization;
  double martingale;
};
EsscherIdentities check_esscher(const EsscherParams& p, const LatticeDistribution& dist);

struct RatioBound {
  // exp(max |log Z_n(w) - log Z(w)|) over the n list and lattice points
  double C;
  // exp(max |a_n - 1/2| K sqrt n + |b_n - 1/8|)
  double envelope;
  // n at which the lattice maximum is attained
  int argmax_n;
};

RatioBound ratio_bound_C(const FiniteRV& rv, const std::vector<int>& n_list,
                         double merge_tol = kDefaultMergeTol);

}  // namespace walklab
