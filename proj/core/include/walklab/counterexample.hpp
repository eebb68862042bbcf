#pragma once

#include <string>
#include <vector>

#include "walklab/conjugate.hpp"
#include "walklab/rv_lattice.hpp"

namespace walklab {

// log L(lambda) - lambda^2 / 2: how far the innovation's Laplace transform
// sits above the Gaussian one.
double laplace_margin(const FiniteRV& rv, double lambda);

inline constexpr double kMinLambdaMargin = 1e-6;

// Smallest grid value with laplace_margin > 1e-6. Throws NoMarginError if
// there is none.
double find_lambda0(const FiniteRV& rv, const std::vector<double>& lambda_grid);

// Every grid value with laplace_margin > 1e-6, ascending.
std::vector<double> accepted_lambdas(const FiniteRV& rv, const std::vector<double>& lambda_grid);

// M(k, n) = v^n_{alpha,beta}(k) / v_{alpha,beta}(1/k) with alpha = 2 lambda0 sqrt n,
// from the closed form:
//   ln M = sqrt n [-4 lambda0 ln k + 2 lambda0 (b_n - 1/8)]
//        + n [ln L(2 a_n lambda0) - lambda0^2 / 2].
double log_M(const FiniteRV& rv, int k, int n, double lambda0);
double log2_M(const FiniteRV& rv, int k, int n, double lambda0);

// The same ratio from the lattice sum of the discrete dual and the closed
// BSM dual. beta cancels; it is a parameter so the cancellation can be tested.
double log_M_lattice(const FiniteRV& rv, int k, int n, double lambda0, double log_beta = 0.0,
                     double merge_tol = kDefaultMergeTol);

struct CounterexampleRecord {
  int k;
  int n_k;
  double alpha_k;
  double log_beta_k;
  double log2_M;
  double log_x_k;
  double y_k;
};

struct CounterexampleCertificate {
  std::string rv_id;
  double lambda0;
  // Smallest accepted grid value; differs from lambda0 when the n search had
  // to move to a larger lambda.
  double lambda0_smallest;
  std::vector<CounterexampleRecord> records;
  // n_k / k is always nondecreasing; this flags whether it is strictly so.
  bool ratio_strictly_increasing;
};

inline constexpr int kMaxScheduleN = 1 << 20;

// For k = 1..k_max: the first n in the doubling schedule starting at
// max(k, ceil(n_{k-1} k / (k - 1))) with log2 M >= 2k. Fills alpha_k, log beta_k
// (normalized so the BSM dual of the k-th term at 1/k is 2^-k) and log x_k.
// Throws SearchError when n would exceed 2^20.
CounterexampleCertificate find_nk(const FiniteRV& rv, double lambda0, int k_max,
                                  int n_max = kMaxScheduleN);

// find_nk over the accepted lambdas in ascending order; the first whose
// certificate completes the schedule with log x_k strictly increasing is used.
CounterexampleCertificate build_certificate(const FiniteRV& rv,
                                            const std::vector<double>& lambda_grid, int k_max,
                                            int n_max = kMaxScheduleN);

bool log_x_strictly_increasing(const CounterexampleCertificate& cert);

// V(y) = sum_k beta_k y^(-alpha_k) over the certificate terms.
UtilitySpec series_V(const CounterexampleCertificate& cert);

// log of the BSM dual of the series at y: sum_k beta_k phi(alpha_k) y^(-alpha_k).
double log_series_v_bsm(const CounterexampleCertificate& cert, double y);

struct GrowthRow {
  int k;
  double y_k;
  double log_x_k;
  // ((1 + alpha_k) / alpha_k) sqrt k: u^{n_k}(x) >= slope * x for x <= x_k.
  double slope_lower_bound;
  // u^{n_k}(x_k) / x_k from the power conjugate of the discrete dual.
  double exact_ratio_at_x_k;
  bool probe_covered;
  // slope_lower_bound * x_probe when x_probe <= x_k.
  double bound_at_probe;
};

std::vector<GrowthRow> growth_certificate(const FiniteRV& rv,
                                          const CounterexampleCertificate& cert,
                                          double x_probe = 1.0);

struct MarginScan {
  double max_margin;
  double argmax;
};

// max of laplace_margin on [lo, hi] sampled with the given step.
MarginScan scan_laplace_margin(const FiniteRV& rv, double lo = 0.0, double hi = 10.0,
                               double step = 1e-3);

}  // namespace walklab
