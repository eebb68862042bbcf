#pragma once

#include <functional>
#include <vector>

#include "walklab/conjugate.hpp"
#include "walklab/esscher.hpp"
#include "walklab/rv_lattice.hpp"

namespace walklab {

using DualFn = std::function<double(double)>;

// v_n^Z(y) = E_{P_n}[V(y Z)] on the exact lattice of omega(1).
double v_n_Z(const LatticeDistribution& dist, const DualFn& V, double y);
double v_n_Z(const FiniteRV& rv, int n, const DualFn& V, double y);
// Power-law conjugates run in log space.
double v_n_Z(const FiniteRV& rv, int n, const UtilitySpec& v_spec, double y);

// v_n^{Z_n}(y) = E_{P_n}[V(y Z_n)] with the Esscher kernel of (rv, n).
double v_n_Zn(const LatticeDistribution& dist, const EsscherParams& p, const DualFn& V, double y);
double v_n_Zn(const FiniteRV& rv, int n, const DualFn& V, double y);
double v_n_Zn(const FiniteRV& rv, int n, const UtilitySpec& v_spec, double y);

// log of E_{P_n}[beta (y Z_n)^(-alpha)], summed on the lattice.
double log_v_n_Zn_power(const LatticeDistribution& dist, const EsscherParams& p, double alpha,
                        double log_beta, double y);

// Closed form of the same quantity: log beta - alpha log y + alpha b_n
// + n log L(a_n alpha / sqrt n).
double log_v_n_Zn_power_closed(const FiniteRV& rv, const EsscherParams& p, double alpha,
                               double log_beta, double y);

struct RelaxedValue {
  double value;
  double argmin_y;
};

// u_n^{Z_n}(x) = inf_y [v_n^{Z_n}(y) + x y]: the complete-market value under
// the Esscher prices. The y search may be warm-started.
RelaxedValue u_n_relaxed(const FiniteRV& rv, int n, const UtilitySpec& v_spec, double x,
                         double y_guess = 1.0);

// (L(gamma / sqrt n)^n, exp(gamma^2 / 2)), computed in log space.
struct MgfPair {
  double discrete;
  double limit;
  double log_discrete;
  double log_limit;
};
MgfPair mgf_convergence(const FiniteRV& rv, double gamma, int n);

struct DualEvalReport {
  int n;
  double y;
  double M;
  double value_vZ;
  double value_vZn;
  // E[|V| 1{V < -M}] and E[V 1{V > M}] under each kernel.
  double tail_neg_Z;
  double tail_pos_Z;
  double tail_neg_Zn;
  double tail_pos_Zn;
  // E[V 1{|V| <= M}] under each kernel.
  double core_Z;
  double core_Zn;
};

DualEvalReport tail_report(const FiniteRV& rv, int n, const DualFn& V, double y, double M);

// Sup of the positive/negative tails over an n grid.
struct TailSweep {
  std::vector<DualEvalReport> reports;
  double sup_tail_pos_Z;
  double sup_tail_pos_Zn;
  double sup_tail_neg_Z;
  double sup_tail_neg_Zn;
};
TailSweep tail_sweep(const FiniteRV& rv, const std::vector<int>& n_grid, const DualFn& V,
                     double y, double M);

// One row of the dual convergence table.
struct DualCurveRow {
  int n;
  double y;
  double v_n_Z;
  double v_n_Zn;
  double v_bsm;
  double gap_Z;   // |v_n_Z - v_bsm|
  double gap_Zn;  // |v_n_Zn - v_n_Z|
};
std::vector<DualCurveRow> dual_curve(const FiniteRV& rv, const std::vector<int>& n_list,
                                     const UtilitySpec& v_spec, const std::vector<double>& ys,
                                     double merge_tol = kDefaultMergeTol);

}  // namespace walklab
