#include "walklab/discrete_duals.hpp"

#include <algorithm>
#include <cmath>

#include "walklab/bsm.hpp"
#include "walklab/errors.hpp"
#include "walklab/numerics.hpp"

namespace walklab {

namespace {

void require_y(double y) {
  if (!(y > 0.0)) throw ValidationError("dual value: y must be positive");
}

}  // namespace

double v_n_Z(const LatticeDistribution& dist, const DualFn& V, double y) {
  require_y(y);
  return lattice_expect(dist, [&](double w) { return V(y * Z_of(w)); });
}

double v_n_Z(const FiniteRV& rv, int n, const DualFn& V, double y) {
  return v_n_Z(terminal_distribution(rv, n), V, y);
}

double v_n_Z(const FiniteRV& rv, int n, const UtilitySpec& v_spec, double y) {
  require_y(y);
  const auto dist = terminal_distribution(rv, n);
  if (const auto pl = v_spec.power_law()) {
    const double lv = lattice_log_expect(dist, [&](double w) {
      return pl->log_coeff - pl->exponent * (std::log(y) + log_Z_of(w));
    });
    return materialize(lv);
  }
  return v_n_Z(dist, [&](double z) { return v_spec.V(z); }, y);
}

double v_n_Zn(const LatticeDistribution& dist, const EsscherParams& p, const DualFn& V,
              double y) {
  require_y(y);
  return lattice_expect(dist, [&](double w) { return V(y * Z_n_of(p, w)); });
}

double v_n_Zn(const FiniteRV& rv, int n, const DualFn& V, double y) {
  return v_n_Zn(terminal_distribution(rv, n), solve_esscher(rv, n), V, y);
}

double log_v_n_Zn_power(const LatticeDistribution& dist, const EsscherParams& p, double alpha,
                        double log_beta, double y) {
  require_y(y);
  const double ly = std::log(y);
  return lattice_log_expect(dist,
                            [&](double w) { return log_beta - alpha * (ly + log_Z_n_of(p, w)); });
}

double log_v_n_Zn_power_closed(const FiniteRV& rv, const EsscherParams& p, double alpha,
                               double log_beta, double y) {
  require_y(y);
  const double h = 1.0 / std::sqrt(static_cast<double>(p.n));
  return log_beta - alpha * std::log(y) + alpha * p.b + p.n * log_laplace(rv, p.a * alpha * h);
}

double v_n_Zn(const FiniteRV& rv, int n, const UtilitySpec& v_spec, double y) {
  require_y(y);
  const auto dist = terminal_distribution(rv, n);
  const auto p = solve_esscher(rv, n);
  if (const auto pl = v_spec.power_law()) {
    return materialize(log_v_n_Zn_power(dist, p, pl->exponent, pl->log_coeff, y));
  }
  return v_n_Zn(dist, p, [&](double z) { return v_spec.V(z); }, y);
}

RelaxedValue u_n_relaxed(const FiniteRV& rv, int n, const UtilitySpec& v_spec, double x,
                         double y_guess) {
  if (!(x > 0.0)) throw ValidationError("u_n_relaxed: x must be positive");
  const auto dist = terminal_distribution(rv, n);
  const auto p = solve_esscher(rv, n);
  DualFn vn;
  if (const auto pl = v_spec.power_law()) {
    vn = [&, pl](double y) {
      return materialize(log_v_n_Zn_power(dist, p, pl->exponent, pl->log_coeff, y));
    };
  } else {
    vn = [&](double y) { return v_n_Zn(dist, p, [&](double z) { return v_spec.V(z); }, y); };
  }
  const auto r = conjugate_U(vn, x, y_guess);
  return {r.value, r.argmin_y};
}

MgfPair mgf_convergence(const FiniteRV& rv, double gamma, int n) {
  if (n < 1) throw ValidationError("mgf_convergence: n must be >= 1");
  const double ld = n * log_laplace(rv, gamma / std::sqrt(static_cast<double>(n)));
  const double ll = log_gaussian_laplace(gamma);
  return {materialize(ld), materialize(ll), ld, ll};
}

DualEvalReport tail_report(const FiniteRV& rv, int n, const DualFn& V, double y, double M) {
  require_y(y);
  if (!(M > 0.0)) throw ValidationError("tail_report: M must be positive");
  const auto dist = terminal_distribution(rv, n);
  const auto p = solve_esscher(rv, n);
  DualEvalReport r{n, y, M, 0, 0, 0, 0, 0, 0, 0, 0};
  auto accumulate = [&](double prob, double v, double& value, double& neg, double& pos,
                        double& core) {
    if (!std::isfinite(v)) throw NumericError("tail_report: V not finite on the lattice");
    value += prob * v;
    if (v < -M) {
      neg += prob * std::abs(v);
    } else if (v > M) {
      pos += prob * v;
    } else {
      core += prob * v;
    }
  };
  for (const auto& pt : dist.points()) {
    accumulate(pt.prob, V(y * Z_of(pt.w)), r.value_vZ, r.tail_neg_Z, r.tail_pos_Z, r.core_Z);
    accumulate(pt.prob, V(y * Z_n_of(p, pt.w)), r.value_vZn, r.tail_neg_Zn, r.tail_pos_Zn,
               r.core_Zn);
  }
  return r;
}

TailSweep tail_sweep(const FiniteRV& rv, const std::vector<int>& n_grid, const DualFn& V,
                     double y, double M) {
  TailSweep s{{}, 0, 0, 0, 0};
  for (int n : n_grid) {
    auto r = tail_report(rv, n, V, y, M);
    s.sup_tail_pos_Z = std::max(s.sup_tail_pos_Z, r.tail_pos_Z);
    s.sup_tail_pos_Zn = std::max(s.sup_tail_pos_Zn, r.tail_pos_Zn);
    s.sup_tail_neg_Z = std::max(s.sup_tail_neg_Z, r.tail_neg_Z);
    s.sup_tail_neg_Zn = std::max(s.sup_tail_neg_Zn, r.tail_neg_Zn);
    s.reports.push_back(r);
  }
  return s;
}

std::vector<DualCurveRow> dual_curve(const FiniteRV& rv, const std::vector<int>& n_list,
                                     const UtilitySpec& v_spec, const std::vector<double>& ys,
                                     double merge_tol) {
  std::vector<DualCurveRow> rows;
  const auto pl = v_spec.power_law();
  for (int n : n_list) {
    const auto dist = terminal_distribution(rv, n, merge_tol);
    const auto p = solve_esscher(rv, n);
    for (double y : ys) {
      DualCurveRow row{n, y, 0, 0, 0, 0, 0};
      if (pl) {
        row.v_n_Z = materialize(lattice_log_expect(dist, [&](double w) {
          return pl->log_coeff - pl->exponent * (std::log(y) + log_Z_of(w));
        }));
        row.v_n_Zn = materialize(log_v_n_Zn_power(dist, p, pl->exponent, pl->log_coeff, y));
      } else {
        auto V = [&](double z) { return v_spec.V(z); };
        row.v_n_Z = v_n_Z(dist, V, y);
        row.v_n_Zn = v_n_Zn(dist, p, V, y);
      }
      row.v_bsm = v_bsm(v_spec, y);
      row.gap_Z = std::abs(row.v_n_Z - row.v_bsm);
      row.gap_Zn = std::abs(row.v_n_Zn - row.v_n_Z);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace walklab
