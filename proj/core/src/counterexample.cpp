#include "walklab/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "walklab/bsm.hpp"
#include "walklab/discrete_duals.hpp"
#include "walklab/errors.hpp"
#include "walklab/esscher.hpp"
#include "walklab/numerics.hpp"

namespace walklab {

namespace {
std::string format_lambda(double l) {
  std::ostringstream os;
  os << l;
  return os.str();
}
}  // namespace

double laplace_margin(const FiniteRV& rv, double lambda) {
  return log_laplace(rv, lambda) - 0.5 * lambda * lambda;
}

std::vector<double> accepted_lambdas(const FiniteRV& rv, const std::vector<double>& lambda_grid) {
  std::vector<double> out;
  for (double l : lambda_grid) {
    if (l > 0.0 && laplace_margin(rv, l) > kMinLambdaMargin) out.push_back(l);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double find_lambda0(const FiniteRV& rv, const std::vector<double>& lambda_grid) {
  const auto ok = accepted_lambdas(rv, lambda_grid);
  if (ok.empty()) {
    std::ostringstream os;
    os << "find_lambda0: no lambda on the grid has log L(lambda) - lambda^2/2 > "
       << kMinLambdaMargin << " (third moment " << moments(rv).third << ")";
    throw NoMarginError(os.str());
  }
  return ok.front();
}

double log_M(const FiniteRV& rv, int k, int n, double lambda0) {
  if (k < 1 || n < 1) throw ValidationError("log_M: k and n must be >= 1");
  const auto p = solve_esscher(rv, n);
  const double rn = std::sqrt(static_cast<double>(n));
  return rn * (-4.0 * lambda0 * std::log(static_cast<double>(k)) + 2.0 * lambda0 * (p.b - 0.125)) +
         n * (log_laplace(rv, 2.0 * p.a * lambda0) - 0.5 * lambda0 * lambda0);
}

double log2_M(const FiniteRV& rv, int k, int n, double lambda0) {
  return log_M(rv, k, n, lambda0) / kLn2;
}

double log_M_lattice(const FiniteRV& rv, int k, int n, double lambda0, double log_beta,
                     double merge_tol) {
  const auto p = solve_esscher(rv, n);
  const auto dist = terminal_distribution(rv, n, merge_tol);
  const double alpha = 2.0 * lambda0 * std::sqrt(static_cast<double>(n));
  const double kk = static_cast<double>(k);
  const double log_vn = log_v_n_Zn_power(dist, p, alpha, log_beta, kk);
  const double log_v = log_beta + log_phi(alpha) + alpha * std::log(kk);
  return log_vn - log_v;
}

CounterexampleCertificate find_nk(const FiniteRV& rv, double lambda0, int k_max, int n_max) {
  if (k_max < 1) throw ValidationError("find_nk: k_max must be >= 1");
  if (!(lambda0 > 0.0)) throw ValidationError("find_nk: lambda0 must be positive");
  CounterexampleCertificate cert{};
  cert.lambda0 = lambda0;
  cert.lambda0_smallest = lambda0;
  cert.ratio_strictly_increasing = true;
  long long prev = 0;
  for (int k = 1; k <= k_max; ++k) {
    long long lower = k;
    if (k > 1) lower = std::max<long long>(k, (prev * k + (k - 2)) / (k - 1));
    double best = -std::numeric_limits<double>::infinity();
    long long best_n = lower;
    long long found = -1;
    double found_log2 = 0.0;
    for (long long n = lower; n <= n_max; n *= 2) {
      const double l2 = log2_M(rv, k, static_cast<int>(n), lambda0);
      if (l2 - 2.0 * k > best) {
        best = l2 - 2.0 * k;
        best_n = n;
      }
      if (l2 >= 2.0 * k) {
        found = n;
        found_log2 = l2;
        break;
      }
    }
    if (found < 0) {
      std::ostringstream os;
      os << "find_nk: no n <= " << n_max << " gives log2 M >= " << 2 * k << " at k=" << k
         << " (lambda0=" << lambda0 << "); best margin " << best << " at n=" << best_n;
      throw SearchError(os.str());
    }
    if (k > 1 && static_cast<double>(found) / k <= static_cast<double>(prev) / (k - 1)) {
      cert.ratio_strictly_increasing = false;
    }
    CounterexampleRecord r{};
    r.k = k;
    r.n_k = static_cast<int>(found);
    r.alpha_k = 2.0 * lambda0 * std::sqrt(static_cast<double>(found));
    r.log_beta_k = -k * kLn2 - log_v_bsm_power(r.alpha_k, 1.0, 1.0 / k);
    r.log2_M = found_log2;
    r.y_k = std::sqrt(static_cast<double>(k));
    const auto p = solve_esscher(rv, r.n_k);
    r.log_x_k = std::log(r.alpha_k / r.y_k) +
                log_v_n_Zn_power_closed(rv, p, r.alpha_k, r.log_beta_k, r.y_k);
    cert.records.push_back(r);
    prev = found;
  }
  return cert;
}

CounterexampleCertificate build_certificate(const FiniteRV& rv,
                                            const std::vector<double>& lambda_grid, int k_max,
                                            int n_max) {
  const double smallest = find_lambda0(rv, lambda_grid);
  std::string last;
  for (double l : accepted_lambdas(rv, lambda_grid)) {
    try {
      auto cert = find_nk(rv, l, k_max, n_max);
      if (!log_x_strictly_increasing(cert)) {
        last = "lambda0=" + format_lambda(l) + ": log x_k not strictly increasing";
        continue;
      }
      cert.lambda0_smallest = smallest;
      return cert;
    } catch (const SearchError& e) {
      last = e.what();
    }
  }
  throw SearchError("build_certificate: no accepted lambda completes the schedule; last: " + last);
}

bool log_x_strictly_increasing(const CounterexampleCertificate& cert) {
  for (std::size_t i = 1; i < cert.records.size(); ++i) {
    if (!(cert.records[i].log_x_k > cert.records[i - 1].log_x_k)) return false;
  }
  return true;
}

UtilitySpec series_V(const CounterexampleCertificate& cert) {
  std::vector<SeriesTerm> terms;
  terms.reserve(cert.records.size());
  for (const auto& r : cert.records) terms.push_back({r.alpha_k, r.log_beta_k});
  return UtilitySpec::series_conjugate(std::move(terms));
}

double log_series_v_bsm(const CounterexampleCertificate& cert, double y) {
  LogSumAccumulator acc;
  for (const auto& r : cert.records) acc.add(r.log_beta_k + log_phi(r.alpha_k) - r.alpha_k * std::log(y));
  return acc.value();
}

std::vector<GrowthRow> growth_certificate(const FiniteRV& rv,
                                          const CounterexampleCertificate& cert, double x_probe) {
  std::vector<GrowthRow> rows;
  const double log_probe = std::log(x_probe);
  for (const auto& r : cert.records) {
    const auto p = solve_esscher(rv, r.n_k);
    const double a = r.alpha_k;
    // The discrete dual is B y^-a; its conjugate utility is a power law in x.
    const double log_B = log_v_n_Zn_power_closed(rv, p, a, r.log_beta_k, 1.0);
    const double log_x = std::log(a / r.y_k) + log_B - a * std::log(r.y_k);
    const double log_u = std::log1p(a) - (a / (1.0 + a)) * std::log(a) + log_B / (1.0 + a) +
                         (a / (1.0 + a)) * log_x;
    GrowthRow g{};
    g.k = r.k;
    g.y_k = r.y_k;
    g.log_x_k = log_x;
    g.slope_lower_bound = (1.0 + a) / a * r.y_k;
    g.exact_ratio_at_x_k = std::exp(log_u - log_x);
    g.probe_covered = log_probe <= log_x;
    g.bound_at_probe = g.probe_covered ? g.slope_lower_bound * x_probe
                                       : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(g);
  }
  return rows;
}

MarginScan scan_laplace_margin(const FiniteRV& rv, double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw ValidationError("scan_laplace_margin: bad grid");
  MarginScan s{-std::numeric_limits<double>::infinity(), lo};
  const auto count = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
  for (long long i = 0; i <= count; ++i) {
    const double l = lo + step * static_cast<double>(i);
    const double m = laplace_margin(rv, l);
    if (m > s.max_margin) s = {m, l};
  }
  return s;
}

}  // namespace walklab
