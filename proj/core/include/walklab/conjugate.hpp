#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace walklab {

// U(x) = x^gamma / gamma, gamma in (0, 1).
struct Crra {
  double gamma;
};

// V(y) = beta * y^(-alpha).
struct PowerConjugate {
  double alpha;
  double beta;
};

struct SeriesTerm {
  double alpha;
  double log_beta;
};

// V(y) = sum_k beta_k * y^(-alpha_k), alpha_k strictly increasing.
struct SeriesConjugate {
  std::vector<SeriesTerm> terms;
};

// V = reciprocal of the density of the lognormal kernel on (0, z0], continued
// beyond z0 by a C2 hyperbola tail c + d / (y + s).
struct Prop1bV0 {
  double z0;
};

// U tabulated on a geometric x-grid, interpolated by a monotone cubic in log x.
struct NumericU {
  std::vector<double> x;
  std::vector<double> u;
};

// y^(-exponent) * exp(log_coeff): the shape shared by Crra and PowerConjugate
// duals, used for closed-form and log-space fast paths.
struct PowerLaw {
  double log_coeff;
  double exponent;
};

// A utility together with its conjugate. Closed forms are used where the
// family has them; the other side is obtained by monotone root finding.
//
// All evaluators include the constant shift requested through shifted():
// U_c = U - c and V_c = V - c.
class UtilitySpec {
 public:
  using Family = std::variant<Crra, PowerConjugate, SeriesConjugate, Prop1bV0, NumericU>;

  static UtilitySpec crra(double gamma);
  static UtilitySpec power_conjugate(double alpha, double beta);
  static UtilitySpec series_conjugate(std::vector<SeriesTerm> terms);
  static UtilitySpec prop1b_v0(double z0);
  static UtilitySpec numeric_u(std::vector<double> x, std::vector<double> u);
  // Tabulates u on a geometric grid of `points` nodes spanning [x_lo, x_hi].
  static UtilitySpec tabulate(const std::function<double(double)>& u, double x_lo,
                              double x_hi, std::size_t points);

  const Family& family() const { return family_; }
  std::string family_name() const;

  UtilitySpec shifted(double c) const;
  double shift() const { return shift_; }

  double U(double x) const;
  double dU(double x) const;
  // I = (U')^{-1}.
  double I(double y) const;
  double V(double y) const;
  // V'(y) = -I(y).
  double dV(double y) const;
  // log V(y); requires V(y) > 0.
  double log_V(double y) const;

  // Set when V (after shift) is exactly a power law.
  std::optional<PowerLaw> power_law() const;

  // Family-specific parts of the Prop1bV0 tail, exposed for tests.
  struct HyperbolaTail {
    double c;
    double d;
    double s;
  };
  std::optional<HyperbolaTail> prop1b_tail() const;

 private:
  UtilitySpec(Family f, double shift);
  bool defined_by_v() const;
  double raw_U(double x) const;
  double raw_dU(double x) const;
  double raw_V(double y) const;
  double raw_dV(double y) const;

  Family family_;
  double shift_ = 0.0;
  std::optional<HyperbolaTail> tail_;
  std::vector<double> pchip_slopes_;  // NumericU: dU/dlog x at nodes
};

// Series evaluation in log space: terms in increasing alpha, stopping once a
// term falls 40 nats below the running sum for y >= 1.
struct SeriesEval {
  double log_value;
  std::size_t terms_used;
};
SeriesEval evaluate_series(const SeriesConjugate& s, double y);

// V(y) = sup_x [U(x) - x y].
double conjugate_V(const UtilitySpec& u, double y);

struct ConjugateResult {
  double value;
  double argmin_y;
};

// U(x) = inf_{y > 0} [V(y) + x y] by golden-section in log y. The bracket is
// found by doubling outward from y_guess; more than 1000 doublings raise
// UnboundedError.
ConjugateResult conjugate_U(const std::function<double(double)>& V, double x,
                            double y_guess = 1.0);
ConjugateResult conjugate_U(const UtilitySpec& v_spec, double x, double y_guess = 1.0);

// Closed form of the utility conjugate to beta * y^(-alpha).
double power_utility(double alpha, double beta, double x);

struct ElasticityEstimate {
  // sup of x U'(x) / U(x) over the top decade of the grid
  double running_sup;
  // (x, x U'(x) / U(x)) for every grid point in the top decade
  std::vector<std::pair<double, double>> tail_values;
};

// Estimate of the asymptotic elasticity limsup; not the limsup itself.
// Throws ValidationError if U <= 0 anywhere on the grid.
ElasticityEstimate asymptotic_elasticity(const UtilitySpec& u, const std::vector<double>& x_grid);

// V(y) <= L * y^(-alpha) on [y_lo, y_hi].
struct MajorantBound {
  double L;
  double alpha;
  double y_lo;
  double y_hi;
};

// Least-squares fit of log V against log y, then L raised so the bound holds
// at every grid point. Throws ValidationError if V <= 0 on the grid.
MajorantBound fit_majorant(const std::function<double(double)>& V,
                           const std::vector<double>& y_grid);

}  // namespace walklab
