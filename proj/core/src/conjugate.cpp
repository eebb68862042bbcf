#include "walklab/conjugate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "walklab/errors.hpp"
#include "walklab/numerics.hpp"
#include "walklab/prop1b.hpp"

namespace walklab {

namespace {

constexpr double kRootTol = 1e-12;     // relative, in x (log-space width)
constexpr double kGoldenTol = 1e-10;   // in log y
constexpr double kSeriesCutoffNats = 40.0;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ValidationError(std::string(what) + " must be a positive finite number");
  }
}

// Solves decreasing g(t) = target on t = log argument. g must be strictly
// decreasing in t.
double solve_decreasing_log(const std::function<double(double)>& g, double target,
                            double t_guess) {
  auto h = [&](double t) { return g(t) - target; };
  const Interval br = expand_sign_bracket(h, t_guess - 1.0, t_guess + 1.0, 60);
  return bisect(h, br.lo, br.hi, kRootTol);
}

// Fritsch-Carlson slopes for a monotone cubic Hermite interpolant.
std::vector<double> pchip_slopes(const std::vector<double>& t, const std::vector<double>& u) {
  const std::size_t n = t.size();
  std::vector<double> delta(n - 1), m(n);
  for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (u[i + 1] - u[i]) / (t[i + 1] - t[i]);
  m[0] = delta[0];
  m[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      m[i] = 0.0;
    } else {
      const double h0 = t[i] - t[i - 1];
      const double h1 = t[i + 1] - t[i];
      const double w1 = 2.0 * h1 + h0;
      const double w2 = h1 + 2.0 * h0;
      m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  return m;
}

}  // namespace

UtilitySpec::UtilitySpec(Family f, double shift) : family_(std::move(f)), shift_(shift) {
  if (const auto* p = std::get_if<Prop1bV0>(&family_)) {
    const double z0 = p->z0;
    const double v = V0(z0);
    const double dv = dV0(z0);
    const double d2v = d2V0(z0);
    if (!(dv < 0.0 && d2v > 0.0)) {
      throw ValidationError("prop1b_v0: V0 must be decreasing and convex at z0");
    }
    const double r = 2.0 * (-dv) / d2v;  // z0 + s
    HyperbolaTail tail{};
    tail.s = r - z0;
    tail.d = -dv * r * r;
    tail.c = v - tail.d / r;
    tail_ = tail;
  }
  if (const auto* nu = std::get_if<NumericU>(&family_)) {
    std::vector<double> t(nu->x.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::log(nu->x[i]);
    pchip_slopes_ = pchip_slopes(t, nu->u);
  }
}

UtilitySpec UtilitySpec::crra(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("crra: gamma must lie in (0, 1)");
  return UtilitySpec(Crra{gamma}, 0.0);
}

UtilitySpec UtilitySpec::power_conjugate(double alpha, double beta) {
  require_positive(alpha, "power_conjugate alpha");
  require_positive(beta, "power_conjugate beta");
  return UtilitySpec(PowerConjugate{alpha, beta}, 0.0);
}

UtilitySpec UtilitySpec::series_conjugate(std::vector<SeriesTerm> terms) {
  if (terms.empty()) throw ValidationError("series_conjugate: no terms");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    require_positive(terms[i].alpha, "series_conjugate alpha");
    if (!std::isfinite(terms[i].log_beta)) {
      throw ValidationError("series_conjugate: log_beta must be finite");
    }
    if (i > 0 && !(terms[i].alpha > terms[i - 1].alpha)) {
      throw ValidationError("series_conjugate: alpha_k must be strictly increasing");
    }
  }
  return UtilitySpec(SeriesConjugate{std::move(terms)}, 0.0);
}

UtilitySpec UtilitySpec::prop1b_v0(double z0) {
  require_positive(z0, "prop1b_v0 z0");
  if (!(std::log(z0) < -0.375)) {
    throw ValidationError("prop1b_v0: z0 must lie below the stationary point of V0");
  }
  return UtilitySpec(Prop1bV0{z0}, 0.0);
}

UtilitySpec UtilitySpec::numeric_u(std::vector<double> x, std::vector<double> u) {
  if (x.size() < 3 || x.size() != u.size()) {
    throw ValidationError("numeric_u: need >= 3 matching (x, U) samples");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    require_positive(x[i], "numeric_u x");
    if (!std::isfinite(u[i])) throw ValidationError("numeric_u: non-finite U sample");
    if (i > 0 && !(x[i] > x[i - 1] && u[i] > u[i - 1])) {
      throw ValidationError("numeric_u: x and U must be strictly increasing");
    }
  }
  return UtilitySpec(NumericU{std::move(x), std::move(u)}, 0.0);
}

UtilitySpec UtilitySpec::tabulate(const std::function<double(double)>& u, double x_lo,
                                  double x_hi, std::size_t points) {
  auto xs = geometric_grid(x_lo, x_hi, points);
  std::vector<double> us(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) us[i] = u(xs[i]);
  return numeric_u(std::move(xs), std::move(us));
}

std::string UtilitySpec::family_name() const {
  return std::visit(Overloaded{
                        [](const Crra&) { return std::string("crra"); },
                        [](const PowerConjugate&) { return std::string("power_conjugate"); },
                        [](const SeriesConjugate&) { return std::string("series_conjugate"); },
                        [](const Prop1bV0&) { return std::string("prop1b_v0"); },
                        [](const NumericU&) { return std::string("numeric_u"); },
                    },
                    family_);
}

UtilitySpec UtilitySpec::shifted(double c) const {
  UtilitySpec out = *this;
  out.shift_ += c;
  return out;
}

bool UtilitySpec::defined_by_v() const {
  return std::holds_alternative<PowerConjugate>(family_) ||
         std::holds_alternative<SeriesConjugate>(family_) ||
         std::holds_alternative<Prop1bV0>(family_);
}

std::optional<PowerLaw> UtilitySpec::power_law() const {
  if (shift_ != 0.0) return std::nullopt;
  if (const auto* c = std::get_if<Crra>(&family_)) {
    const double g = c->gamma;
    return PowerLaw{std::log((1.0 - g) / g), g / (1.0 - g)};
  }
  if (const auto* p = std::get_if<PowerConjugate>(&family_)) {
    return PowerLaw{std::log(p->beta), p->alpha};
  }
  return std::nullopt;
}

std::optional<UtilitySpec::HyperbolaTail> UtilitySpec::prop1b_tail() const { return tail_; }

SeriesEval evaluate_series(const SeriesConjugate& s, double y) {
  const double ly = std::log(y);
  LogSumAccumulator acc;
  std::size_t used = 0;
  for (const auto& t : s.terms) {
    const double lt = t.log_beta - t.alpha * ly;
    if (y >= 1.0 && !acc.empty() && lt < acc.value() - kSeriesCutoffNats) break;
    acc.add(lt);
    ++used;
  }
  return {acc.value(), used};
}

double UtilitySpec::raw_V(double y) const {
  return std::visit(
      Overloaded{
          [&](const Crra& c) {
            const double g = c.gamma;
            return ((1.0 - g) / g) * std::pow(y, -g / (1.0 - g));
          },
          [&](const PowerConjugate& p) { return p.beta * std::pow(y, -p.alpha); },
          [&](const SeriesConjugate& s) { return materialize(evaluate_series(s, y).log_value); },
          [&](const Prop1bV0& p) {
            if (y <= p.z0) return V0(y);
            return tail_->c + tail_->d / (y + tail_->s);
          },
          [&](const NumericU&) {
            const double x = I(y);
            return raw_U(x) - x * y;
          },
      },
      family_);
}

double UtilitySpec::raw_dV(double y) const {
  return std::visit(
      Overloaded{
          [&](const Crra& c) { return -std::pow(y, -1.0 / (1.0 - c.gamma)); },
          [&](const PowerConjugate& p) { return -p.alpha * p.beta * std::pow(y, -p.alpha - 1.0); },
          [&](const SeriesConjugate& s) {
            LogSumAccumulator acc;
            const double ly = std::log(y);
            for (const auto& t : s.terms) {
              acc.add(std::log(t.alpha) + t.log_beta - (t.alpha + 1.0) * ly);
            }
            return -materialize(acc.value());
          },
          [&](const Prop1bV0& p) {
            if (y <= p.z0) return dV0(y);
            const double r = y + tail_->s;
            return -tail_->d / (r * r);
          },
          [&](const NumericU&) { return -I(y); },
      },
      family_);
}

double UtilitySpec::raw_U(double x) const {
  return std::visit(
      Overloaded{
          [&](const Crra& c) { return std::pow(x, c.gamma) / c.gamma; },
          [&](const PowerConjugate& p) { return power_utility(p.alpha, p.beta, x); },
          [&](const NumericU& nu) {
            const double t = std::log(x);
            const std::size_t n = nu.x.size();
            const double t0 = std::log(nu.x.front());
            const double tn = std::log(nu.x.back());
            if (t <= t0) return nu.u.front() + pchip_slopes_.front() * (t - t0);
            if (t >= tn) return nu.u.back() + pchip_slopes_.back() * (t - tn);
            const auto it = std::upper_bound(nu.x.begin(), nu.x.end(), x);
            const std::size_t i = static_cast<std::size_t>(it - nu.x.begin()) - 1;
            const double ta = std::log(nu.x[i]);
            const double tb = std::log(nu.x[std::min(i + 1, n - 1)]);
            const double h = tb - ta;
            const double s = (t - ta) / h;
            const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
            const double h10 = s * (1 - s) * (1 - s);
            const double h01 = s * s * (3 - 2 * s);
            const double h11 = s * s * (s - 1);
            return h00 * nu.u[i] + h10 * h * pchip_slopes_[i] + h01 * nu.u[i + 1] +
                   h11 * h * pchip_slopes_[i + 1];
          },
          [&](const auto&) {
            // Conjugate side: U(x) = V(y) + x y at y = U'(x).
            const double y = raw_dU(x);
            return raw_V(y) + x * y;
          },
      },
      family_);
}

double UtilitySpec::raw_dU(double x) const {
  return std::visit(
      Overloaded{
          [&](const Crra& c) { return std::pow(x, c.gamma - 1.0); },
          [&](const PowerConjugate& p) {
            return std::pow(x / (p.alpha * p.beta), -1.0 / (p.alpha + 1.0));
          },
          [&](const NumericU& nu) {
            const double t = std::log(x);
            const double t0 = std::log(nu.x.front());
            const double tn = std::log(nu.x.back());
            double du_dt;
            if (t <= t0) {
              du_dt = pchip_slopes_.front();
            } else if (t >= tn) {
              du_dt = pchip_slopes_.back();
            } else {
              const auto it = std::upper_bound(nu.x.begin(), nu.x.end(), x);
              const std::size_t i = static_cast<std::size_t>(it - nu.x.begin()) - 1;
              const double ta = std::log(nu.x[i]);
              const double tb = std::log(nu.x[i + 1]);
              const double h = tb - ta;
              const double s = (t - ta) / h;
              const double d00 = 6 * s * s - 6 * s;
              const double d10 = 3 * s * s - 4 * s + 1;
              const double d01 = -6 * s * s + 6 * s;
              const double d11 = 3 * s * s - 2 * s;
              du_dt = (d00 * nu.u[i] + d01 * nu.u[i + 1]) / h + d10 * pchip_slopes_[i] +
                      d11 * pchip_slopes_[i + 1];
            }
            return du_dt / x;
          },
          [&](const auto&) {
            // U'(x) = y solving -V'(y) = x; -V' is decreasing in y.
            auto g = [&](double t) { return std::log(-raw_dV(std::exp(t))); };
            return std::exp(solve_decreasing_log(g, std::log(x), 0.0));
          },
      },
      family_);
}

double UtilitySpec::U(double x) const {
  require_positive(x, "U argument x");
  return raw_U(x) - shift_;
}

double UtilitySpec::dU(double x) const {
  require_positive(x, "U' argument x");
  return raw_dU(x);
}

double UtilitySpec::I(double y) const {
  require_positive(y, "I argument y");
  if (defined_by_v()) return -raw_dV(y);
  if (const auto* c = std::get_if<Crra>(&family_)) return std::pow(y, -1.0 / (1.0 - c->gamma));
  auto g = [&](double t) { return std::log(raw_dU(std::exp(t))); };
  return std::exp(solve_decreasing_log(g, std::log(y), 0.0));
}

double UtilitySpec::V(double y) const {
  require_positive(y, "V argument y");
  return raw_V(y) - shift_;
}

double UtilitySpec::dV(double y) const {
  require_positive(y, "V' argument y");
  return raw_dV(y);
}

double UtilitySpec::log_V(double y) const {
  require_positive(y, "V argument y");
  if (shift_ == 0.0) {
    if (const auto pl = power_law()) return pl->log_coeff - pl->exponent * std::log(y);
    if (const auto* s = std::get_if<SeriesConjugate>(&family_)) {
      return evaluate_series(*s, y).log_value;
    }
    if (const auto* p = std::get_if<Prop1bV0>(&family_); p && y <= p->z0) return log_V0(y);
  }
  const double v = V(y);
  if (!(v > 0.0)) throw NumericError("log_V: V(y) <= 0 at y=" + std::to_string(y));
  return std::log(v);
}

double conjugate_V(const UtilitySpec& u, double y) { return u.V(y); }

ConjugateResult conjugate_U(const std::function<double(double)>& V, double x, double y_guess) {
  require_positive(x, "conjugate_U argument x");
  require_positive(y_guess, "conjugate_U y_guess");
  auto h = [&](double t) {
    const double y = std::exp(t);
    // Walking off the representable range means no interior minimum.
    if (y == 0.0 || std::isinf(y)) return -std::numeric_limits<double>::infinity();
    const double v = V(y) + x * y;
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  const Interval br = bracket_minimum(h, std::log(y_guess), 0.5, 1000);
  const auto opt = golden_section_min(h, br.lo, br.hi, kGoldenTol);
  return {opt.value, std::exp(opt.arg)};
}

ConjugateResult conjugate_U(const UtilitySpec& v_spec, double x, double y_guess) {
  return conjugate_U([&](double y) { return v_spec.V(y); }, x, y_guess);
}

double power_utility(double alpha, double beta, double x) {
  require_positive(alpha, "alpha");
  require_positive(beta, "beta");
  require_positive(x, "x");
  const double r = alpha / (1.0 + alpha);
  return (1.0 + alpha) / std::pow(alpha, r) * std::pow(beta, 1.0 / (1.0 + alpha)) *
         std::pow(x, r);
}

ElasticityEstimate asymptotic_elasticity(const UtilitySpec& u, const std::vector<double>& x_grid) {
  if (x_grid.empty()) throw ValidationError("asymptotic_elasticity: empty grid");
  for (double x : x_grid) {
    if (!(u.U(x) > 0.0)) {
      throw ValidationError("asymptotic_elasticity: U(" + std::to_string(x) +
                            ") <= 0; shift U so it is positive on the grid");
    }
  }
  const double x_max = *std::max_element(x_grid.begin(), x_grid.end());
  ElasticityEstimate out{-std::numeric_limits<double>::infinity(), {}};
  for (double x : x_grid) {
    if (x < x_max / 10.0) continue;
    const double e = x * u.dU(x) / u.U(x);
    out.tail_values.emplace_back(x, e);
    out.running_sup = std::max(out.running_sup, e);
  }
  std::sort(out.tail_values.begin(), out.tail_values.end());
  return out;
}

MajorantBound fit_majorant(const std::function<double(double)>& V,
                           const std::vector<double>& y_grid) {
  if (y_grid.size() < 2) throw ValidationError("fit_majorant: need at least 2 grid points");
  std::vector<double> lx, ly;
  for (double y : y_grid) {
    require_positive(y, "fit_majorant grid point");
    const double v = V(y);
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ValidationError("fit_majorant: V(" + std::to_string(y) +
                            ") is not positive; shift U by a constant first");
    }
    lx.push_back(std::log(y));
    ly.push_back(std::log(v));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw ValidationError("fit_majorant: grid must contain distinct points");
  double alpha = -sxy / sxx;
  if (!(alpha > 0.0)) throw NumericError("fit_majorant: fitted exponent is not positive");
  // Smallest L with log V <= log L - alpha log y on the grid.
  double log_L = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lx.size(); ++i) log_L = std::max(log_L, ly[i] + alpha * lx[i]);
  const auto [lo, hi] = std::minmax_element(y_grid.begin(), y_grid.end());
  // A few ulps of slack so the bound survives the exp/log round trip.
  return {std::exp(log_L) * (1.0 + 1e-13), alpha, *lo, *hi};
}

}  // namespace walklab
